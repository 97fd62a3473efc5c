#include "numerics/tensor.hpp"

#include <cmath>
#include <numeric>

#include "common/error.hpp"

namespace ssal {

std::size_t shape_size(const Shape& shape) {
  if (shape.empty()) return 0;
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  require(shape_size(shape_) == data_.size(), ErrorKind::structural,
          "tensor shape " + shape_string(shape_) + " does not match " + std::to_string(data_.size()) +
              " values");
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n ? rows.begin()->size() : 0;
  std::vector<double> data;
  data.reserve(n * m);
  for (const auto& r : rows) {
    require(r.size() == m, ErrorKind::structural, "ragged rows in Tensor::from_rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Tensor({n, m}, std::move(data));
}

Tensor Tensor::column(std::span<const double> values) {
  return Tensor({values.size(), 1}, std::vector<double>(values.begin(), values.end()));
}

Tensor Tensor::row(std::span<const double> values) {
  return Tensor({1, values.size()}, std::vector<double>(values.begin(), values.end()));
}

std::size_t Tensor::cols() const noexcept {
  if (shape_.empty()) return 0;
  if (shape_.size() == 1) return 1;
  return data_.empty() ? shape_[1] : data_.size() / shape_[0];
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void Tensor::add_inplace(const Tensor& other) {
  require(same_shape(other), ErrorKind::structural,
          "cannot add " + shape_string(other.shape_) + " into " + shape_string(shape_));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
}

bool Tensor::all_finite() const noexcept {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

double Tensor::item() const {
  require(data_.size() == 1, ErrorKind::structural,
          "item() on tensor of shape " + shape_string(shape_));
  return data_[0];
}

Tensor gather_rows(const Tensor& t, std::span<const std::size_t> indices) {
  const std::size_t m = t.cols();
  Tensor out = Tensor::matrix(indices.size(), m);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    require(indices[i] < t.rows(), ErrorKind::structural,
            "row index " + std::to_string(indices[i]) + " out of range for " + std::to_string(t.rows()) + " rows");
    std::copy(t.data() + indices[i] * m, t.data() + (indices[i] + 1) * m, out.data() + i * m);
  }
  return out;
}

}  // namespace ssal
