#include "numerics/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace ssal {
namespace {

double relative_error(double analytic, double numeric) {
  return std::fabs(analytic - numeric) / std::max(1e-8, std::fabs(analytic) + std::fabs(numeric));
}

double evaluate(const std::function<Var(Graph&)>& f) {
  Graph g;
  Var out = f(g);
  require(out.value().size() == 1, ErrorKind::structural, "grad_check needs a scalar-valued function");
  const double v = out.value()[0];
  require(std::isfinite(v), ErrorKind::numeric, "grad_check: non-finite function value");
  return v;
}

}  // namespace

double grad_check(const std::function<Var(Graph&, Var)>& f, const Tensor& point, double h) {
  require(point.all_finite(), ErrorKind::numeric, "grad_check: point is not finite");
  Parameter x("x", point);
  Parameter* params[] = {&x};
  return grad_check_params([&](Graph& g) { return f(g, g.parameter(x)); }, params, h);
}

double grad_check_params(const std::function<Var(Graph&)>& f, std::span<Parameter* const> params,
                         double h) {
  for (Parameter* p : params) p->grad = Tensor(p->value.shape(), 0.0);
  {
    Graph g;
    Var out = f(g);
    g.backward(out);
  }
  double worst = 0.0;
  for (Parameter* p : params) {
    for (std::size_t k = 0; k < p->value.size(); ++k) {
      const double saved = p->value[k];
      p->value[k] = saved + h;
      const double up = evaluate(f);
      p->value[k] = saved - h;
      const double down = evaluate(f);
      p->value[k] = saved;
      const double numeric = (up - down) / (2.0 * h);
      worst = std::max(worst, relative_error(p->grad[k], numeric));
    }
  }
  return worst;
}

}  // namespace ssal
