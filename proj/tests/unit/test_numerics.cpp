#include <doctest.h>

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "common/error.hpp"
#include "numerics/gradcheck.hpp"
#include "numerics/ops.hpp"
#include "numerics/optim.hpp"
#include "numerics/rng.hpp"

using namespace ssal;

namespace {

// Random weights turn any tensor-valued op into a scalar with non-degenerate gradients.
Var weighted_sum(Graph& g, Var v, std::uint64_t seed) {
  Rng rng(seed);
  Tensor w = rng.normal_tensor(v.shape());
  return ops::sum(ops::mul(v, g.constant(std::move(w))));
}

double check_unary(const std::function<Var(Var)>& op, Tensor point) {
  return grad_check([&](Graph& g, Var x) { return weighted_sum(g, op(x), 7); }, point);
}

Tensor random_point(std::uint64_t seed, std::size_t r, std::size_t c, double lo = -2.0, double hi = 2.0) {
  Rng rng(seed);
  Tensor t = Tensor::matrix(r, c);
  for (double& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

}  // namespace

TEST_CASE("tensor shape contract") {
  CHECK_THROWS_AS(Tensor({2, 2}, std::vector<double>{1, 2, 3}), Error);
  Tensor t = Tensor::from_rows({{1, 2, 3}, {4, 5, 6}});
  CHECK(t.rows() == 2);
  CHECK(t.cols() == 3);
  CHECK(t.at(1, 2) == 6);
  const std::size_t idx[] = {1, 0, 1};
  Tensor g = gather_rows(t, idx);
  CHECK(g.rows() == 3);
  CHECK(g.at(0, 0) == 4);
  CHECK(g.at(1, 2) == 3);
}

TEST_CASE("forward examples") {
  Graph g;
  Var sm = ops::softmax_rows(g.constant(Tensor::from_rows({{0, 0}})));
  CHECK(sm.value()[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sm.value()[1] == doctest::Approx(0.5).epsilon(1e-15));

  Var r = ops::relu(g.constant(Tensor::from_rows({{-1, 2}})));
  CHECK(r.value()[0] == 0.0);
  CHECK(r.value()[1] == 2.0);

  const int labels[] = {3, 7};
  Var ce = ops::cross_entropy_per_sample(g.constant(Tensor::matrix(2, 10, 0.25)), labels);
  CHECK(ce.value()[0] == doctest::Approx(std::log(10.0)).epsilon(1e-14));
  CHECK(ce.value()[1] == doctest::Approx(2.302585).epsilon(1e-6));
}

TEST_CASE("forward errors") {
  Graph g;
  Var a = g.constant(Tensor::matrix(2, 3));
  Var b = g.constant(Tensor::matrix(4, 2));
  SUBCASE("shape mismatch is structural") {
    try {
      ops::matmul(a, b);
      FAIL("expected a structural error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::structural);
    }
  }
  SUBCASE("non-finite output names the node") {
    try {
      ops::exp(g.constant(Tensor::scalar(1000.0)));
      FAIL("expected a numeric error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::numeric);
      CHECK(std::string(e.what()).find("exp") != std::string::npos);
    }
  }
  SUBCASE("log of zero is numeric") {
    CHECK_THROWS_AS(ops::log(g.constant(Tensor::scalar(0.0))), Error);
  }
}

TEST_CASE("backward examples") {
  Parameter x("x", Tensor::scalar(3.0));
  {
    Graph g;
    Var v = g.parameter(x);
    g.backward(ops::mul(v, v));
  }
  CHECK(x.grad.item() == doctest::Approx(6.0));

  Parameter y("y", Tensor::scalar(-1.0));
  {
    Graph g;
    g.backward(ops::sum(ops::relu(g.parameter(y))));
  }
  CHECK(y.grad.item() == 0.0);

  Graph g;
  Var v = g.parameter(x);
  CHECK_THROWS_AS(g.backward(ops::concat_cols(std::array<Var, 2>{v, v})), Error);
}

TEST_CASE("unreachable parameters keep a zero gradient") {
  Parameter used("used", Tensor::scalar(2.0));
  Parameter unused("unused", Tensor::scalar(5.0));
  unused.grad = Tensor::scalar(0.0);
  Graph g;
  Var u = g.parameter(used);
  g.parameter(unused);
  g.backward(ops::square(u));
  CHECK(used.grad.item() == doctest::Approx(4.0));
  CHECK(unused.grad.item() == 0.0);
}

TEST_CASE("frozen parameters receive no gradient") {
  Parameter w("w", Tensor::scalar(2.0));
  Parameter x("x", Tensor::scalar(3.0));
  Graph g;
  g.freeze(w);
  g.backward(ops::mul(g.parameter(x), g.parameter(w)));
  CHECK(x.grad.item() == doctest::Approx(2.0));
  CHECK(w.grad.item() == 0.0);
}

TEST_CASE("grad_check analytic cases") {
  CHECK(grad_check([](Graph&, Var x) { return ops::mul(x, x); }, Tensor::scalar(3.0)) < 1e-6);
  Parameter x("x", Tensor::scalar(0.0));
  {
    Graph g;
    g.backward(ops::sigmoid(g.parameter(x)));
  }
  CHECK(x.grad.item() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(grad_check([](Graph&, Var v) { return ops::sigmoid(v); }, Tensor::scalar(0.0)) < 1e-6);
}

TEST_CASE("every primitive passes finite differences at five seeded points") {
  const std::vector<std::pair<const char*, std::function<double(std::uint64_t)>>> cases = {
      {"matmul",
       [](std::uint64_t s) {
         const Tensor b = random_point(s + 100, 3, 2);
         return grad_check([&](Graph& g, Var a) { return weighted_sum(g, ops::matmul(a, g.constant(b)), s); },
                           random_point(s, 4, 3));
       }},
      {"matmul rhs",
       [](std::uint64_t s) {
         const Tensor a = random_point(s + 100, 4, 3);
         return grad_check([&](Graph& g, Var b) { return weighted_sum(g, ops::matmul(g.constant(a), b), s); },
                           random_point(s, 3, 2));
       }},
      {"add row broadcast",
       [](std::uint64_t s) {
         const Tensor a = random_point(s + 100, 4, 3);
         return grad_check([&](Graph& g, Var b) { return weighted_sum(g, ops::add(g.constant(a), b), s); },
                           random_point(s, 1, 3));
       }},
      {"sub column broadcast",
       [](std::uint64_t s) {
         const Tensor a = random_point(s + 100, 4, 3);
         return grad_check([&](Graph& g, Var b) { return weighted_sum(g, ops::sub(g.constant(a), b), s); },
                           random_point(s, 4, 1));
       }},
      {"mul",
       [](std::uint64_t s) {
         const Tensor b = random_point(s + 100, 3, 3);
         return grad_check([&](Graph& g, Var a) { return weighted_sum(g, ops::mul(a, g.constant(b)), s); },
                           random_point(s, 3, 3));
       }},
      {"mul scalar broadcast",
       [](std::uint64_t s) {
         const Tensor a = random_point(s + 100, 3, 3);
         return grad_check([&](Graph& g, Var b) { return weighted_sum(g, ops::mul(g.constant(a), b), s); },
                           random_point(s, 1, 1));
       }},
      {"scale", [](std::uint64_t s) { return check_unary([](Var x) { return ops::scale(x, -1.7); }, random_point(s, 3, 2)); }},
      {"add_scalar", [](std::uint64_t s) { return check_unary([](Var x) { return ops::add_scalar(x, 0.3); }, random_point(s, 3, 2)); }},
      {"relu", [](std::uint64_t s) { return check_unary([](Var x) { return ops::relu(x); }, random_point(s, 3, 4)); }},
      {"sigmoid", [](std::uint64_t s) { return check_unary([](Var x) { return ops::sigmoid(x); }, random_point(s, 3, 4)); }},
      {"tanh", [](std::uint64_t s) { return check_unary([](Var x) { return ops::tanh(x); }, random_point(s, 3, 4)); }},
      {"exp", [](std::uint64_t s) { return check_unary([](Var x) { return ops::exp(x); }, random_point(s, 3, 4)); }},
      {"log", [](std::uint64_t s) { return check_unary([](Var x) { return ops::log(x); }, random_point(s, 3, 4, 0.2, 3.0)); }},
      {"abs", [](std::uint64_t s) { return check_unary([](Var x) { return ops::abs(x); }, random_point(s, 3, 4)); }},
      {"square", [](std::uint64_t s) { return check_unary([](Var x) { return ops::square(x); }, random_point(s, 3, 4)); }},
      {"clamp", [](std::uint64_t s) { return check_unary([](Var x) { return ops::clamp(x, -1.0, 1.0); }, random_point(s, 3, 4)); }},
      {"softmax_rows", [](std::uint64_t s) { return check_unary([](Var x) { return ops::softmax_rows(x); }, random_point(s, 3, 4)); }},
      {"sum", [](std::uint64_t s) { return grad_check([](Graph&, Var x) { return ops::sum(ops::square(x)); }, random_point(s, 3, 4)); }},
      {"mean", [](std::uint64_t s) { return grad_check([](Graph&, Var x) { return ops::mean(ops::square(x)); }, random_point(s, 3, 4)); }},
      {"sum_cols", [](std::uint64_t s) { return check_unary([](Var x) { return ops::sum_cols(x); }, random_point(s, 3, 4)); }},
      {"mean_cols", [](std::uint64_t s) { return check_unary([](Var x) { return ops::mean_cols(x); }, random_point(s, 3, 4)); }},
      {"concat_cols",
       [](std::uint64_t s) {
         return check_unary([](Var x) { return ops::concat_cols(std::array<Var, 2>{ops::square(x), x}); }, random_point(s, 3, 2));
       }},
      {"slice_cols", [](std::uint64_t s) { return check_unary([](Var x) { return ops::slice_cols(x, 1, 3); }, random_point(s, 3, 4)); }},
      {"slice_rows", [](std::uint64_t s) { return check_unary([](Var x) { return ops::slice_rows(x, 1, 3); }, random_point(s, 4, 2)); }},
      {"reshape", [](std::uint64_t s) { return check_unary([](Var x) { return ops::reshape(ops::square(x), 2, 6); }, random_point(s, 4, 3)); }},
      {"mse",
       [](std::uint64_t s) {
         const Tensor t = random_point(s + 100, 3, 4);
         return grad_check([&](Graph& g, Var x) { return ops::mse(x, g.constant(t)); }, random_point(s, 3, 4));
       }},
      {"bce",
       [](std::uint64_t s) {
         const Tensor t = random_point(s + 100, 4, 1, 0.0, 1.0);
         return grad_check([&](Graph& g, Var p) { return ops::bce(p, g.constant(t)); }, random_point(s, 4, 1, 0.05, 0.95));
       }},
      {"cross_entropy_per_sample",
       [](std::uint64_t s) {
         const int labels[] = {0, 2, 1};
         return check_unary([&](Var x) { return ops::cross_entropy_per_sample(x, labels); }, random_point(s, 3, 3));
       }},
  };
  for (const auto& [name, check] : cases) {
    for (std::uint64_t s = 1; s <= 5; ++s) {
      INFO(name << " at point " << s);
      CHECK(check(s) < 1e-4);
    }
  }
}

TEST_CASE("composite MLP gradient matches finite differences") {
  Rng rng(11);
  Parameter w1("w1", rng.normal_tensor({3, 5}, 0.7));
  Parameter b1("b1", rng.normal_tensor({1, 5}, 0.1));
  Parameter w2("w2", rng.normal_tensor({5, 3}, 0.7));
  const Tensor x = rng.normal_tensor({6, 3});
  const int labels[] = {0, 1, 2, 2, 1, 0};
  Parameter* params[] = {&w1, &b1, &w2};
  const double err = grad_check_params(
      [&](Graph& g) {
        Var h = ops::tanh(ops::add(ops::matmul(g.constant(x), g.parameter(w1)), g.parameter(b1)));
        return ops::mean(ops::cross_entropy_per_sample(ops::matmul(h, g.parameter(w2)), labels));
      },
      params);
  CHECK(err < 1e-4);
}

TEST_CASE("softmax rows sum to one and cross-entropy is non-negative") {
  Graph g;
  const Tensor logits = random_point(3, 50, 7, -30.0, 30.0);
  Var p = ops::softmax_rows(g.constant(logits));
  for (std::size_t i = 0; i < 50; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 7; ++j) s += p.value().at(i, j);
    CHECK(std::fabs(s - 1.0) <= 1e-12);
  }
  std::vector<int> labels(50);
  for (std::size_t i = 0; i < 50; ++i) labels[i] = static_cast<int>(i % 7);
  Var ce = ops::cross_entropy_per_sample(g.constant(logits), labels);
  for (double v : ce.value().values()) CHECK(v >= 0.0);
}

TEST_CASE("sum and mean distribute gradients exactly") {
  Parameter x("x", random_point(4, 3, 4));
  {
    Graph g;
    g.backward(ops::scale(ops::sum(g.parameter(x)), 2.5));
  }
  for (double v : x.grad.values()) CHECK(v == 2.5);
  x.zero_grad();
  {
    Graph g;
    g.backward(ops::mean(g.parameter(x)));
  }
  for (double v : x.grad.values()) CHECK(v == 1.0 / 12.0);
}

TEST_CASE("identical seeds give bit-identical values and gradients") {
  auto run = [] {
    Rng rng = Rng::derive(5, "determinism");
    Parameter w("w", rng.normal_tensor({4, 4}));
    const Tensor x = rng.normal_tensor({8, 4});
    Graph g;
    Var out = ops::mean(ops::tanh(ops::matmul(g.constant(x), g.parameter(w))));
    g.backward(out);
    return std::make_pair(out.value(), w.grad);
  };
  CHECK(run() == run());
}

TEST_CASE("sgd momentum step") {
  SUBCASE("first step") {
    Parameter p("p", Tensor::scalar(1.0));
    SgdMomentum opt({&p}, {0.1, 0.9, 0.0});
    p.grad = Tensor::scalar(0.1);
    opt.step();
    CHECK(opt.velocity(0).item() == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(p.value.item() == doctest::Approx(0.99).epsilon(1e-15));
  }
  SUBCASE("zero gradient decays velocity only") {
    Parameter p("p", Tensor::scalar(1.0));
    SgdMomentum opt({&p}, {0.1, 0.9, 0.0});
    p.grad = Tensor::scalar(0.1);
    opt.step();
    const double p1 = p.value.item();
    p.grad = Tensor::scalar(0.0);
    opt.step();
    CHECK(opt.velocity(0).item() == doctest::Approx(0.09).epsilon(1e-15));
    CHECK(p.value.item() == doctest::Approx(p1 - 0.1 * 0.09).epsilon(1e-15));
  }
  SUBCASE("two steps against the hand recurrence") {
    Parameter p("p", Tensor::scalar(1.0));
    SgdMomentum opt({&p}, {0.1, 0.9, 0.0});
    for (int i = 0; i < 2; ++i) {
      p.grad = Tensor::scalar(0.1);
      opt.step();
    }
    CHECK(opt.velocity(0).item() == doctest::Approx(0.19).epsilon(1e-14));
    CHECK(p.value.item() == doctest::Approx(0.971).epsilon(1e-14));
    CHECK(opt.steps() == 2);
  }
  SUBCASE("weight decay joins the velocity") {
    Parameter p("p", Tensor::scalar(2.0));
    SgdMomentum opt({&p}, {0.1, 0.9, 0.01});
    p.grad = Tensor::scalar(0.0);
    opt.step();
    CHECK(p.value.item() == doctest::Approx(2.0 - 0.1 * 0.02).epsilon(1e-15));
  }
  SUBCASE("gradient shape mismatch") {
    Parameter p("p", Tensor::scalar(1.0));
    SgdMomentum opt({&p}, {});
    p.grad = Tensor::matrix(2, 1);
    CHECK_THROWS_AS(opt.step(), Error);
  }
}

TEST_CASE("adam step") {
  SUBCASE("first step moves by the learning rate") {
    Parameter p("p", Tensor::scalar(1.0));
    Adam opt({&p}, {0.001});
    p.grad = Tensor::scalar(0.1);
    opt.step();
    CHECK(p.value.item() == doctest::Approx(0.999).epsilon(1e-9));
  }
  SUBCASE("zero gradient leaves the parameter") {
    Parameter p("p", Tensor::scalar(1.0));
    Adam opt({&p}, {0.001});
    p.grad = Tensor::scalar(0.0);
    opt.step();
    CHECK(p.value.item() == 1.0);
  }
  SUBCASE("ten steps against a scalar recurrence") {
    Parameter p("p", Tensor::scalar(1.0));
    Adam opt({&p}, {0.01, 0.9, 0.999, 1e-8});
    double x = 1.0, m = 0.0, v = 0.0;
    for (int t = 1; t <= 10; ++t) {
      const double g = 0.3 - 0.05 * t;
      p.grad = Tensor::scalar(g);
      opt.step();
      m = 0.9 * m + 0.1 * g;
      v = 0.999 * v + 0.001 * g * g;
      const double mh = m / (1.0 - std::pow(0.9, t));
      const double vh = v / (1.0 - std::pow(0.999, t));
      x -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
    }
    CHECK(std::fabs(p.value.item() - x) <= 1e-12);
  }
}
