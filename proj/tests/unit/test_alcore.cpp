#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "alcore/adversarial.hpp"
#include "alcore/adversarial_losses.hpp"
#include "alcore/experiment.hpp"
#include "alcore/pool.hpp"
#include "alcore/selection.hpp"
#include "alcore/strategy.hpp"
#include "alcore/target_training.hpp"
#include "common/error.hpp"
#include "dataio/generators.hpp"
#include "numerics/gradcheck.hpp"
#include "numerics/ops.hpp"
#include "numerics/optim.hpp"
#include "ranking/ranks.hpp"

using namespace ssal;

namespace {

const double kTwoLn2 = 2.0 * std::numbers::ln2;

ExperimentConfig small_config(const std::string& strategy) {
  ExperimentConfig c;
  c.strategy = strategy;
  c.dataset.kind = DatasetKind::moons;
  c.dataset.n = 300;
  c.initial_labeled = 10;
  c.budget = 10;
  c.cycles = 3;
  c.hidden_widths = {16, 16};
  c.supervised_epochs = 15;
  c.semi_epochs = 5;
  c.adversarial_epochs = 2;
  c.vae_hidden = 16;
  c.disc_hidden = 16;
  c.sorter_length = 4;
  return c;
}

LstmSorter tiny_sorter() {
  Rng rng(99);
  return LstmSorter({4, 8}, rng);
}

Tensor column(std::vector<double> v) { return Tensor::column(v); }

}  // namespace

TEST_CASE("strategy names and traits") {
  for (StrategyKind k : all_strategies()) CHECK(parse_strategy(strategy_name(k)) == k);
  CHECK_FALSE(parse_strategy("vaal").has_value());
  const StrategyTraits s = strategy_traits(StrategyKind::ssvaal);
  CHECK((s.ranking && s.pseudo && s.adversarial && s.rank_conditioning));
  CHECK(s.pseudo_mode == PseudoMode::agreement);
  CHECK_FALSE(strategy_traits(StrategyKind::ranking_only).pseudo);
  CHECK_FALSE(strategy_traits(StrategyKind::capl_only).ranking);
  CHECK(strategy_traits(StrategyKind::plain_pl).pseudo_mode == PseudoMode::threshold);
  CHECK_FALSE(strategy_traits(StrategyKind::random).adversarial);
  CHECK(strategy_traits(StrategyKind::maxloss).ranking);
}

TEST_CASE("pool partition") {
  std::vector<int> oracle(50);
  for (std::size_t i = 0; i < 50; ++i) oracle[i] = static_cast<int>(i % 3);
  PoolState pool(oracle, 8, 1);
  CHECK(pool.labeled().size() == 8);
  CHECK(pool.unlabeled().size() == 42);
  CHECK(std::is_sorted(pool.labeled().begin(), pool.labeled().end()));
  CHECK(std::is_sorted(pool.unlabeled().begin(), pool.unlabeled().end()));
  CHECK(PoolState(oracle, 8, 1).labeled() == pool.labeled());
  CHECK(PoolState(oracle, 8, 2).labeled() != pool.labeled());
  const std::vector<int> classes = pool.labeled_classes();
  for (std::size_t i = 0; i < 8; ++i) CHECK(classes[i] == oracle[pool.labeled()[i]]);

  const std::vector<std::size_t> pick = {pool.unlabeled()[0], pool.unlabeled()[5]};
  pool.label(pick);
  pool.check_invariants();
  CHECK(pool.labeled().size() == 10);
  CHECK(pool.cycle() == 1);
  CHECK(pool.history()[0] == pick);

  SUBCASE("invalid selections") {
    CHECK_THROWS_AS(pool.label(std::vector<std::size_t>{pool.labeled()[0]}), Error);
    CHECK_THROWS_AS(pool.label(std::vector<std::size_t>{50}), Error);
    const std::size_t u = pool.unlabeled()[0];
    CHECK_THROWS_AS(pool.label(std::vector<std::size_t>{u, u}), Error);
    CHECK(pool.labeled().size() == 10);
  }
  CHECK_THROWS_AS(PoolState(oracle, 51, 0), Error);
}

TEST_CASE("selection tie rule and boundaries") {
  CHECK(select_samples(std::vector<double>{0.9, 0.1, 0.5, 0.2}, 2) == std::vector<std::size_t>{1, 3});
  CHECK(select_samples(std::vector<double>{0.5, 0.5, 0.5, 0.5}, 2) == std::vector<std::size_t>{0, 1});
  CHECK(select_samples(std::vector<double>{0.3, 0.1, 0.1, 0.2}, 2) == std::vector<std::size_t>{1, 2});
  CHECK(select_samples(std::vector<double>{0.3, 0.2}, 2) == std::vector<std::size_t>{0, 1});
  CHECK(select_samples(std::vector<double>{0.3, 0.2}, 5) == std::vector<std::size_t>{0, 1});
  CHECK_THROWS_AS(select_samples(std::vector<double>{}, 2), Error);
  CHECK_THROWS_AS(select_samples(std::vector<double>{0.1}, 0), Error);
  CHECK(select_largest(std::vector<double>{1, 3, 3, 2}, 2) == std::vector<std::size_t>{1, 2});
  CHECK(select_largest(std::vector<double>{1, 1, 1}, 2) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("selection agrees with a brute-force stable sort") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p(30);
    for (double& v : p) v = std::round(rng.uniform() * 5.0) / 5.0;
    const std::size_t b = 1 + rng.index(30);
    std::vector<std::size_t> order(30);
    for (std::size_t i = 0; i < 30; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return p[a] < p[c]; });
    std::vector<std::size_t> expected(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(b));
    std::sort(expected.begin(), expected.end());
    CHECK(select_samples(p, b) == expected);
  }
}

TEST_CASE("baseline strategies") {
  Rng rng(4);
  const Tensor uniform = Tensor::matrix(5, 4, 0.25);
  for (double h : prediction_entropy(uniform)) CHECK(h == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(baseline_select(StrategyKind::entropy, uniform, std::vector<double>(5), 2, rng) ==
        std::vector<std::size_t>{0, 1});
  const Tensor mixed = Tensor::from_rows({{1, 0}, {0, 1}, {0.5, 0.5}, {1, 0}});
  CHECK(baseline_select(StrategyKind::entropy, mixed, std::vector<double>(4), 1, rng) == std::vector<std::size_t>{2});
  CHECK(baseline_select(StrategyKind::maxloss, mixed, std::vector<double>{0.1, 0.9, 0.3, 0.2}, 1, rng) ==
        std::vector<std::size_t>{1});
  Rng r1(7), r2(7);
  const auto a = baseline_select(StrategyKind::random, Tensor::matrix(40, 2, 0.5), std::vector<double>(40), 5, r1);
  const auto b = baseline_select(StrategyKind::random, Tensor::matrix(40, 2, 0.5), std::vector<double>(40), 5, r2);
  CHECK(a == b);
  CHECK(std::set<std::size_t>(a.begin(), a.end()).size() == 5);
}

TEST_CASE("adversarial losses at one half") {
  Graph g;
  Var half_l = g.constant(Tensor::matrix(6, 1, 0.5));
  Var half_u = g.constant(Tensor::matrix(9, 1, 0.5));
  CHECK(std::fabs(vae_adversarial_loss(half_l, half_u).value().item() - kTwoLn2) <= 1e-9);
  CHECK(std::fabs(discriminator_loss(half_l, half_u).value().item() - kTwoLn2) <= 1e-9);
  Var hi = g.constant(Tensor::matrix(3, 1, 1.0 - ops::kProbFloor));
  Var lo = g.constant(Tensor::matrix(3, 1, ops::kProbFloor));
  CHECK(vae_adversarial_loss(hi, hi).value().item() < 1e-6);
  CHECK(discriminator_loss(hi, lo).value().item() < 1e-6);
  CHECK_THROWS_AS(vae_adversarial_loss(g.constant(Tensor::matrix(0, 1)), half_u), Error);
}

TEST_CASE("vae adversarial loss decreases as D rises") {
  const Tensor dl = column({0.2, 0.6, 0.4});
  const Tensor du = column({0.3, 0.7});
  Parameter pl("dl", dl), pu("du", du);
  Graph g;
  g.backward(vae_adversarial_loss(g.parameter(pl), g.parameter(pu)));
  for (double v : pl.grad.values()) CHECK(v < 0.0);
  for (double v : pu.grad.values()) CHECK(v < 0.0);
  // Directional finite difference: nudging every output up lowers the loss.
  Tensor up_l = dl, up_u = du;
  for (double& v : up_l.values()) v += 1e-4;
  for (double& v : up_u.values()) v += 1e-4;
  Graph g2;
  CHECK(vae_adversarial_loss(g2.constant(up_l), g2.constant(up_u)).value().item() <
        vae_adversarial_loss(g2.constant(dl), g2.constant(du)).value().item());
}

TEST_CASE("loss gradients match finite differences") {
  Rng rng(5);
  const Tensor dl = column({0.2, 0.6, 0.4, 0.9});
  const Tensor du = column({0.3, 0.7, 0.5, 0.1});
  CHECK(grad_check([&](Graph& g, Var d) { return vae_adversarial_loss(d, g.constant(du)); }, dl) < 1e-4);
  CHECK(grad_check([&](Graph& g, Var d) { return discriminator_loss(g.constant(dl), d); }, du) < 1e-4);

  Vae vae({3, 2, 8}, rng);
  Discriminator disc(2, 6, rng);
  const Tensor xl = rng.normal_tensor({4, 3}), xu = rng.normal_tensor({4, 3});
  const Tensor nl = rng.normal_tensor({4, 2}), nu = rng.normal_tensor({4, 2});
  const Tensor rl = column({0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}), ru = column({0.1, 0.9, 0.4, 0.0});
  std::vector<Parameter*> vp = vae.parameters();
  std::vector<Parameter*> dp = disc.parameters();
  auto forward = [&](Graph& g) {
    Var vxl = g.constant(xl), vxu = g.constant(xu), vrl = g.constant(rl), vru = g.constant(ru);
    VaeOutput ol = vae.forward(g, vxl, vrl, nl);
    VaeOutput ou = vae.forward(g, vxu, vru, nu);
    return std::make_tuple(vxl, vxu, vrl, vru, ol, ou);
  };
  CHECK(grad_check_params(
            [&](Graph& g) {
              auto [vxl, vxu, vrl, vru, ol, ou] = forward(g);
              return vae_transductive_loss(vxl, ol, vxu, ou, 0.7).total;
            },
            vp) < 1e-4);
  CHECK(grad_check_params(
            [&](Graph& g) {
              auto [vxl, vxu, vrl, vru, ol, ou] = forward(g);
              TransductiveLoss t = vae_transductive_loss(vxl, ol, vxu, ou, 1.0);
              return vae_total_loss(t.total, vae_adversarial_loss(g, disc, ol.z, vrl, ou.z, vru), 0.5);
            },
            vp) < 1e-4);
  CHECK(grad_check_params(
            [&](Graph& g) {
              auto [vxl, vxu, vrl, vru, ol, ou] = forward(g);
              return discriminator_loss(g, disc, ol.z, vrl, ou.z, vru);
            },
            dp) < 1e-4);

  SUBCASE("total gradient is additive in eta") {
    auto grads = [&](int which) {
      zero_grads(vp);
      Graph g;
      auto [vxl, vxu, vrl, vru, ol, ou] = forward(g);
      TransductiveLoss t = vae_transductive_loss(vxl, ol, vxu, ou, 1.0);
      Var adv = vae_adversarial_loss(g, disc, ol.z, vrl, ou.z, vru);
      g.backward(which == 0 ? vae_total_loss(t.total, adv, 2.0) : which == 1 ? t.total : adv);
      std::vector<double> out;
      for (Parameter* p : vp) out.insert(out.end(), p->grad.values().begin(), p->grad.values().end());
      return out;
    };
    const auto total = grads(0), trans = grads(1), adv = grads(2);
    for (std::size_t i = 0; i < total.size(); ++i)
      CHECK(total[i] == doctest::Approx(trans[i] + 2.0 * adv[i]).epsilon(1e-9).scale(1e-9));
  }
}

TEST_CASE("transductive loss special cases") {
  Graph g;
  Var x = g.constant(Tensor::from_rows({{1, 2}, {3, 4}}));
  Var zero = g.constant(Tensor::matrix(2, 3));
  VaeOutput perfect{zero, zero, zero, x};
  CHECK(vae_transductive_loss(x, perfect, x, perfect, 1.0).total.value().item() == 0.0);
  Rng rng(6);
  Var mu = g.constant(rng.normal_tensor({2, 3}));
  VaeOutput off{mu, mu, mu, g.constant(Tensor::matrix(2, 2))};
  TransductiveLoss t0 = vae_transductive_loss(x, off, x, off, 0.0);
  CHECK(t0.total.value().item() == t0.reconstruction.value().item());
  CHECK(t0.reconstruction.value().item() == doctest::Approx(2.0 * (1 + 4 + 9 + 16) / 4.0));
  TransductiveLoss t1 = vae_transductive_loss(x, off, x, off, 0.5);
  CHECK(t1.total.value().item() ==
        doctest::Approx(t1.reconstruction.value().item() + 0.5 * t1.kl.value().item()));
}

TEST_CASE("one alternating step lowers each player's own loss") {
  Rng rng(7);
  Vae vae({2, 2, 16}, rng);
  Discriminator disc(2, 16, rng);
  const Tensor xl = rng.normal_tensor({16, 2}), xu = rng.normal_tensor({32, 2});
  const Tensor nl = rng.normal_tensor({16, 2}), nu = rng.normal_tensor({32, 2});
  const Tensor rl = Tensor::matrix(16, 1, 0.25), ru = Tensor::matrix(32, 1, 0.75);
  std::vector<Parameter*> vp = vae.parameters(), dp = disc.parameters();
  Adam vopt(vp, {1e-3}), dopt(dp, {1e-3});
  auto vae_loss = [&](bool step) {
    Graph g;
    for (Parameter* p : dp) g.freeze(*p);
    Var vxl = g.constant(xl), vxu = g.constant(xu), vrl = g.constant(rl), vru = g.constant(ru);
    VaeOutput ol = vae.forward(g, vxl, vrl, nl), ou = vae.forward(g, vxu, vru, nu);
    Var total = vae_total_loss(vae_transductive_loss(vxl, ol, vxu, ou, 1.0).total,
                               vae_adversarial_loss(g, disc, ol.z, vrl, ou.z, vru), 1.0);
    if (step) {
      zero_grads(vp);
      g.backward(total);
      vopt.step();
    }
    return total.value().item();
  };
  auto disc_loss = [&](bool step) {
    Graph g;
    for (Parameter* p : vp) g.freeze(*p);
    Var vrl = g.constant(rl), vru = g.constant(ru);
    VaeOutput ol = vae.forward(g, g.constant(xl), vrl, nl), ou = vae.forward(g, g.constant(xu), vru, nu);
    Var loss = discriminator_loss(g, disc, ol.z, vrl, ou.z, vru);
    if (step) {
      zero_grads(dp);
      g.backward(loss);
      dopt.step();
    }
    return loss.value().item();
  };
  const double v0 = vae_loss(true);
  CHECK(vae_loss(false) < v0);
  const double d0 = disc_loss(true);
  CHECK(disc_loss(false) < d0);
}

TEST_CASE("rank conditioning is live") {
  Rng rng(8);
  Vae vae({2, 3, 8}, rng);
  Discriminator disc(3, 8, rng);
  Graph g;
  const Tensor x = rng.normal_tensor({4, 2}), noise = rng.normal_tensor({4, 3});
  VaeOutput a = vae.forward(g, g.constant(x), g.constant(Tensor::matrix(4, 1, 0.0)), noise);
  VaeOutput b = vae.forward(g, g.constant(x), g.constant(Tensor::matrix(4, 1, 1.0)), noise);
  CHECK(a.reconstruction.value() != b.reconstruction.value());
  CHECK(disc.forward(g, a.z, g.constant(Tensor::matrix(4, 1, 0.0))).value() !=
        disc.forward(g, a.z, g.constant(Tensor::matrix(4, 1, 1.0))).value());
}

TEST_CASE("rank scalars") {
  const std::vector<double> losses = {0.2, 1.5, 0.7};
  CHECK(labeled_rank_scalars(losses, true) == true_ranks(losses));
  CHECK(labeled_rank_scalars(losses, true) == std::vector<double>{1.0, 0.0, 0.5});
  CHECK(labeled_rank_scalars(std::vector<double>{0.4}, true) == std::vector<double>{0.0});
  CHECK(labeled_rank_scalars(losses, false) == std::vector<double>(3, 0.0));
  CHECK(unlabeled_rank_scalars(losses, true) == std::vector<double>{0.0, 1.0, 0.5 / 1.3});
  CHECK(unlabeled_rank_scalars(losses, false) == std::vector<double>(3, 0.0));
}

TEST_CASE("adversarial training plumbing") {
  ExperimentConfig c = small_config("ssvaal");
  Rng rng(9);
  AdversarialInputs in{rng.normal_tensor({12, 2}), std::vector<double>(12, 0.3), rng.normal_tensor({40, 2}),
                       std::vector<double>(40, 0.1), true};
  for (std::size_t i = 0; i < 12; ++i) in.labeled_losses[i] = 0.1 * static_cast<double>(i);
  SUBCASE("zero epochs returns the initialization") {
    c.adversarial_epochs = 0;
    c.eta = 0.0;
    AdversarialResult r = train_adversarial(in, c, 1);
    CHECK(r.steps == 0);
    CHECK(std::isnan(r.vae_loss));
    Rng init = Rng::derive(c.seed, "adversarial-init", 1);
    Vae fresh({2, c.latent_dim, c.vae_hidden}, init);
    const auto a = r.vae.parameters(), b = fresh.parameters();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i]->value == b[i]->value);
  }
  SUBCASE("deterministic and accounted") {
    AdversarialResult a = train_adversarial(in, c, 1);
    AdversarialResult b = train_adversarial(in, c, 1);
    CHECK(a.steps == 2 * ((40 + c.adversarial_batch - 1) / c.adversarial_batch));
    CHECK(a.vae_loss == b.vae_loss);
    CHECK(a.disc_loss == b.disc_loss);
    const DiscriminatorScores s = score_pools(a, in);
    CHECK(s.labeled.size() == 12);
    CHECK(s.unlabeled.size() == 40);
    CHECK(s.accuracy >= 0.0);
    CHECK(s.accuracy <= 1.0);
  }
  SUBCASE("empty pool") {
    in.unlabeled = Tensor::matrix(0, 2);
    in.unlabeled_predicted.clear();
    CHECK_THROWS_AS(train_adversarial(in, c, 1), Error);
  }
}

TEST_CASE("stage learning rate schedule") {
  CHECK(stage_learning_rate(0.1, 0, 10) == 0.1);
  CHECK(stage_learning_rate(0.1, 6, 10) == 0.1);
  CHECK(stage_learning_rate(0.1, 7, 10) == doctest::Approx(0.01));
  CHECK(stage_learning_rate(0.1, 9, 10) == doctest::Approx(0.001));
}

TEST_CASE("target training per strategy") {
  const ExperimentConfig base = small_config("ssvaal");
  const ExperimentData data = prepare_data(base);
  PoolState pool(data.pool.labels, 20, 0);
  LstmSorter sorter = tiny_sorter();

  SUBCASE("ranking-only skips pseudo labels") {
    TargetCycleResult r = train_target_cycle(data.pool, pool, base, StrategyKind::ranking_only, &sorter, 1);
    CHECK(r.pseudo.empty());
    CHECK(r.epoch_loss.size() == base.supervised_epochs + base.semi_epochs);
  }
  SUBCASE("plain pseudo labels are the thresholded argmax") {
    TargetCycleResult r = train_target_cycle(data.pool, pool, base, StrategyKind::plain_pl, nullptr, 1);
    REQUIRE(r.pseudo.size() == pool.unlabeled().size());
    for (const auto& rec : r.pseudo) CHECK(rec.final_label == rec.initial);
  }
  SUBCASE("agreement labels satisfy the subset property") {
    TargetCycleResult r = train_target_cycle(data.pool, pool, base, StrategyKind::capl_only, nullptr, 1);
    for (const auto& rec : r.pseudo) {
      if (rec.final_label) {
        CHECK(rec.initial == rec.final_label);
        CHECK(rec.clustering == rec.final_label);
        CHECK(rec.max_probability > base.tau);
      }
    }
  }
  SUBCASE("a ranking strategy without a sorter is rejected") {
    CHECK_THROWS_AS(train_target_cycle(data.pool, pool, base, StrategyKind::ssvaal, nullptr, 1), Error);
  }
  SUBCASE("same inputs give bit-identical models") {
    TargetCycleResult a = train_target_cycle(data.pool, pool, base, StrategyKind::ssvaal, &sorter, 2);
    TargetCycleResult b = train_target_cycle(data.pool, pool, base, StrategyKind::ssvaal, &sorter, 2);
    const auto pa = a.model.parameters(), pb = b.model.parameters();
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i]->value == pb[i]->value);
  }
}

TEST_CASE("classifier learns separable blobs") {
  ExperimentConfig c = small_config("random");
  c.dataset.kind = DatasetKind::blobs;
  c.dataset.classes = 2;
  c.dataset.sigma = 0.5;
  c.supervised_epochs = 40;
  const ExperimentData data = prepare_data(c);
  PoolState pool(data.pool.labels, 20, 0);
  TargetCycleResult r = train_target_cycle(data.pool, pool, c, StrategyKind::random, nullptr, 1);
  const Dataset train = subset(data.pool, pool.labeled());
  CHECK(accuracy(r.model, train) > 0.95);
  CHECK(accuracy(r.model, data.test) > 0.9);
}

TEST_CASE("blobs accuracy after one cycle beats the majority class") {
  ExperimentConfig c = small_config("random");
  c.dataset.kind = DatasetKind::blobs;
  c.dataset.n = 600;
  c.dataset.classes = 4;
  const ExperimentData data = prepare_data(c);
  PoolState pool(data.pool.labels, 20, 0);
  TargetCycleResult r = train_target_cycle(data.pool, pool, c, StrategyKind::random, nullptr, 1);
  std::vector<std::size_t> counts(4, 0);
  for (int l : data.test.labels) ++counts[l];
  const double majority =
      static_cast<double>(*std::max_element(counts.begin(), counts.end())) / static_cast<double>(data.test.size());
  CHECK(accuracy(r.model, data.test) > majority);
}

TEST_CASE("the loss head tracks true losses after ranking training") {
  SorterTrainConfig sc;
  sc.length = 8;
  sc.hidden = 32;
  sc.epochs = 30;
  sc.vectors_per_epoch = 256;
  sc.heldout = 100;
  sc.learning_rate = 5e-3;
  PretrainedSorter sorter = pretrain_sorter(sc);
  INFO("sorter held-out spearman " << sorter.report.heldout_spearman);
  REQUIRE(sorter.report.heldout_spearman > 0.7);

  ExperimentConfig c = small_config("ssvaal-ranking-only");
  c.dataset.kind = DatasetKind::blobs;
  c.dataset.n = 800;
  c.dataset.classes = 4;
  c.sorter_length = 8;
  c.supervised_epochs = 40;
  c.semi_epochs = 0;
  c.hidden_widths = {32, 32};
  const ExperimentData data = prepare_data(c);
  PoolState pool(data.pool.labels, 100, 0);
  TargetCycleResult r = train_target_cycle(data.pool, pool, c, StrategyKind::ranking_only, &sorter.sorter, 1);
  const ModelOutputs o = model_outputs(r.model, data.test.features);
  const std::vector<double> truth = per_sample_loss(r.model, data.test.features, data.test.labels);
  const double rho = spearman(o.predicted_loss, truth);
  INFO("held-out spearman of predicted vs true loss " << rho);
  CHECK(rho > 0.3);
}

TEST_CASE("experiment accounting") {
  ExperimentConfig c = small_config("random");
  c.initial_labeled = 20;
  c.budget = 20;
  c.cycles = 5;
  c.supervised_epochs = 3;
  c.semi_epochs = 1;
  std::vector<std::size_t> sizes;
  RunHooks hooks;
  hooks.after_cycle = [&](const PoolState& pool, const CycleMetrics&) {
    pool.check_invariants();
    sizes.push_back(pool.labeled().size());
  };
  const ExperimentResult r = run_experiment(c, nullptr, hooks);
  CHECK(sizes == std::vector<std::size_t>{40, 60, 80, 100, 120});
  CHECK(r.pool.labeled().size() == 120);
  REQUIRE(r.cycles.size() == 5);
  for (std::size_t t = 0; t < 5; ++t) {
    CHECK(r.cycles[t].row.cycle == t + 1);
    CHECK(r.cycles[t].row.labeled_count == 20 + 20 * t);
    CHECK(std::isnan(r.cycles[t].row.disc_acc));
    CHECK(r.cycles[t].row.seconds == 0.0);
  }

  SUBCASE("capped by the pool") {
    c.dataset.n = 100;
    c.budget = 30;
    const ExperimentResult capped = run_experiment(c, nullptr);
    CHECK(capped.pool.labeled().size() == 80);
    CHECK(capped.pool.unlabeled().empty());
  }
  SUBCASE("determinism") {
    const ExperimentResult again = run_experiment(c, nullptr);
    for (std::size_t t = 0; t < 5; ++t) {
      CHECK(same_record(again.cycles[t].row, r.cycles[t].row));
      CHECK(again.cycles[t].selected == r.cycles[t].selected);
    }
  }
}

TEST_CASE("ssvaal runs end to end with a sorter") {
  ExperimentConfig c = small_config("ssvaal");
  c.cycles = 2;
  LstmSorter sorter = tiny_sorter();
  const ExperimentResult r = run_experiment(c, &sorter);
  REQUIRE(r.cycles.size() == 2);
  CHECK(r.cycles[0].selected.size() == 10);
  CHECK_FALSE(std::isnan(r.cycles[0].row.disc_acc));
  CHECK_FALSE(std::isnan(r.cycles[0].row.vae_loss));
  CHECK(r.pool.labeled().size() == 30);
}

TEST_CASE("experiment validation lists every problem") {
  ExperimentConfig c = small_config("ssvaal");
  c.budget = 0;
  c.tau = 2.0;
  try {
    validate_experiment(c, false);
    FAIL("expected a config error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(e.kind() == ErrorKind::config);
    CHECK(msg.find("budget") != std::string::npos);
    CHECK(msg.find("tau") != std::string::npos);
    CHECK(msg.find("sorter") != std::string::npos);
  }
  c = small_config("nonsense");
  CHECK_THROWS_AS(validate_experiment(c, true), Error);
  c = small_config("ssvaal");
  c.lambda = 0.0;
  CHECK_NOTHROW(validate_experiment(c, false));
  CHECK_FALSE(needs_sorter(c));
}
