#include <cmath>
#include <doctest.h>

#include "ecotab/estimators.hpp"
#include "ecotab/simulate.hpp"
#include "helpers.hpp"

using namespace ecotab;
using ecotab::testing::random_margins;

namespace {

// Noiseless design: quarter-valued truth and row totals in multiples of 4,
// so every unit's column totals are exact integers.
const CondProbMatrix kQuarterPi(3, 3,
                                {0.50, 0.25, 0.25, 0.25, 0.50, 0.25, 0.25, 0.25, 0.50});

EIDataset noiseless_dataset() {
  std::vector<MarginPair> units;
  units.emplace_back(std::vector<int>{4, 8, 4}, std::vector<int>{5, 6, 5});
  units.emplace_back(std::vector<int>{8, 4, 4}, std::vector<int>{6, 5, 5});
  units.emplace_back(std::vector<int>{4, 4, 8}, std::vector<int>{5, 5, 6});
  units.emplace_back(std::vector<int>{8, 8, 8}, std::vector<int>{8, 8, 8});
  return EIDataset(std::move(units));
}

EIDataset simulated_dataset(std::uint64_t seed, int s = 60, int n = 40) {
  const SimulationResult sim = simulate_units(SimulationConfig{s, n, builtin_truth_pi(), seed});
  return EIDataset(sim.units.units);
}

}  // namespace

TEST_CASE("regression recovers the truth from noiseless shares") {
  const GoodmanResult g = goodman(noiseless_dataset());
  CHECK(g.clipped_cells == 0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(g.raw[static_cast<std::size_t>(i) * 3 + j] - kQuarterPi.at(i, j)) < 1e-10);
      CHECK(std::abs(g.repaired.at(i, j) - kQuarterPi.at(i, j)) < 1e-8);
    }
  }
}

TEST_CASE("with one pure unit per row category the regression copies the column shares") {
  Eigen::MatrixXd u = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd v(3, 3);
  v << 0.5, 0.3, 0.2, 0.1, 0.6, 0.3, 0.2, 0.2, 0.6;
  const Eigen::MatrixXd raw = goodman_raw(u, v);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(raw(i, j) == doctest::Approx(v(i, j)).epsilon(1e-12));
  }
}

TEST_CASE("regression raw estimates ignore unit replication") {
  const EIDataset once = noiseless_dataset();
  std::vector<MarginPair> tripled;
  for (int rep = 0; rep < 3; ++rep) {
    for (const auto& u : once.units()) tripled.push_back(u);
  }
  const GoodmanResult a = goodman(once);
  const GoodmanResult b = goodman(EIDataset(std::move(tripled)));
  for (std::size_t k = 0; k < a.raw.size(); ++k) CHECK(a.raw[k] == doctest::Approx(b.raw[k]).epsilon(1e-12));
}

TEST_CASE("regression preconditions are enforced") {
  // two units cannot identify three row categories
  std::vector<MarginPair> units;
  units.emplace_back(std::vector<int>{4, 8, 4}, std::vector<int>{5, 6, 5});
  units.emplace_back(std::vector<int>{8, 4, 4}, std::vector<int>{6, 5, 5});
  CHECK_THROWS_AS(goodman(EIDataset(units)), IdentificationError);
  // three copies of one unit are rank deficient
  std::vector<MarginPair> same(3, MarginPair({4, 8, 4}, {5, 6, 5}));
  CHECK_THROWS_AS(goodman(EIDataset(same)), IdentificationError);
}

TEST_CASE("proportional fitting leaves matched tables alone") {
  const MarginPair target({3, 1}, {2, 2});
  const std::vector<double> matched{1.5, 1.5, 0.5, 0.5};
  const auto out = ipf_adjust(matched, target);
  for (std::size_t k = 0; k < 4; ++k) CHECK(out[k] == doctest::Approx(matched[k]).epsilon(1e-12));

  // the proportional-fit table is its own fixed point
  const MarginPair m({6, 4}, {5, 5});
  std::vector<double> outer(4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      outer[static_cast<std::size_t>(i) * 2 + j] =
          static_cast<double>(m.row_total(i)) * m.col_total(j) / m.total();
    }
  }
  const auto fixed = ipf_adjust(outer, m);
  for (std::size_t k = 0; k < 4; ++k) CHECK(fixed[k] == doctest::Approx(outer[k]).epsilon(1e-10));
}

TEST_CASE("proportional fitting rescales a flat table in one sweep") {
  const auto out = ipf_adjust(std::vector<double>{1, 1, 1, 1}, MarginPair({3, 1}, {2, 2}));
  CHECK(out[0] == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(out[1] == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(out[2] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(out[3] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("proportional fitting matches margins and keeps cross ratios") {
  Rng rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    const MarginPair target = random_margins(rng, 3, 3, 30);
    std::vector<double> joint(9);
    for (double& v : joint) v = 0.2 + rng.uniform() * 3.0;
    const auto out = ipf_adjust(joint, target);
    for (int i = 0; i < 3; ++i) {
      double s = 0.0;
      for (int j = 0; j < 3; ++j) s += out[static_cast<std::size_t>(i) * 3 + j];
      CHECK(std::abs(s - target.row_total(i)) < 1e-10);
    }
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i) s += out[static_cast<std::size_t>(i) * 3 + j];
      CHECK(std::abs(s - target.col_total(j)) < 1e-10);
    }
    auto cross = [](const std::vector<double>& t, int i, int j, int k, int l) {
      return std::log(t[static_cast<std::size_t>(i) * 3 + j]) + std::log(t[static_cast<std::size_t>(k) * 3 + l]) -
             std::log(t[static_cast<std::size_t>(i) * 3 + l]) - std::log(t[static_cast<std::size_t>(k) * 3 + j]);
    };
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        CHECK(cross(joint, i, j, i + 1, j + 1) ==
              doctest::Approx(cross(out, i, j, i + 1, j + 1)).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("proportional fitting rejects nonpositive cells") {
  CHECK_THROWS_AS(ipf_adjust(std::vector<double>{1, 0, 1, 2}, MarginPair({2, 2}, {2, 2})),
                  InputError);
}

TEST_CASE("identical units are fitted by independence at once") {
  std::vector<MarginPair> units(3, MarginPair({2, 2}, {2, 2}));
  const FitResult fit = fisher_scoring(EIDataset(std::move(units)));
  CHECK(fit.converged);
  CHECK(fit.score_norm < 1e-6);
  CHECK(fit.iterations == 0);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) CHECK(fit.probs.at(i, j) == doctest::Approx(0.5).epsilon(1e-10));
  }
}

TEST_CASE("scoring requires enough units for the parameter count") {
  CHECK_THROWS_AS(fisher_scoring(simulated_dataset(3, 5)), IdentificationError);
}

TEST_CASE("scoring recovers the generating matrix from simulated margins") {
  const EIDataset data = simulated_dataset(1);
  const FitResult fit = fisher_scoring(data);
  CHECK(fit.converged);
  CHECK(fit.score_norm < 1e-5);
  const double me_ml = metric_me(fit.probs, builtin_truth_pi());
  CHECK(me_ml < 0.08);

  const GoodmanResult g = goodman(data);
  CHECK(metric_me(g.repaired, builtin_truth_pi()) < 0.10);

  // likelihood never decreases along the accepted iterations
  for (std::size_t k = 1; k < fit.trace.size(); ++k) {
    CHECK(fit.trace[k].loglik >= fit.trace[k - 1].loglik - 1e-9);
  }
  // the fit beats its own start and independence
  CHECK(fit.loglik >= independence_fit(data).loglik);
}

TEST_CASE("duplicating every unit does not move the maximizer") {
  const EIDataset once = simulated_dataset(9, 8, 30);
  std::vector<MarginPair> doubled;
  for (int rep = 0; rep < 2; ++rep) {
    for (const auto& u : once.units()) doubled.push_back(u);
  }
  const FitResult a = fisher_scoring(once);
  const FitResult b = fisher_scoring(EIDataset(std::move(doubled)));
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(a.probs.at(i, j) - b.probs.at(i, j)) < 1e-6);
    }
  }
}

TEST_CASE("the independence fit uses the aggregate column shares") {
  const EIDataset data({MarginPair({8, 20, 12}, {12, 7, 21})});
  const FitResult fit = independence_fit(data);
  for (int i = 0; i < 3; ++i) {
    CHECK(fit.probs.at(i, 0) == doctest::Approx(0.300).epsilon(1e-12));
    CHECK(fit.probs.at(i, 1) == doctest::Approx(0.175).epsilon(1e-12));
    CHECK(fit.probs.at(i, 2) == doctest::Approx(0.525).epsilon(1e-12));
  }
  // a single unit at independence is a stationary point
  CHECK(fit.converged);
  CHECK(fit.score_norm < 1e-8);

  std::vector<MarginPair> uniform(2, MarginPair({2, 2}, {2, 2}));
  const FitResult flat = independence_fit(EIDataset(std::move(uniform)));
  CHECK(flat.probs.at(0, 0) == doctest::Approx(0.5));
  CHECK(flat.probs.at(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("the accuracy metric is zero only at the truth") {
  const CondProbMatrix truth = builtin_truth_pi();
  CHECK(metric_me(truth, truth) == 0.0);

  std::vector<double> shifted = truth.values();
  shifted[1] += 0.1;
  shifted[2] -= 0.1;
  const double expected = std::sqrt(0.02 / 9.0);
  CHECK(metric_me(CondProbMatrix(3, 3, shifted), truth) ==
        doctest::Approx(expected).epsilon(1e-12));

  // shared and per-unit forms agree for replicated estimates
  const CondProbMatrix est(3, 3, shifted);
  const std::vector<CondProbMatrix> per_unit(7, est);
  CHECK(metric_me(per_unit, truth) == doctest::Approx(metric_me(est, truth)).epsilon(1e-12));
}

TEST_CASE("the accuracy metric is invariant to joint relabeling") {
  Rng rng(21);
  const CondProbMatrix truth = builtin_truth_pi();
  std::vector<double> est(9);
  for (int i = 0; i < 3; ++i) {
    const auto row = rng.dirichlet_flat(3);
    for (int j = 0; j < 3; ++j) est[static_cast<std::size_t>(i) * 3 + j] = row[static_cast<std::size_t>(j)];
  }
  const CondProbMatrix e(3, 3, est);
  const double base = metric_me(e, truth);
  const int pr[3] = {2, 0, 1};
  const int pc[3] = {1, 2, 0};
  std::vector<double> e2(9);
  std::vector<double> t2(9);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      e2[static_cast<std::size_t>(pr[i]) * 3 + pc[j]] = e.at(i, j);
      t2[static_cast<std::size_t>(pr[i]) * 3 + pc[j]] = truth.at(i, j);
    }
  }
  CHECK(metric_me(CondProbMatrix(3, 3, e2), CondProbMatrix(3, 3, t2)) ==
        doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("the inconsistency metric separates the large extreme fixtures") {
  const MarginPair margins({33193, 33406, 33401}, {33318, 33233, 33449});
  const FreqTable z1(margins, {33193, 0, 0, 125, 33233, 48, 0, 0, 33401});
  const FreqTable z2(margins, {0, 0, 33193, 173, 33233, 0, 33145, 0, 256});
  const FreqTable z3(margins, {33193, 0, 0, 125, 0, 33281, 0, 33233, 168});
  const CondProbMatrix truth = builtin_truth_pi();

  const double m1 = metric_m(z1, truth);
  CHECK(m1 == doctest::Approx(0.368).epsilon(0.003));
  CHECK(std::abs(m1 - 0.368) < 0.001);
  CHECK(metric_m(z2, truth) > m1);
  CHECK(metric_m(z3, truth) > m1);

  // the first fixture is the identity-permutation extreme table
  const ExtremeTable built = build_extreme(margins, PermutationPair::identity(3, 3));
  CHECK(built.table.entries() == z1.entries());
  CHECK(metric_m(built, truth) == m1);

  // a table whose conditional rows equal the truth scores zero
  const MarginPair small({10, 10}, {8, 12});
  const FreqTable exact(small, {4, 6, 4, 6});
  const CondProbMatrix rows(2, 2, {0.4, 0.6, 0.4, 0.6});
  CHECK(metric_m(exact, rows) == 0.0);
}
