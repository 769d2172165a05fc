#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "distort/distortion.hpp"
#include "distort/distribution.hpp"
#include "distort/errors.hpp"
#include "distort/joint.hpp"
#include "distort/measures.hpp"
#include "doctest.h"

using namespace distort;

namespace {

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

Distribution retained_loss() {
  return Distribution::discrete({0.0, 100.0, 500.0}, {0.6, 0.375, 0.025});
}

Distribution capped_loss() {
  return Distribution::discrete({0.0, 100.0, 1100.0}, {0.6, 0.39, 0.01});
}

std::vector<DistortionFn> concave_pool() {
  return {tvar_distortion(0.9), wang_distortion(0.8),
          dual_power_distortion(2.0), power_distortion(0.5)};
}

}  // namespace

TEST_CASE("choquet integral of discrete losses is exact") {
  Distribution x = retained_loss();
  Distribution y = capped_loss();

  MeasureReport mean_x = choquet(identity_distortion(), x);
  CHECK(near(mean_x.value, 50.0, 1e-12));
  CHECK(mean_x.method == "exact_stieltjes");
  CHECK(mean_x.abs_error_estimate == 0.0);

  CHECK(near(choquet(identity_distortion(), y).value, 50.0, 1e-12));
  CHECK(near(choquet(tvar_distortion(0.95), x).value, 300.0, 1e-12));
  CHECK(near(choquet(tvar_distortion(0.95), y).value, 300.0, 1e-12));
  CHECK(near(choquet(tvar_distortion(0.96), x).value, 350.0, 1e-12));
  CHECK(near(choquet(tvar_distortion(0.96), y).value, 350.0, 1e-12));
  CHECK(near(choquet(var_distortion(0.95), x).value, 100.0, 1e-12));

  // Iterating the tail reshaping twice pushes all mass to the extreme atom.
  DistortionFn twice = compose(tvar_distortion(0.95), tvar_distortion(0.95));
  CHECK(near(choquet(twice, x).value, 500.0, 1e-10));
  CHECK(near(choquet(twice, y).value, 1100.0, 1e-10));
}

TEST_CASE("choquet integral of parametric losses") {
  CHECK(near(choquet(tvar_distortion(0.95), Distribution::uniform(0.0, 1.0))
                 .value,
             0.975, 1e-10));
  // Expected shortfall of the standard normal at 95%.
  MeasureReport es =
      choquet(tvar_distortion(0.95), Distribution::normal(0.0, 1.0));
  CHECK(near(es.value, 2.0627128075074256, 1e-6));
  // Two-sided integral: the identity recovers a signed mean.
  CHECK(near(choquet(identity_distortion(), Distribution::normal(0.0, 1.0))
                 .value,
             0.0, 1e-8));
  CHECK(near(choquet(identity_distortion(), Distribution::pareto(2.0, 1.0))
                 .value,
             2.0, 1e-8));
}

TEST_CASE("survival and quantile forms of the integral agree") {
  std::vector<DistortionFn> gs = {
      var_distortion(0.9),
      tvar_distortion(0.95),
      glue_distortion(0.5, 0.8, 0.95, 0.99),
      power_distortion(0.5),
      dual_power_distortion(3.0),
      wang_distortion(0.8),
      compose(power_distortion(0.5), tvar_distortion(0.9)),
      esssup_combo(0.3, tvar_distortion(0.9))};
  std::vector<Distribution> ds = {
      retained_loss(),
      capped_loss(),
      Distribution::uniform(0.0, 1.0),
      Distribution::discrete({-20.0, -5.0, 3.0, 40.0},
                             {0.25, 0.25, 0.25, 0.25})};
  for (const auto& g : gs) {
    for (const auto& d : ds) {
      MeasureReport a = choquet(g, d);
      MeasureReport b = choquet_quantile_form(g, d);
      double tol = a.abs_error_estimate + b.abs_error_estimate + 1e-9;
      CHECK(near(a.value, b.value, tol));
    }
  }
  // Smooth parametric cross-check.
  MeasureReport a = choquet(wang_distortion(0.8), Distribution::exponential(1.0));
  MeasureReport b = choquet_quantile_form(wang_distortion(0.8),
                                          Distribution::exponential(1.0));
  CHECK(near(a.value, b.value, a.abs_error_estimate + b.abs_error_estimate + 1e-7));
}

TEST_CASE("quantile-based risk measures on the worked losses") {
  Distribution x = retained_loss();
  CHECK(var(x, 0.95) == 100.0);
  CHECK(var(x, 0.975) == 100.0);
  CHECK(var_plus(x, 0.975) == 500.0);
  CHECK(var_plus(x, 0.6) == 100.0);
  CHECK(var(x, 0.6) == 0.0);
  CHECK(near(tvar(x, 0.95), 300.0, 1e-12));
  CHECK(near(tvar(x, 0.96), 350.0, 1e-12));
  // Conditioning beyond the quantile concentrates on the top atom.
  CHECK(near(cte(x, 0.95), 500.0, 1e-12));
  CHECK_THROWS_AS((void)cte(Distribution::discrete({5.0}, {1.0}), 0.5),
                  std::domain_error);
  CHECK_THROWS_AS((void)var(x, 0.0), std::domain_error);
  CHECK_THROWS_AS((void)var_plus(x, 1.0), std::domain_error);
  // tvar == choquet with the tail distortion, everywhere.
  for (double p : {0.5, 0.9, 0.99})
    CHECK(near(tvar(x, p), choquet(tvar_distortion(p), x).value, 1e-10));
}

TEST_CASE("integrals against explicit quantile weights") {
  Distribution x = retained_loss();
  SpectralWeight tail;
  tail.density = [](double w) { return w > 0.95 ? 20.0 : 0.0; };
  tail.breakpoints = {0.95};
  CHECK(near(spectral(tail, x).value, 300.0, 1e-9));

  SpectralWeight point;
  point.atoms = {{0.95, 1.0}};
  CHECK(near(spectral(point, x).value, 100.0, 1e-12));

  SpectralWeight flat;
  flat.density = [](double) { return 1.0; };
  CHECK(near(spectral(flat, x).value, 50.0, 1e-9));

  SpectralWeight bad;
  bad.density = [](double) { return 0.5; };
  CHECK_THROWS_AS((void)spectral(bad, x), std::domain_error);
}

TEST_CASE("tail-expectation mixtures evaluate level by level") {
  Distribution x = retained_loss();
  TVaRMixingMeasure two;
  two.atoms = {{0.95, 0.5}, {0.96, 0.5}};
  CHECK(near(weighted_tvar(two, x).value, 325.0, 1e-10));

  TVaRMixingMeasure mean_only;
  mean_only.atoms = {{0.0, 1.0}};
  CHECK(near(weighted_tvar(mean_only, x).value, 50.0, 1e-12));

  TVaRMixingMeasure sup_only;
  sup_only.atoms = {{1.0, 1.0}};
  CHECK(near(weighted_tvar(sup_only, x).value, 500.0, 1e-12));
  CHECK_THROWS_AS((void)weighted_tvar(sup_only, Distribution::pareto(2.0, 1.0)),
                  divergence_error);

  TVaRMixingMeasure short_mass;
  short_mass.atoms = {{0.5, 0.25}};
  CHECK_THROWS_AS((void)weighted_tvar(short_mass, x), std::domain_error);
}

TEST_CASE("concave distortions decompose into tail-expectation mixtures") {
  // The identity is the mean: all mass at level zero.
  TVaRMixingMeasure id = decompose_concave(identity_distortion());
  REQUIRE(id.atoms.size() >= 1);
  CHECK(id.atoms[0].first == 0.0);
  CHECK(near(id.atoms[0].second, 1.0, 1e-9));

  // A tail-expectation distortion concentrates at its own level: all mass in
  // the grid cell containing it. The level is only resolved to half a cell,
  // so the round trip tightens as the grid refines.
  Distribution x = retained_loss();
  TVaRMixingMeasure tv = decompose_concave(tvar_distortion(0.9));
  REQUIRE(tv.atoms.size() == 1);
  CHECK(near(tv.atoms[0].first, 0.9, 1e-4));
  CHECK(near(tv.atoms[0].second, 1.0, 1e-10));
  TVaRMixingMeasure tv_fine = decompose_concave(tvar_distortion(0.9), 200000);
  CHECK(near(weighted_tvar(tv_fine, x).value,
             choquet(tvar_distortion(0.9), x).value, 5e-3));

  for (double b : {1.5, 2.0, 3.0, 5.0}) {
    TVaRMixingMeasure m = decompose_concave(dual_power_distortion(b));
    for (const auto& [d_label, d] :
         std::vector<std::pair<const char*, Distribution>>{
             {"discrete", x}, {"uniform", Distribution::uniform(0.0, 1.0)}}) {
      (void)d_label;
      CHECK(near(weighted_tvar(m, d).value,
                 choquet(dual_power_distortion(b), d).value, 1e-4));
    }
  }
  // No atom at zero when g'(1) = 0.
  TVaRMixingMeasure dp = decompose_concave(dual_power_distortion(2.0));
  for (const auto& [level, mass] : dp.atoms)
    if (level == 0.0) CHECK(mass <= 1e-9);

  CHECK_THROWS_AS((void)decompose_concave(power_distortion(2.0)),
                  std::domain_error);
  CHECK_THROWS_AS((void)decompose_concave(var_distortion(0.9)),
                  std::domain_error);
}

TEST_CASE("four-term quantile combination") {
  Distribution x = retained_loss();
  CHECK(near(glue_var(0.0, 0.0, 0.0, 1.0, 0.95, 0.99, x).value, 100.0, 1e-12));
  CHECK(near(glue_var(1.0, 0.0, 0.0, 0.0, 0.95, 0.96, x).value, 350.0, 1e-10));
  // Equal weights across the four terms at (alpha,beta) = (0.95,0.96).
  CHECK(near(glue_var(0.25, 0.25, 0.25, 0.25, 0.95, 0.96, x).value, 212.5,
             1e-10));
  CHECK(near(glue_var(0.25, 0.25, 0.25, 0.25, 0.95, 0.96, capped_loss()).value,
             212.5, 1e-10));
  CHECK_THROWS_AS((void)glue_var(0.5, 0.5, 0.5, -0.5, 0.95, 0.99, x),
                  std::domain_error);
  CHECK_THROWS_AS((void)glue_var(0.25, 0.25, 0.25, 0.25, 0.99, 0.95, x),
                  std::domain_error);

  // Consistency with the distortion form through the mixture weights.
  GlueWeights w = glue_mixture_weights(0.5, 0.8, 0.95, 0.99);
  double via_weights = glue_var(w.w_tvar_beta, w.w_tvar_alpha, 0.0,
                                w.w_var_alpha, 0.95, 0.99, x)
                           .value;
  double via_distortion =
      choquet(glue_distortion(0.5, 0.8, 0.95, 0.99), x).value;
  CHECK(near(via_weights, via_distortion, 1e-9));
}

TEST_CASE("worst-case blends average the measure with the supremum") {
  Distribution x = retained_loss();
  double base = choquet(tvar_distortion(0.9), x).value;
  CHECK(near(base, 200.0, 1e-12));
  double blended = choquet(esssup_combo(0.5, tvar_distortion(0.9)), x).value;
  CHECK(near(blended, 0.5 * 500.0 + 0.5 * base, 1e-10));
  CHECK_THROWS_AS(
      (void)choquet(esssup_combo(0.5, tvar_distortion(0.9)),
                    Distribution::pareto(3.0, 1.0)),
      divergence_error);
}

TEST_CASE("unbounded distorted tails are reported as divergent") {
  CHECK_THROWS_AS(
      (void)choquet(tvar_distortion(0.95), Distribution::pareto(1.0, 1.0)),
      divergence_error);
  CHECK_THROWS_AS(
      (void)choquet(power_distortion(0.5), Distribution::pareto(2.0, 1.0)),
      divergence_error);
  // The undistorted integral converges fine.
  CHECK(near(choquet(identity_distortion(), Distribution::pareto(2.0, 1.0))
                 .value,
             2.0, 1e-8));
}

TEST_CASE("tail thresholds are lower quantiles") {
  Distribution x = retained_loss();
  CHECK(tail_threshold(x, 0.95) == 100.0);
  CHECK(tail_threshold(x, 0.99) == 500.0);
  CHECK(near(tail_threshold(Distribution::uniform(0.0, 1.0), 0.9), 0.9,
             1e-12));
  CHECK_THROWS_AS((void)tail_threshold(x, 0.0), std::domain_error);
}

TEST_CASE("tail-restricted integral with an explicit cutoff") {
  Distribution x = retained_loss();
  DistortionFn g = tvar_distortion(0.95);
  // Below the support the restriction is the whole integral.
  CHECK(near(tail_choquet(g, x, -5.0), choquet(g, x).value, 1e-10));
  CHECK(near(tail_choquet(g, x, 0.0), choquet(g, x).value, 1e-10));
  // At or past the essential supremum nothing remains.
  CHECK(tail_choquet(g, x, 500.0) == 0.0);
  CHECK(tail_choquet(g, x, 700.0) == 0.0);
  // Only the slab above the cutoff contributes: g(0.025)*400.
  CHECK(near(tail_choquet(g, x, 100.0), 200.0, 1e-10));
  double err = -1.0;
  (void)tail_choquet(g, x, 100.0, &err);
  CHECK(err == 0.0);
}

TEST_CASE("tail comparison is exactly additive for comonotone risks") {
  JointModel j = JointModel::comonotone({retained_loss(), capped_loss()});
  for (const auto& g :
       {tvar_distortion(0.9), glue_distortion(0.3, 0.5, 0.9, 0.95),
        wang_distortion(0.8), var_distortion(0.9)}) {
    SubaddReport r = tail_subadditivity_check(g, j, 0.9);
    CHECK(r.verdict == SubaddVerdict::holds);
    CHECK(near(r.lhs, r.rhs, 1e-9));
    CHECK_FALSE(r.used_monte_carlo);
  }
}

TEST_CASE("tail comparison verdicts across dependence structures") {
  // Independent heavy-at-zero pair: the joint tail event is empty at 0.97
  // because every threshold is the top atom.
  Distribution spike = Distribution::discrete({0.0, 1000.0}, {0.96, 0.04});
  JointModel indep = JointModel::independent({spike, spike});
  SubaddReport empty = tail_subadditivity_check(tvar_distortion(0.97), indep,
                                                0.97);
  CHECK(empty.verdict == SubaddVerdict::inapplicable);
  CHECK(empty.s_x == 1000.0);
  CHECK(empty.s_sum == 1000.0);

  // Negative dependence with a genuinely occupied tail event.
  JointModel neg = JointModel::joint_pmf({{12.0, 12.0, 0.01},
                                          {10.0, 0.0, 0.275},
                                          {0.0, 10.0, 0.275},
                                          {0.0, 0.0, 0.44}});
  SubaddReport r = tail_subadditivity_check(tvar_distortion(0.75), neg, 0.75);
  CHECK(r.verdict == SubaddVerdict::holds);
  CHECK(near(r.lhs, 0.96, 1e-12));
  CHECK(near(r.rhs, 0.96, 1e-12));
  CHECK(r.s_x == 10.0);
  CHECK(r.s_y == 10.0);
  CHECK(r.s_sum == 10.0);
  CHECK(r.m_alpha == 10.0);

  // Independent coupling of the worked losses holds as well.
  JointModel ind2 = JointModel::independent({retained_loss(), capped_loss()});
  for (const auto& g :
       {tvar_distortion(0.9), glue_distortion(0.3, 0.5, 0.9, 0.95)}) {
    SubaddReport ok = tail_subadditivity_check(g, ind2, 0.9);
    CHECK(ok.verdict == SubaddVerdict::holds);
    CHECK(ok.lhs <= ok.rhs + 1e-9);
  }
}

TEST_CASE("tail comparison boundary: event mass exactly 1-alpha plus a jump") {
  // P(Q) equals 1-alpha exactly while the distortion jumps at exactly
  // 1-alpha; the sufficient condition needs concavity on the closed
  // interval, so the inequality is allowed to fail and does.
  JointModel j = JointModel::joint_pmf({{0.0, 0.0, 0.9},
                                        {10.0, 2.0, 0.04},
                                        {4.0, 8.0, 0.03},
                                        {12.0, 11.0, 0.03}});
  DistortionFn g = glue_distortion(0.3, 0.6, 0.9, 0.95);
  SubaddReport r = tail_subadditivity_check(g, j, 0.9);
  CHECK(r.verdict == SubaddVerdict::fails);
  CHECK(near(r.lhs, 13.98, 1e-9));
  CHECK(near(r.rhs, 11.58, 1e-9));
}

TEST_CASE("tail comparison through sampling when no exact cells exist") {
  JointModel j = JointModel::copula_coupled(Distribution::uniform(0.0, 1.0),
                                            Distribution::uniform(0.0, 1.0),
                                            Copula::clayton(2.0));
  CHECK_THROWS_AS((void)tail_subadditivity_check(tvar_distortion(0.95), j,
                                                 0.95),
                  unsupported_error);

  SubaddReport r =
      tail_subadditivity_check(tvar_distortion(0.95), j, 0.95, 40000, 7u);
  CHECK(r.used_monte_carlo);
  // The empirical law is itself a finite joint model, so the restricted
  // comparison holds deterministically whenever the event is occupied.
  CHECK(r.verdict == SubaddVerdict::holds);
  SubaddReport again =
      tail_subadditivity_check(tvar_distortion(0.95), j, 0.95, 40000, 7u);
  CHECK(r.lhs == again.lhs);
  CHECK(r.rhs == again.rhs);

  CHECK(verdict_text(SubaddVerdict::holds) == "holds");
  CHECK(verdict_text(SubaddVerdict::fails) == "fails");
  CHECK(verdict_text(SubaddVerdict::inapplicable) == "inapplicable");
}

TEST_CASE("pointwise-dominated distortions give dominated measures") {
  std::vector<Distribution> pool = {retained_loss(), capped_loss(),
                                    Distribution::uniform(0.0, 1.0),
                                    Distribution::exponential(1.0)};
  for (const auto& d : pool) {
    CHECK(choquet(var_distortion(0.9), d).value <=
          choquet(tvar_distortion(0.9), d).value + 1e-9);
    CHECK(choquet(power_distortion(2.0), d).value <=
          choquet(power_distortion(0.5), d).value + 1e-9);
    double base = choquet(tvar_distortion(0.9), d).value;
    if (d.bounded_above())
      CHECK(base <=
            choquet(esssup_combo(0.4, tvar_distortion(0.9)), d).value + 1e-9);
  }
}

TEST_CASE("concavity against the mean, translation, and scaling") {
  std::vector<Distribution> pool = {retained_loss(),
                                    Distribution::uniform(0.0, 1.0),
                                    Distribution::pareto(3.0, 1.0),
                                    Distribution::exponential(1.0)};
  for (const auto& d : pool) {
    double mean = d.mean();
    for (const auto& g : concave_pool())
      CHECK(choquet(g, d).value >= mean - 1e-9);
    for (const auto& g : {power_distortion(2.0), dual(wang_distortion(0.8))})
      CHECK(choquet(g, d).value <= mean + 1e-9);
  }

  // Positive homogeneity and translation equivariance via affine transport.
  std::vector<DistortionFn> gs = {tvar_distortion(0.9), wang_distortion(0.8),
                                  glue_distortion(0.4, 0.6, 0.9, 0.95)};
  for (const auto& g : gs) {
    for (double a : {0.5, 2.0}) {
      for (double c : {-10.0, 7.0}) {
        double rho = choquet(g, retained_loss()).value;
        double moved = choquet(g, affine(retained_loss(), a, c)).value;
        CHECK(near(moved, a * rho + c, 1e-9));
        double uref = choquet(g, Distribution::uniform(0.0, 1.0)).value;
        double umoved =
            choquet(g, affine(Distribution::uniform(0.0, 1.0), a, c)).value;
        CHECK(near(umoved, a * uref + c, 1e-7));
      }
    }
  }
}

TEST_CASE("comonotone sums are additive under every distortion") {
  JointModel j = JointModel::comonotone({retained_loss(), capped_loss()});
  Distribution s = j.sum_distribution();
  std::vector<DistortionFn> gs = {tvar_distortion(0.95), var_distortion(0.9),
                                  wang_distortion(0.8),
                                  glue_distortion(0.5, 0.8, 0.95, 0.99),
                                  power_distortion(2.0)};
  for (const auto& g : gs) {
    double lhs = choquet(g, s).value;
    double rhs = choquet(g, retained_loss()).value +
                 choquet(g, capped_loss()).value;
    CHECK(near(lhs, rhs, 1e-9));
  }
}

TEST_CASE("tail expectation is subadditive across random joints") {
  std::mt19937_64 rng(31337u);
  std::uniform_int_distribution<int> n_atoms(2, 8);
  std::uniform_real_distribution<double> val(0.0, 100.0);
  std::uniform_real_distribution<double> wt(0.05, 1.0);
  std::uniform_int_distribution<int> kind(0, 2);

  auto random_discrete = [&]() {
    int n = n_atoms(rng);
    std::vector<double> xs(n), ps(n);
    double tot = 0.0;
    for (int i = 0; i < n; ++i) {
      xs[i] = val(rng);
      ps[i] = wt(rng);
      tot += ps[i];
    }
    for (auto& p : ps) p /= tot;
    return Distribution::discrete(std::move(xs), std::move(ps));
  };

  for (int rep = 0; rep < 200; ++rep) {
    JointModel j = [&]() {
      switch (kind(rng)) {
        case 0:
          return JointModel::independent({random_discrete(), random_discrete()});
        case 1:
          return JointModel::comonotone({random_discrete(), random_discrete()});
        default: {
          int n = n_atoms(rng) + 2;
          std::vector<std::array<double, 3>> cells(n);
          double tot = 0.0;
          for (auto& c : cells) {
            c = {val(rng), val(rng), wt(rng)};
            tot += c[2];
          }
          for (auto& c : cells) c[2] /= tot;
          return JointModel::joint_pmf(cells);
        }
      }
    }();
    Distribution s = j.sum_distribution();
    for (double p : {0.8, 0.95}) {
      double sum_side = tvar(s, p);
      double part_side =
          tvar(j.marginals()[0], p) + tvar(j.marginals()[1], p);
      CHECK(sum_side <= part_side + 1e-9);
    }
  }
}

TEST_CASE("composition chains drive the measure to the essential supremum") {
  Distribution x = retained_loss();
  std::vector<DistortionFn> chain;
  double prev = 0.0;
  for (int n = 1; n <= 20; ++n) {
    chain.push_back(tvar_distortion(0.5));
    double value = choquet(compose_chain(chain), x).value;
    CHECK(value >= prev - 1e-9);
    prev = value;
  }
  CHECK(near(prev, 500.0, 1e-3));
}
