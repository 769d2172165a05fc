#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <vector>

#include "distort/distribution.hpp"
#include "distort/errors.hpp"
#include "distort/rng.hpp"
#include "doctest.h"

using namespace distort;

namespace {

Distribution retained_loss() {
  return Distribution::discrete({0.0, 100.0, 500.0}, {0.6, 0.375, 0.025});
}

Distribution capped_loss() {
  return Distribution::discrete({0.0, 100.0, 1100.0}, {0.6, 0.39, 0.01});
}

}  // namespace

TEST_CASE("survival function values and right-continuity") {
  Distribution u = Distribution::uniform(0.0, 1.0);
  CHECK(u.survival(0.3) == doctest::Approx(0.7).epsilon(1e-14));

  Distribution x = retained_loss();
  CHECK(x.survival(50.0) == doctest::Approx(0.4).epsilon(1e-14));
  // Right-continuous: at an atom the survival already excludes it.
  CHECK(x.survival(100.0) == doctest::Approx(0.025).epsilon(1e-14));
  CHECK(x.survival(99.999) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(x.survival(500.0) == 0.0);
  CHECK(x.survival(-1.0) == 1.0);

  Distribution p = Distribution::pareto(2.0, 1.0);
  CHECK(p.survival(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.survival(2.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(p.survival(10.0) == doctest::Approx(0.01).epsilon(1e-14));
}

TEST_CASE("lower and upper quantiles at atoms and plateaus") {
  Distribution x = retained_loss();
  CHECK(x.quantile_lower(0.95) == 100.0);
  CHECK(x.quantile_lower(0.96) == 100.0);
  CHECK(x.quantile_lower(0.975) == 100.0);
  CHECK(x.quantile_lower(0.9751) == 500.0);
  CHECK(x.quantile_lower(1.0) == 500.0);
  // Upper quantile steps up exactly at cdf plateau levels.
  CHECK(x.quantile_upper(0.6) == 100.0);
  CHECK(x.quantile_lower(0.6) == 0.0);

  Distribution b = Distribution::bernoulli(0.02);
  CHECK(b.quantile_lower(0.98) == 0.0);
  CHECK(b.quantile_upper(0.98) == 1.0);
  CHECK(b.quantile_lower(0.99) == 1.0);

  Distribution u = Distribution::uniform(0.0, 1.0);
  CHECK(u.quantile_lower(0.5) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("quantiles of strictly increasing families match frozen values") {
  CHECK(Distribution::pareto(2.0, 1.0).quantile_lower(0.99) ==
        doctest::Approx(10.0).epsilon(1e-12));
  CHECK(Distribution::lognormal(0.0, 1.0).quantile_lower(0.9) ==
        doctest::Approx(3.6022244792791573).epsilon(1e-12));
  CHECK(Distribution::normal(3.0, 2.0).quantile_lower(0.9) ==
        doctest::Approx(5.563103131089201).epsilon(1e-12));
  CHECK(Distribution::exponential(0.5).quantile_lower(0.5) ==
        doctest::Approx(1.3862943611198906).epsilon(1e-12));
}

TEST_CASE("lower and upper quantiles coincide for strictly increasing cdfs") {
  std::vector<Distribution> pool = {
      Distribution::uniform(-2.0, 5.0), Distribution::pareto(2.5, 1.0),
      Distribution::exponential(1.0), Distribution::lognormal(0.0, 0.5),
      Distribution::normal(0.0, 1.0)};
  for (const auto& d : pool) {
    for (int i = 1; i < 1000; ++i) {
      double p = i / 1000.0;
      CHECK(d.quantile_lower(p) ==
            doctest::Approx(d.quantile_upper(p)).epsilon(1e-10));
    }
  }
}

TEST_CASE("quantile and survival are dual on a probability grid") {
  std::vector<Distribution> pool = {retained_loss(), capped_loss(),
                                    Distribution::uniform(0.0, 1.0),
                                    Distribution::pareto(3.0, 2.0)};
  for (const auto& d : pool) {
    for (int i = 1; i < 200; ++i) {
      double p = i / 200.0;
      double q = d.quantile_lower(p);
      // F(q-) <= p <= F(q) characterizes the lower quantile.
      CHECK(d.cdf(q) >= p - 1e-12);
      CHECK(d.cdf(q - 1e-9 * (1.0 + std::fabs(q))) <= p + 1e-12);
    }
  }
}

TEST_CASE("mean values, infinite-mean rejection, support bounds") {
  CHECK(retained_loss().mean() == doctest::Approx(50.0).epsilon(1e-14));
  CHECK(capped_loss().mean() == doctest::Approx(50.0).epsilon(1e-14));
  CHECK(Distribution::uniform(0.0, 1.0).mean() ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(Distribution::pareto(2.0, 1.0).mean() ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS((void)Distribution::pareto(1.0, 1.0).mean(),
                  unsupported_error);

  auto [lo, hi] = retained_loss().support();
  CHECK(lo == 0.0);
  CHECK(hi == 500.0);
  CHECK(retained_loss().bounded_above());
  CHECK_FALSE(Distribution::pareto(2.0, 1.0).bounded_above());
  CHECK(Distribution::pareto(2.0, 1.0).support().first == 1.0);
  CHECK_FALSE(Distribution::normal(0.0, 1.0).bounded_below());
}

TEST_CASE("discrete convolution is exact") {
  Distribution b = Distribution::bernoulli(0.02);
  Distribution s = convolve_discrete(b, b);
  std::vector<double> xs, ps;
  s.atoms_probs(xs, ps);
  REQUIRE(xs.size() == 3);
  CHECK(xs[0] == 0.0);
  CHECK(xs[1] == 1.0);
  CHECK(xs[2] == 2.0);
  CHECK(ps[0] == doctest::Approx(0.9604).epsilon(1e-15));
  CHECK(ps[1] == doctest::Approx(0.0392).epsilon(1e-15));
  CHECK(ps[2] == doctest::Approx(0.0004).epsilon(1e-15));

  // Convolving with a point mass is a pure shift.
  Distribution shift = Distribution::discrete({7.0}, {1.0});
  Distribution t = convolve_discrete(retained_loss(), shift);
  std::vector<double> txs, tps;
  t.atoms_probs(txs, tps);
  REQUIRE(txs.size() == 3);
  CHECK(txs[0] == 7.0);
  CHECK(txs[2] == 507.0);
  CHECK(tps[1] == doctest::Approx(0.375).epsilon(1e-15));
}

TEST_CASE("convolution of the two example losses merges colliding sums") {
  Distribution s = convolve_discrete(retained_loss(), capped_loss());
  std::vector<double> xs, ps;
  s.atoms_probs(xs, ps);
  // 3x3 product cells produce 8 distinct sums: 100+0 and 0+100 collide.
  CHECK(xs.size() == 8);
  CHECK(s.cdf(0.0) == doctest::Approx(0.36).epsilon(1e-14));
  double mass = 0.0;
  for (double p : ps) mass += p;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(s.mean() == doctest::Approx(100.0).epsilon(1e-12));
  // P(sum = 100) = 0.6*0.39 + 0.375*0.6.
  CHECK(s.cdf(100.0) - s.cdf(99.999) ==
        doctest::Approx(0.459).epsilon(1e-13));
}

TEST_CASE("equal atoms merge without drift") {
  Distribution d = Distribution::discrete({1000.0, 1000.0, 1000.0},
                                          {0.04, 0.04, 0.92});
  std::vector<double> xs, ps;
  d.atoms_probs(xs, ps);
  REQUIRE(xs.size() == 1);
  CHECK(xs[0] == 1000.0);  // bitwise: merging must not average-drift
  CHECK(ps[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("empirical quantiles track the population for large n") {
  const std::size_t n = 1000000;
  std::vector<double> samples(n);
  std::mt19937_64 rng(20240817u);
  for (auto& s : samples) s = uniform01(rng);
  Distribution e = Distribution::empirical(std::move(samples));
  double worst = 0.0;
  for (int i = 1; i <= 99; ++i) {
    double p = i / 100.0;
    worst = std::max(worst, std::fabs(e.quantile_lower(p) - p));
  }
  CHECK(worst <= 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(e.mean() == doctest::Approx(0.5).epsilon(2e-3));
}

TEST_CASE("affine maps are exact where the family is closed") {
  Distribution d = affine(retained_loss(), 2.0, 10.0);
  CHECK(d.quantile_lower(0.95) == doctest::Approx(210.0).epsilon(1e-14));
  CHECK(d.mean() == doctest::Approx(110.0).epsilon(1e-12));

  Distribution u = affine(Distribution::uniform(0.0, 1.0), 3.0, -1.0);
  CHECK(u.support().first == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(u.support().second == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(u.mean() == doctest::Approx(0.5).epsilon(1e-12));

  // Pareto is closed under scaling but not shifting.
  Distribution p = affine(Distribution::pareto(2.0, 1.0), 2.0, 0.0);
  CHECK(p.survival(4.0) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK_THROWS_AS((void)affine(Distribution::pareto(2.0, 1.0), 1.0, 5.0),
                  unsupported_error);
  CHECK_THROWS_AS((void)affine(retained_loss(), -1.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("csv sample loader skips non-numeric lines") {
  const char* path = "/tmp/distort_test_samples.csv";
  {
    std::ofstream out(path);
    out << "loss\n1.5\n\n2.5\nnot-a-number\n4.0\n";
  }
  Distribution d = load_samples_csv(path);
  CHECK(d.sorted_samples().size() == 3);
  CHECK(d.mean() == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
  std::remove(path);

  const char* empty_path = "/tmp/distort_test_empty.csv";
  {
    std::ofstream out(empty_path);
    out << "header-only\n";
  }
  CHECK_THROWS_AS((void)load_samples_csv(empty_path), parse_error);
  std::remove(empty_path);
}

TEST_CASE("maximum-domain-of-attraction classification") {
  MdaClass frechet = Distribution::pareto(2.0, 1.0).mda_class();
  CHECK(frechet.kind == MdaClass::Kind::Frechet);
  CHECK(frechet.index == doctest::Approx(2.0).epsilon(1e-12));

  MdaClass weibull = Distribution::uniform(0.0, 1.0).mda_class();
  CHECK(weibull.kind == MdaClass::Kind::Weibull);
  CHECK(weibull.finite_endpoint == doctest::Approx(1.0).epsilon(1e-12));

  MdaClass gumbel = Distribution::lognormal(0.0, 1.0).mda_class();
  CHECK(gumbel.kind == MdaClass::Kind::Gumbel);
  CHECK(Distribution::exponential(1.0).mda_class().kind ==
        MdaClass::Kind::Gumbel);
}

TEST_CASE("declared regular-variation index is reported back") {
  Distribution p = Distribution::pareto(2.0, 1.0);
  auto ti = p.tail_index();
  REQUIRE(ti.has_value());
  CHECK(ti->alpha == doctest::Approx(2.0).epsilon(1e-12));

  Distribution e = Distribution::empirical({1.0, 2.0, 4.0, 8.0});
  CHECK_FALSE(e.tail_index().has_value());
  Distribution tagged = e.with_tail_index(1.7, 1.7);
  REQUIRE(tagged.tail_index().has_value());
  CHECK(tagged.tail_index()->alpha == doctest::Approx(1.7).epsilon(1e-12));
}

TEST_CASE("constructor validation rejects malformed inputs") {
  CHECK_THROWS_AS(
      (void)Distribution::discrete({1.0, 2.0}, {0.5, 0.6}),
      std::invalid_argument);
  CHECK_THROWS_AS((void)Distribution::discrete({1.0}, {-1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)Distribution::uniform(1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)Distribution::bernoulli(1.5), std::invalid_argument);
  CHECK_THROWS_AS((void)Distribution::pareto(-2.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)Distribution::empirical({}), std::invalid_argument);
}

TEST_CASE("discrete-like flag distinguishes atomic from continuous laws") {
  CHECK(retained_loss().discrete_like());
  CHECK(Distribution::empirical({1.0, 2.0}).discrete_like());
  CHECK_FALSE(Distribution::pareto(2.0, 1.0).discrete_like());
  CHECK_FALSE(Distribution::uniform(0.0, 1.0).discrete_like());
}
