#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "distort/joint.hpp"

namespace distort {

struct McParams {
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

struct RatioPoint {
  double p = 0.0;
  double ratio = 0.0;        // NaN when the denominator vanishes
  double numerator = 0.0;    // VaR_p of the sum
  double denominator = 0.0;  // sum of the marginal VaR_p (always analytic)
  double ci_halfwidth = 0.0;  // 0 for exact points
  // exact | closed_form | monte_carlo | zero_denominator
  std::string method;
  bool low_confidence = false;  // Monte Carlo point with n*(1-p) < 100
};

struct LimitPrediction {
  enum class Kind { none, point, band, upper_bound } kind = Kind::none;
  double lo = 0.0;
  double hi = 0.0;  // == lo for point predictions
  std::string text() const;
};

struct RatioScan {
  std::vector<RatioPoint> points;
  LimitPrediction predicted;
};

// VaR_p of the sum of two independent Uniform(0,1) risks:
// sqrt(2p) on (0,1/2], 2 - sqrt(2(1-p)) on [1/2,1].
double uniform_sum_closed_form(double p);

// Order-statistic estimate of the p-quantile of a pre-sorted sample:
// value x_(ceil(np)), half-width from the 95% binomial index band.
struct SampleQuantile {
  double value = 0.0;
  double ci_halfwidth = 0.0;
};
SampleQuantile sample_quantile(const std::vector<double>& sorted, double p);

// R(p) = VaR_p[sum] / sum_i VaR_p[X_i]. Exact whenever the joint has an exact
// sum law (comonotone joints short-circuit to ratio 1 through identical
// quantile sums); the iid Uniform(0,1) independent pair uses the closed form;
// anything else needs Monte Carlo. MC estimates use the order statistic at
// ceil(n*p) with a 95% binomial index band; marginal quantiles in the
// denominator are always analytic. A vanished denominator raises
// zero_denominator_error carrying the raw numerator.
RatioPoint var_ratio(const JointModel& j, double p,
                     const std::optional<McParams>& mc = std::nullopt);

// Ratio over a grid geometric in 1-p between p_start and p_end. Monte Carlo
// points derive their chunk seeds from (seed, point index, chunk index), so a
// scan is a pure function of (model, grid, n, seed). Zero-denominator points
// are recorded with ratio NaN instead of failing the scan.
RatioScan ratio_scan(const JointModel& j, double p_start, double p_end,
                     std::size_t points,
                     const std::optional<McParams>& mc = std::nullopt);

// Theoretical p -> 1 prediction when the model matches a known regime:
// comonotone -> exactly 1; all marginals bounded above -> upper bound 1;
// independent identical marginals with tail index alpha -> k^{1/alpha - 1}
// (alpha = 1 -> exactly 1), or the band [k^{1/beta-1}, k^{1/alpha-1}] for
// extended regular variation with distinct indices.
LimitPrediction limit_predictor(const JointModel& j);

// Trichotomy comparing (sum c_i)^{1/alpha} against sum c_i^{1/alpha} for
// nonnegative tail-ratio constants with c_1 = 1: returns "<1", "=1" or ">1",
// the position of the limiting VaR ratio relative to 1. An empty c means
// c_i = 1 for all k risks.
std::string tail_ratio_regime(std::vector<double> c, double alpha, std::size_t k);

// CSV with header p,ratio,ci_halfwidth,method,predicted_limit.
void write_scan_csv(const RatioScan& scan, std::ostream& os);

}  // namespace distort
