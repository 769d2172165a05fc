#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "distort/distortion.hpp"
#include "distort/distribution.hpp"
#include "distort/joint.hpp"

namespace distort {

struct MeasureReport {
  double value = 0.0;
  // One of: exact_stieltjes | quadrature | closed_form | monte_carlo.
  std::string method;
  double abs_error_estimate = 0.0;
  std::string distortion_label;
  std::string distribution_label;
};

// Distorted expectation, survival form:
//   rho_g[X] = int_0^inf g(S(x)) dx + int_{-inf}^0 [g(S(x)) - 1] dx.
// Exact Stieltjes sums for atomic laws; adaptive quadrature with forced
// breakpoints at quantile preimages of g's jumps/kinks otherwise. Unbounded
// tails are extended by interval doubling with a decay-exponent test; a tail
// whose integrand fails to decay (exponent <= 1 across three consecutive
// doublings) raises divergence_error.
MeasureReport choquet(const DistortionFn& g, const Distribution& d);

// The same value through the quantile representation
//   rho_g[X] = int_[0,1] VaR_{1-q}[X] dg(q),
// computed independently: each jump of g contributes its unattained part times
// the lower quantile and its attained part times the upper quantile; the
// absolutely continuous part is an exact interval sum for atomic laws and a
// Stieltjes quadrature against g' otherwise.
MeasureReport choquet_quantile_form(const DistortionFn& g, const Distribution& d);

// Lower / upper p-quantile of the loss.
double var(const Distribution& d, double p);       // p in (0,1]
double var_plus(const Distribution& d, double p);  // p in [0,1)

// Tail value at risk: the Choquet integral under min(u/(1-p), 1), p in (0,1).
double tvar(const Distribution& d, double p);

// Conditional tail expectation E[X | X > VaR_p]; requires the conditioning
// event to have positive probability.
double cte(const Distribution& d, double p);

// Quantile-weighted (spectral) measure: integral of VaR_w against the weight
// density plus exact atom terms. The weight must have total mass 1 (1e-6).
MeasureReport spectral(const SpectralWeight& phi, const Distribution& d);

// Mixing measure over TVaR levels. Pure atoms unless a density is attached.
struct TVaRMixingMeasure {
  std::vector<std::pair<double, double>> atoms;  // (level in [0,1], mass >= 0)
  std::function<double(double)> density;         // optional, on (0,1)
  std::vector<double> breakpoints;               // density kinks, optional
};

// int_0^1 TVaR_w dmu(w); atom at 0 means the plain mean, an atom at 1 the
// essential supremum (finite support required there).
MeasureReport weighted_tvar(const TVaRMixingMeasure& mu, const Distribution& d);

// Representation of a concave distortion as a TVaR mixture: with
// phi(w) = g'(1-w), nu((a,b]) = phi(b) - phi(a) and dmu(w) = (1-w) dnu(w),
// plus an atom of mass phi(0) = g'(1) at w = 0. The continuous part is
// discretized into `cells` grid cells with exact per-cell masses
//   (1-b) phi(b) - (1-a) phi(a) + g(1-a) - g(1-b),
// so kinks of g land in the correct cell; a jump of g at 0 is smeared into
// the top cell. Throws domain_error when g is not concave.
TVaRMixingMeasure decompose_concave(const DistortionFn& g,
                                    std::size_t cells = 10000);

// Four-term combination w1*TVaR_beta + w2*TVaR_alpha + w3*VaR_beta +
// w4*VaR_alpha with nonnegative weights summing to 1 and alpha <= beta.
MeasureReport glue_var(double w1, double w2, double w3, double w4, double alpha,
                       double beta, const Distribution& d);

// Smallest z with P(X > z) <= 1 - alpha (the lower alpha-quantile).
double tail_threshold(const Distribution& d, double alpha);

// Tail-restricted Choquet integral with cutoff m:
//   int_{min(0,m)}^0 [g(S(z)) - 1] dz + int_{max(0,m)}^inf g(S(z)) dz.
// Exact for atomic laws. Optional second output receives the quadrature
// error estimate (0 for exact paths).
double tail_choquet(const DistortionFn& g, const Distribution& d, double m,
                    double* abs_error = nullptr);

enum class SubaddVerdict { holds, fails, inapplicable };
std::string verdict_text(SubaddVerdict v);

struct SubaddReport {
  SubaddVerdict verdict = SubaddVerdict::inapplicable;
  double lhs = 0.0;  // Choquet value of (X+Y) restricted to the tail event
  double rhs = 0.0;  // sum of the restricted marginal Choquet values
  double m_alpha = 0.0;  // max of the three alpha-thresholds
  double s_x = 0.0, s_y = 0.0, s_sum = 0.0;  // the three alpha-thresholds
  bool used_monte_carlo = false;
};

// Tail-subadditivity comparison for a bivariate joint model. The tail event
// is Q = {X > s_x} & {Y > s_y} & {X+Y > s_sum} with each s the alpha-threshold
// inf{z | survival(z) <= 1-alpha}. When Q has probability zero the comparison
// is `inapplicable`. Otherwise each risk is restricted to Q (set to zero off
// Q, so only outcomes where all three exceed their thresholds carry weight)
// and the Choquet values of the restrictions are compared:
//   lhs = choquet(g, (X+Y)*1_Q),  rhs = choquet(g, X*1_Q) + choquet(g, Y*1_Q),
// with `holds` iff lhs <= rhs + 1e-9. Restricting to the joint event is what
// makes concavity of g on [0, 1-alpha) sufficient: every level set of a
// restricted risk lies inside Q, whose probability is at most 1-alpha, so g
// is only ever evaluated on its concave range. (Cutting the three survival
// integrals at a common z-threshold instead is NOT subadditive, not even for
// comonotone sums.) Exact when the joint supports exact cells; otherwise
// mc_n > 0 samples with the given seed drive an empirical evaluation, and
// mc_n == 0 raises unsupported_error.
SubaddReport tail_subadditivity_check(const DistortionFn& g, const JointModel& j,
                                      double alpha, std::size_t mc_n = 0,
                                      std::uint64_t seed = 0);

}  // namespace distort
