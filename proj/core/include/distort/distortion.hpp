#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace distort {

enum class Shape { concave, convex, neither, unknown };

// A point mass of dg. eval(location) = left_limit + attained*height, so
// attained = 0 is a jump sitting just above `location` and attained = 1 a jump
// whose full height is already included at `location`. Jumps at 0 must have
// attained 0, jumps at 1 attained 1 (g(0)=0 and g(1)=1 pin them).
struct Jump {
  double location;
  double height;
  double attained;
};

class DistortionFn {
 public:
  DistortionFn(std::string label, std::function<double(double)> eval,
               std::vector<Jump> jumps = {},
               std::function<double(double)> ac_density = nullptr,
               std::vector<double> kinks = {},
               Shape shape_hint = Shape::unknown);

  double operator()(double u) const { return eval_(u); }
  const std::string& label() const { return label_; }
  const std::vector<Jump>& jumps() const { return jumps_; }
  bool has_density() const { return static_cast<bool>(density_); }
  // Density of the absolutely continuous part of dg; only meaningful between
  // jumps and defined on the open interval (0,1).
  double density(double u) const { return density_(u); }
  const std::vector<double>& kinks() const { return kinks_; }
  Shape shape_hint() const { return hint_; }

  double left_limit(double u) const;   // limit from below, = eval(0) at u=0
  double right_limit(double u) const;  // limit from above, = eval(1) at u=1
  const Jump* jump_at(double u) const;

 private:
  std::string label_;
  std::function<double(double)> eval_;
  std::vector<Jump> jumps_;
  std::function<double(double)> density_;
  std::vector<double> kinks_;
  Shape hint_;
};

// ---- catalog ----

DistortionFn identity_distortion();
// 1{u > 1-p}: the value-at-risk distortion at level p in (0,1).
DistortionFn var_distortion(double p);
// min(u/(1-p), 1) for p in [0,1); p = 0 degenerates to the identity.
DistortionFn tvar_distortion(double p);
DistortionFn power_distortion(double a);        // u^a, a > 0
DistortionFn dual_power_distortion(double b);   // 1-(1-u)^b, b > 0
DistortionFn wang_distortion(double p);         // Phi(Phi^-1(u)+Phi^-1(p))
DistortionFn lookback_distortion(double p);     // u^p(1-p ln u), p in (0,1]
DistortionFn beta_distortion(double a, double b);  // I_u(a,b)
// Piecewise-linear two-level distortion: slope h1/(1-beta) up to 1-beta, then
// linear to h2 at 1-alpha, then a jump to 1. Requires 0 <= alpha <= beta < 1
// (alpha == beta needs h1 == h2) and 0 <= h1 <= h2 <= 1.
DistortionFn glue_distortion(double h1, double h2, double alpha, double beta);

// Mixture weights of tvar:beta, tvar:alpha, var:alpha reproducing
// glue_distortion(h1,h2,alpha,beta); returned in that order.
struct GlueWeights {
  double w_tvar_beta;
  double w_tvar_alpha;
  double w_var_alpha;
};
GlueWeights glue_mixture_weights(double h1, double h2, double alpha, double beta);
// Whether the continuous initial segment on [0, 1-alpha) is concave.
bool glue_concave_on_tail(double h1, double h2, double alpha, double beta);

// ---- combinators ----

DistortionFn dual(const DistortionFn& g);   // q -> 1 - g(1-q)
DistortionFn compose(const DistortionFn& outer, const DistortionFn& inner);
DistortionFn compose_chain(const std::vector<DistortionFn>& gs);
// g applied on top of the tvar transform at level p: u -> g(min(u/(1-p),1)).
DistortionFn tail_distortion(const DistortionFn& g, double p);

DistortionFn mix_finite(const std::vector<std::pair<double, DistortionFn>>& terms);

// Countable mixture w_1 g_1 + w_2 g_2 + ...; terms are consumed until the
// cumulative weight reaches 1 - 1e-12 (or max_terms), and the leftover mass is
// folded into the last term.
DistortionFn mix_countable(
    const std::function<std::pair<double, DistortionFn>(int)>& term,
    int max_terms = 200);

// Continuous mixture over a parameter w in [w_lo, w_hi] with the given weight
// density, discretized once by a fixed-order Gauss-Legendre rule, plus exact
// atom terms. The node weights must integrate to 1 - (atom mass) within 1e-6
// and are renormalized to make the result an exact distortion.
DistortionFn mix_parametric(
    const std::function<DistortionFn(double)>& family,
    const std::function<double(double)>& density, double w_lo, double w_hi,
    int quad_order = 64,
    const std::vector<std::pair<double, DistortionFn>>& atoms = {});

// lambda * 1{u>0} + (1-lambda) * g(u); lambda = 0 returns g unchanged.
DistortionFn esssup_combo(double lambda, const DistortionFn& g);

// ---- spectral form ----

// Weight measure over quantile levels: rho = integral of VaR_w * density(w) dw
// plus sum of mass * VaR_level over atoms. For a distortion g the density is
// g'(1-w) and jumps of g at u become atoms at level 1-u.
struct SpectralWeight {
  std::function<double(double)> density;             // may be null
  std::vector<std::pair<double, double>> atoms;      // (location, mass)
  std::vector<double> breakpoints;                   // density kinks, optional
};

DistortionFn spectral_to_distortion(const SpectralWeight& phi);
SpectralWeight distortion_to_spectral(const DistortionFn& g);

// ---- shape classification ----

struct ShapeInterval {
  double lo, hi;
  Shape shape;
};

struct ShapeReport {
  bool concave_ok;
  bool convex_ok;
  Shape overall;                        // concave | convex | neither
  std::vector<ShapeInterval> intervals; // maximal runs when neither
  std::string text() const;             // "concave", "convex", "linear", ...
};

// Centered second differences on a uniform grid with absolute tolerance 1e-9.
ShapeReport classify_shape(const DistortionFn& g, int grid_size = 10000);
ShapeReport classify_shape_on(const DistortionFn& g, double lo, double hi,
                              int grid_size = 10000);

}  // namespace distort
