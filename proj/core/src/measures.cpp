#include "distort/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "distort/errors.hpp"
#include "distort/quadrature.hpp"

namespace distort {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPieceTol = 1e-11;   // per-piece quadrature tolerance
constexpr double kHoldsTol = 1e-9;    // tail-subadditivity comparison slack
constexpr double kTailStartMass = 1e-6;

// Levels in (0,1) where g o survival can kink or jump.
std::vector<double> g_break_levels(const DistortionFn& g) {
  std::vector<double> us;
  for (const auto& j : g.jumps())
    if (j.location > 0.0 && j.location < 1.0) us.push_back(j.location);
  for (double k : g.kinks())
    if (k > 0.0 && k < 1.0) us.push_back(k);
  std::sort(us.begin(), us.end());
  us.erase(std::unique(us.begin(), us.end()), us.end());
  return us;
}

// x-positions where g(survival(x)) can kink or jump for a continuous law.
std::vector<double> g_break_positions(const DistortionFn& g,
                                      const Distribution& d) {
  std::vector<double> xs;
  for (double u : g_break_levels(g)) {
    double x = d.quantile_lower(1.0 - u);
    if (std::isfinite(x)) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

// Adaptive integral of f over [a,b] forced to split at the given sorted
// positions.
double integrate_pieces(const std::function<double(double)>& f, double a,
                        double b, const std::vector<double>& splits,
                        double& err) {
  if (!(b > a)) return 0.0;
  std::vector<double> edges;
  edges.push_back(a);
  for (double x : splits)
    if (x > a && x < b) edges.push_back(x);
  edges.push_back(b);
  long double total = 0.0L;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    QuadResult r = adaptive_simpson(f, edges[i], edges[i + 1], kPieceTol, 45);
    total += r.value;
    err += r.error;
  }
  return static_cast<double>(total);
}

// int_{x0}^{inf} g(S(x)) dx by interval doubling. The integrand must already
// be past every forced breakpoint. Decay is monitored through the exponent
// s = -log2 h(2x)/h(x); s <= 1 persisting over three consecutive doublings
// means the integral cannot converge.
double tail_above(const DistortionFn& g, const Distribution& d, double x0,
                  double& err) {
  auto h = [&](double x) { return g(d.survival(x)); };
  double x = std::max(x0, 1.0);
  long double total = 0.0L;
  if (x > x0) {
    QuadResult r = adaptive_simpson(h, x0, x, kPieceTol, 45);
    total += r.value;
    err += r.error;
  }
  double hx = h(x);
  if (hx <= 0.0) return static_cast<double>(total);
  int flat = 0;
  for (int iter = 0; iter < 2000; ++iter) {
    double x2 = 2.0 * x;
    QuadResult r = adaptive_simpson(h, x, x2, kPieceTol, 45);
    total += r.value;
    err += r.error;
    double h2 = h(x2);
    if (h2 <= 0.0) return static_cast<double>(total);
    double s = -std::log2(h2 / hx);
    if (s <= 1.000001) {
      if (++flat >= 3)
        throw divergence_error(
            "upper tail of the survival integral does not decay");
    } else {
      flat = 0;
      // Power-law remainder bound: int_{x2}^inf h ~ h(x2) x2 / (s-1).
      double rem = h2 * x2 / (s - 1.0);
      if (rem <= std::max(1e-10, 1e-9 * std::fabs(static_cast<double>(total)))) {
        err += rem;
        return static_cast<double>(total);
      }
      if (x2 > 1e250) {
        // Convergent but glacially; extrapolate and report the tail honestly.
        total += rem;
        err += rem;
        return static_cast<double>(total);
      }
    }
    x = x2;
    hx = h2;
  }
  throw divergence_error("upper tail integral did not settle");
}

// int_{-inf}^{z0} [g(S(z)) - 1] dz, z0 <= 0, by doubling |z|.
double tail_below(const DistortionFn& g, const Distribution& d, double z0,
                  double& err) {
  auto f = [&](double z) { return g(d.survival(z)) - 1.0; };
  auto h = [&](double z) { return 1.0 - g(d.survival(z)); };
  double z = std::min(z0, -1.0);
  long double total = 0.0L;
  if (z < z0) {
    QuadResult r = adaptive_simpson(f, z, z0, kPieceTol, 45);
    total += r.value;
    err += r.error;
  }
  double hz = h(z);
  if (hz <= 0.0) return static_cast<double>(total);
  int flat = 0;
  for (int iter = 0; iter < 2000; ++iter) {
    double z2 = 2.0 * z;
    QuadResult r = adaptive_simpson(f, z2, z, kPieceTol, 45);
    total += r.value;
    err += r.error;
    double h2 = h(z2);
    if (h2 <= 0.0) return static_cast<double>(total);
    double s = -std::log2(h2 / hz);
    if (s <= 1.000001) {
      if (++flat >= 3)
        throw divergence_error(
            "lower tail of the survival integral does not decay");
    } else {
      flat = 0;
      double rem = h2 * (-z2) / (s - 1.0);
      if (rem <= std::max(1e-10, 1e-9 * std::fabs(static_cast<double>(total)))) {
        err += rem;
        return static_cast<double>(total);
      }
      if (z2 < -1e250) {
        total -= rem;
        err += rem;
        return static_cast<double>(total);
      }
    }
    z = z2;
    hz = h2;
  }
  throw divergence_error("lower tail integral did not settle");
}

// Exact survival-form Choquet sum for an atomic law:
//   rho = x_0 + sum_{i>=1} (x_i - x_{i-1}) * g(S(x_{i-1})).
double choquet_atomic(const DistortionFn& g, const Distribution& d) {
  std::vector<double> xs, ps;
  d.atoms_probs(xs, ps);
  const std::size_t m = xs.size();
  std::vector<double> surv(m);  // S(x_i)
  long double run = 0.0L;
  for (std::size_t i = m; i-- > 0;) {
    surv[i] = static_cast<double>(run);
    run += ps[i];
  }
  long double rho = xs[0];
  for (std::size_t i = 1; i < m; ++i)
    rho += static_cast<long double>(xs[i] - xs[i - 1]) * g(surv[i - 1]);
  return static_cast<double>(rho);
}

// Survival-form Choquet integral for a continuous parametric law.
double choquet_parametric(const DistortionFn& g, const Distribution& d,
                          double& err) {
  auto [lo, hi] = d.support();
  auto splits = g_break_positions(g, d);
  auto gS = [&](double x) { return g(d.survival(x)); };
  auto gSm1 = [&](double x) { return g(d.survival(x)) - 1.0; };
  long double value = 0.0L;

  if (hi > 0.0) {
    double a0 = 0.0;
    if (lo > 0.0) {
      value += lo;  // g(1) = 1 on [0, lo)
      a0 = lo;
    }
    if (std::isfinite(hi)) {
      value += integrate_pieces(gS, a0, hi, splits, err);
    } else {
      double xfar = std::max(a0 + 1.0, d.quantile_lower(1.0 - kTailStartMass));
      if (!splits.empty()) xfar = std::max(xfar, splits.back() + 1.0);
      value += integrate_pieces(gS, a0, xfar, splits, err);
      value += tail_above(g, d, xfar, err);
    }
  }
  if (lo < 0.0) {
    double b0 = std::min(0.0, hi);
    if (hi < 0.0) value += hi;  // g(0) - 1 = -1 on [hi, 0)
    if (std::isfinite(lo)) {
      value += integrate_pieces(gSm1, lo, b0, splits, err);
    } else {
      double zfar = std::min(b0 - 1.0, d.quantile_lower(kTailStartMass));
      if (!splits.empty()) zfar = std::min(zfar, splits.front() - 1.0);
      value += integrate_pieces(gSm1, zfar, b0, splits, err);
      value += tail_below(g, d, zfar, err);
    }
  }
  return static_cast<double>(value);
}

// E[(X - v)^+] = int_v^inf S(x) dx.
double stop_loss(const Distribution& d, double v, double& err) {
  if (d.discrete_like()) {
    std::vector<double> xs, ps;
    d.atoms_probs(xs, ps);
    long double s = 0.0L;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (xs[i] > v) s += static_cast<long double>(ps[i]) * (xs[i] - v);
    return static_cast<double>(s);
  }
  auto [lo, hi] = d.support();
  if (v >= hi) return 0.0;
  auto S = [&](double x) { return d.survival(x); };
  long double total = 0.0L;
  double a0 = std::max(v, lo);
  if (a0 > v) total += a0 - v;  // S = 1 below the support
  if (std::isfinite(hi)) {
    QuadResult r = adaptive_simpson(S, a0, hi, kPieceTol, 45);
    total += r.value;
    err += r.error;
  } else {
    double xfar = std::max(a0 + 1.0, d.quantile_lower(1.0 - kTailStartMass));
    QuadResult r = adaptive_simpson(S, a0, xfar, kPieceTol, 45);
    total += r.value;
    err += r.error;
    total += tail_above(identity_distortion(), d, xfar, err);
  }
  return static_cast<double>(total);
}

// Sum over g's jumps of unattained mass * lower quantile plus attained mass *
// upper quantile. Infinite quantiles with positive weight mean divergence.
double quantile_jump_terms(const DistortionFn& g, const Distribution& d) {
  long double total = 0.0L;
  for (const auto& j : g.jumps()) {
    double p = 1.0 - j.location;
    double w_lo = (1.0 - j.attained) * j.height;
    double w_hi = j.attained * j.height;
    if (w_lo > 0.0) {
      double q = d.quantile_lower(p);
      if (std::isinf(q))
        throw divergence_error(
            "quantile form diverges: unbounded quantile carries weight");
      total += static_cast<long double>(w_lo) * q;
    }
    if (w_hi > 0.0) {
      double q = d.quantile_upper(p);
      if (std::isinf(q))
        throw divergence_error(
            "quantile form diverges: unbounded quantile carries weight");
      total += static_cast<long double>(w_hi) * q;
    }
  }
  return static_cast<double>(total);
}

// Mass of g's jumps located in [a, b).
double jump_mass_in(const DistortionFn& g, double a, double b) {
  double m = 0.0;
  for (const auto& j : g.jumps())
    if (j.location >= a && j.location < b) m += j.height;
  return m;
}

// g's derivative for quadrature purposes: analytic density when stored, else
// a central difference.
double g_density_or_diff(const DistortionFn& g, double u) {
  if (g.has_density()) return g.density(u);
  const double h = 1e-6;
  double a = std::max(0.0, u - h);
  double b = std::min(1.0, u + h);
  return (g(b) - g(a)) / (b - a);
}

// One-sided geometrically-halved improper integral used by the quantile form
// near q = 0 (toward the upper quantiles) and q = 1 (toward the lower ones).
// Integrates f over (0, q_hi] (side > 0) or [q_lo, 1) (side < 0).
double halved_tail(const std::function<double(double)>& f, double q_edge,
                   int side, double& err) {
  long double total = 0.0L;
  double width = side > 0 ? q_edge : 1.0 - q_edge;
  if (width <= 0.0) return 0.0;
  double prev = kInf;
  int flat = 0;
  for (int iter = 0; iter < 200; ++iter) {
    double w2 = width / 2.0;
    double a = side > 0 ? w2 : 1.0 - width;
    double b = side > 0 ? width : 1.0 - w2;
    QuadResult r = adaptive_simpson(f, a, b, kPieceTol, 40);
    total += r.value;
    err += r.error;
    double term = std::fabs(r.value);
    if (term <= 1e-13 * (1.0 + std::fabs(static_cast<double>(total)))) {
      err += term;
      return static_cast<double>(total);
    }
    if (std::isfinite(prev) && prev > 0.0) {
      double ratio = term / prev;
      if (ratio >= 0.9995) {
        if (++flat >= 3)
          throw divergence_error("quantile-form tail does not converge");
      } else {
        flat = 0;
        double rem = term * ratio / (1.0 - ratio);
        if (rem <= std::max(1e-10, 1e-9 * std::fabs(static_cast<double>(total)))) {
          err += rem;
          return static_cast<double>(total);
        }
      }
    }
    prev = term;
    width = w2;
  }
  err += std::fabs(prev);
  return static_cast<double>(total);
}

double tvar_value(const Distribution& d, double p) {
  return choquet(tvar_distortion(p), d).value;
}

// TVaR extended to the closed level range used by mixing measures.
double tvar_level(const Distribution& d, double w) {
  if (w <= 0.0) return d.mean();
  if (w >= 1.0) {
    double hi = d.support().second;
    if (!std::isfinite(hi))
      throw divergence_error("essential supremum of an unbounded loss");
    return hi;
  }
  return tvar_value(d, w);
}

MeasureReport make_report(double value, const char* method, double err,
                          const std::string& gl, const std::string& dl) {
  MeasureReport r;
  r.value = value;
  r.method = method;
  r.abs_error_estimate = err;
  r.distortion_label = gl;
  r.distribution_label = dl;
  return r;
}

}  // namespace

MeasureReport choquet(const DistortionFn& g, const Distribution& d) {
  if (d.discrete_like())
    return make_report(choquet_atomic(g, d), "exact_stieltjes", 0.0, g.label(),
                       d.label());
  double err = 0.0;
  double v = choquet_parametric(g, d, err);
  return make_report(v, "quadrature", std::max(err, 1e-12), g.label(), d.label());
}

MeasureReport choquet_quantile_form(const DistortionFn& g,
                                    const Distribution& d) {
  double jumps = quantile_jump_terms(g, d);

  if (d.discrete_like()) {
    std::vector<double> xs, ps;
    d.atoms_probs(xs, ps);
    const std::size_t m = xs.size();
    std::vector<double> surv(m);
    long double run = 0.0L;
    for (std::size_t i = m; i-- > 0;) {
      surv[i] = static_cast<double>(run);
      run += ps[i];
    }
    // VaR_{1-q} = x_i on q in [S_i, S_{i-1}); weight it by the absolutely
    // continuous dg mass of that interval.
    long double cont = 0.0L;
    for (std::size_t i = 0; i < m; ++i) {
      double a = surv[i];
      double b = i == 0 ? 1.0 : surv[i - 1];
      double mass = g.left_limit(b) - g.left_limit(a) - jump_mass_in(g, a, b);
      cont += static_cast<long double>(xs[i]) * mass;
    }
    return make_report(static_cast<double>(cont) + jumps, "exact_stieltjes",
                       0.0, g.label(), d.label());
  }

  // Continuous law: Stieltjes quadrature of VaR_{1-q} g'(q) dq between the
  // breakpoints of g, with geometric halving toward both endpoints.
  double err = 0.0;
  auto f = [&](double q) {
    return d.quantile_lower(1.0 - q) * g_density_or_diff(g, q);
  };
  auto levels = g_break_levels(g);
  double q_lo = 1e-3, q_hi = 1.0 - 1e-3;
  long double total = 0.0L;
  total += integrate_pieces(f, q_lo, q_hi, levels, err);
  total += halved_tail(f, q_lo, +1, err);
  total += halved_tail(f, q_hi, -1, err);
  return make_report(static_cast<double>(total) + jumps, "quadrature",
                     std::max(err, 1e-12), g.label(), d.label());
}

double var(const Distribution& d, double p) {
  if (!(p > 0.0 && p <= 1.0))
    throw std::domain_error("var needs p in (0,1]");
  return d.quantile_lower(p);
}

double var_plus(const Distribution& d, double p) {
  if (!(p >= 0.0 && p < 1.0))
    throw std::domain_error("var_plus needs p in [0,1)");
  return d.quantile_upper(p);
}

double tvar(const Distribution& d, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("tvar needs p in (0,1)");
  return tvar_value(d, p);
}

double cte(const Distribution& d, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("cte needs p in (0,1)");
  double v = d.quantile_lower(p);
  double s = d.survival(v);
  if (!(s > kProbTol))
    throw std::domain_error("cte: conditioning event X > VaR_p has zero mass");
  if (d.discrete_like()) {
    std::vector<double> xs, ps;
    d.atoms_probs(xs, ps);
    long double num = 0.0L, den = 0.0L;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (xs[i] > v) {
        num += static_cast<long double>(xs[i]) * ps[i];
        den += ps[i];
      }
    return static_cast<double>(num / den);
  }
  double err = 0.0;
  return v + stop_loss(d, v, err) / s;
}

MeasureReport spectral(const SpectralWeight& phi, const Distribution& d) {
  // Mass audit.
  double mass = 0.0, mass_err = 0.0;
  for (const auto& [w, m] : phi.atoms) {
    if (!(w >= 0.0 && w <= 1.0 && m >= 0.0))
      throw std::domain_error("spectral weight atoms must be (level in [0,1], mass >= 0)");
    mass += m;
  }
  if (phi.density) {
    std::vector<double> splits(phi.breakpoints);
    std::sort(splits.begin(), splits.end());
    mass += integrate_pieces(phi.density, 0.0, 1.0, splits, mass_err);
  }
  if (std::fabs(mass - 1.0) > 1e-6)
    throw std::domain_error("spectral weight must have total mass 1");

  long double total = 0.0L;
  double err = 0.0;
  for (const auto& [w, m] : phi.atoms) {
    if (m <= 0.0) continue;
    double q = w <= 0.0 ? d.quantile_upper(0.0) : d.quantile_lower(w);
    if (std::isinf(q))
      throw divergence_error("spectral atom sits on an unbounded quantile");
    total += static_cast<long double>(m) * q;
  }

  if (phi.density) {
    std::vector<double> splits(phi.breakpoints);
    if (d.discrete_like()) {
      std::vector<double> xs, ps;
      d.atoms_probs(xs, ps);
      long double cum = 0.0L;
      std::vector<double> edges;
      edges.push_back(0.0);
      for (double p : ps) {
        cum += p;
        edges.push_back(std::min(1.0, static_cast<double>(cum)));
      }
      edges.back() = 1.0;
      for (double s : splits)
        if (s > 0.0 && s < 1.0) edges.push_back(s);
      std::sort(edges.begin(), edges.end());
      edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
      for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        double a = edges[i], b = edges[i + 1];
        if (!(b > a)) continue;
        QuadResult r = adaptive_simpson(phi.density, a, b, kPieceTol, 40);
        total += static_cast<long double>(d.quantile_lower(b)) * r.value;
        err += r.error * std::fabs(d.quantile_lower(b));
      }
    } else {
      auto f = [&](double w) { return d.quantile_lower(w) * phi.density(w); };
      double q_lo = 1e-3, q_hi = 1.0 - 1e-3;
      total += integrate_pieces(f, q_lo, q_hi, splits, err);
      total += halved_tail(f, q_lo, +1, err);
      total += halved_tail(f, q_hi, -1, err);
    }
  }
  const char* method = phi.density ? "quadrature" : "exact_stieltjes";
  return make_report(static_cast<double>(total), method,
                     phi.density ? std::max(err + mass_err, 1e-12) : 0.0,
                     "spectral", d.label());
}

MeasureReport weighted_tvar(const TVaRMixingMeasure& mu, const Distribution& d) {
  double mass = 0.0, mass_err = 0.0;
  for (const auto& [w, m] : mu.atoms) {
    if (!(w >= 0.0 && w <= 1.0 && m >= -1e-12))
      throw std::domain_error("mixing measure atoms must be (level in [0,1], mass >= 0)");
    mass += m;
  }
  if (mu.density) {
    std::vector<double> splits(mu.breakpoints);
    std::sort(splits.begin(), splits.end());
    mass += integrate_pieces(mu.density, 0.0, 1.0, splits, mass_err);
  }
  if (std::fabs(mass - 1.0) > 1e-8)
    throw std::domain_error("TVaR mixing measure must have total mass 1");

  long double total = 0.0L;
  double err = 0.0;
  for (const auto& [w, m] : mu.atoms) {
    if (m <= 0.0) continue;
    total += static_cast<long double>(m) * tvar_level(d, w);
  }
  if (mu.density) {
    // Fixed-order panels between breakpoints; TVaR_w is continuous in w.
    static const GaussLegendre rule(64);
    std::vector<double> edges{0.0};
    for (double s : mu.breakpoints)
      if (s > 0.0 && s < 1.0) edges.push_back(s);
    edges.push_back(1.0 - 1e-9);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    auto f = [&](double w) { return mu.density(w) * tvar_level(d, w); };
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
      total += rule.integrate(f, edges[i], edges[i + 1]);
    err += 1e-9;
  }
  bool exact = !mu.density && d.discrete_like();
  return make_report(static_cast<double>(total),
                     exact ? "exact_stieltjes" : "quadrature",
                     exact ? 0.0 : std::max(err + mass_err, 1e-12),
                     "weighted_tvar", d.label());
}

TVaRMixingMeasure decompose_concave(const DistortionFn& g, std::size_t cells) {
  if (cells < 2) throw std::domain_error("decompose_concave needs >= 2 cells");
  bool concave = g.shape_hint() == Shape::concave;
  if (!concave) concave = classify_shape(g).concave_ok;
  if (!concave)
    throw std::domain_error("decompose_concave needs a concave distortion");

  auto phi = [&](double w) { return g_density_or_diff(g, 1.0 - w); };

  TVaRMixingMeasure mu;
  double mean_atom = phi(0.0);  // g'(1)
  long double total = mean_atom;
  if (mean_atom > 1e-13) mu.atoms.emplace_back(0.0, mean_atom);

  const double D = static_cast<double>(cells);
  double phi_a = mean_atom;
  double g_a = 1.0;  // g(1 - 0)
  for (std::size_t j = 0; j < cells; ++j) {
    double a = static_cast<double>(j) / D;
    double b = static_cast<double>(j + 1) / D;
    double phi_b = b >= 1.0 ? 0.0 : phi(b);
    double g_b = g(1.0 - b);
    double term_b = b >= 1.0 ? 0.0 : (1.0 - b) * phi_b;
    double m = term_b - (1.0 - a) * phi_a + g_a - g_b;
    if (m < -1e-6)
      throw std::domain_error("decompose_concave: negative cell mass");
    if (m > 1e-15) {
      mu.atoms.emplace_back(0.5 * (a + b), m);
      total += m;
    }
    phi_a = phi_b;
    g_a = g_b;
  }
  if (std::fabs(static_cast<double>(total) - 1.0) > 1e-6)
    throw std::domain_error("decompose_concave: mixing mass differs from 1");
  for (auto& [w, m] : mu.atoms) m /= static_cast<double>(total);
  return mu;
}

MeasureReport glue_var(double w1, double w2, double w3, double w4, double alpha,
                       double beta, const Distribution& d) {
  if (!(alpha > 0.0 && alpha <= beta && beta < 1.0))
    throw std::domain_error("glue_var needs 0 < alpha <= beta < 1");
  for (double w : {w1, w2, w3, w4})
    if (!(w >= -1e-12))
      throw std::domain_error("glue_var weights must be nonnegative");
  if (std::fabs(w1 + w2 + w3 + w4 - 1.0) > 1e-9)
    throw std::domain_error("glue_var weights must sum to 1");

  double err = 0.0;
  long double v = 0.0L;
  if (w1 > 0.0) {
    MeasureReport r = choquet(tvar_distortion(beta), d);
    v += static_cast<long double>(w1) * r.value;
    err += w1 * r.abs_error_estimate;
  }
  if (w2 > 0.0) {
    MeasureReport r = choquet(tvar_distortion(alpha), d);
    v += static_cast<long double>(w2) * r.value;
    err += w2 * r.abs_error_estimate;
  }
  if (w3 > 0.0) v += static_cast<long double>(w3) * d.quantile_lower(beta);
  if (w4 > 0.0) v += static_cast<long double>(w4) * d.quantile_lower(alpha);
  return make_report(static_cast<double>(v), "closed_form", err, "glue_var",
                     d.label());
}

double tail_threshold(const Distribution& d, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("tail_threshold needs alpha in (0,1)");
  return d.quantile_lower(alpha);
}

double tail_choquet(const DistortionFn& g, const Distribution& d, double m,
                    double* abs_error) {
  if (abs_error) *abs_error = 0.0;
  if (d.discrete_like()) {
    std::vector<double> xs, ps;
    d.atoms_probs(xs, ps);
    for (double& x : xs) x = std::max(x, m);
    Distribution clamped = Distribution::discrete(xs, ps);
    return choquet_atomic(g, clamped) - std::max(0.0, m);
  }
  auto [lo, hi] = d.support();
  auto splits = g_break_positions(g, d);
  auto gS = [&](double x) { return g(d.survival(x)); };
  auto gSm1 = [&](double x) { return g(d.survival(x)) - 1.0; };
  double err = 0.0;
  long double value = 0.0L;

  double a0 = std::max(0.0, m);
  if (hi > a0) {
    if (std::isfinite(hi)) {
      value += integrate_pieces(gS, a0, hi, splits, err);
    } else {
      double xfar = std::max(a0 + 1.0, d.quantile_lower(1.0 - kTailStartMass));
      if (!splits.empty()) xfar = std::max(xfar, splits.back() + 1.0);
      value += integrate_pieces(gS, a0, xfar, splits, err);
      value += tail_above(g, d, xfar, err);
    }
  }
  if (m < 0.0) value += integrate_pieces(gSm1, m, 0.0, splits, err);
  if (abs_error) *abs_error = err;
  return static_cast<double>(value);
}

std::string verdict_text(SubaddVerdict v) {
  switch (v) {
    case SubaddVerdict::holds:
      return "holds";
    case SubaddVerdict::fails:
      return "fails";
    case SubaddVerdict::inapplicable:
      return "inapplicable";
  }
  return "inapplicable";
}

SubaddReport tail_subadditivity_check(const DistortionFn& g, const JointModel& j,
                                      double alpha, std::size_t mc_n,
                                      std::uint64_t seed) {
  if (j.dim() != 2)
    throw std::invalid_argument("tail_subadditivity_check needs a bivariate joint");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("tail_subadditivity_check needs alpha in (0,1)");

  SubaddReport rep;
  std::vector<std::array<double, 3>> cells;  // (x, y, p)
  if (j.sum_exact()) {
    rep.s_x = tail_threshold(j.marginals()[0], alpha);
    rep.s_y = tail_threshold(j.marginals()[1], alpha);
    rep.s_sum = tail_threshold(j.sum_distribution(), alpha);
    cells = j.component_cells();
  } else {
    if (mc_n == 0)
      throw unsupported_error(
          "tail_subadditivity_check: this joint needs Monte Carlo (mc_n > 0)");
    auto comps = j.sample_components(mc_n, seed);
    std::vector<double> sums(mc_n);
    for (std::size_t i = 0; i < mc_n; ++i) sums[i] = comps[0][i] + comps[1][i];
    rep.used_monte_carlo = true;
    rep.s_x = tail_threshold(Distribution::empirical(comps[0]), alpha);
    rep.s_y = tail_threshold(Distribution::empirical(comps[1]), alpha);
    rep.s_sum = tail_threshold(Distribution::empirical(sums), alpha);
    const double w = 1.0 / static_cast<double>(mc_n);
    cells.reserve(mc_n);
    for (std::size_t i = 0; i < mc_n; ++i)
      cells.push_back({comps[0][i], comps[1][i], w});
  }
  rep.m_alpha = std::max({rep.s_x, rep.s_y, rep.s_sum});

  // Restrict every risk to the common tail event: outcomes where any of the
  // three thresholds is not strictly exceeded contribute the value 0.
  std::vector<double> xs, ys, ss, ps;
  double p_event = 0.0;
  for (const auto& c : cells) {
    if (c[2] <= 0.0) continue;
    if (c[0] > rep.s_x && c[1] > rep.s_y && c[0] + c[1] > rep.s_sum) {
      xs.push_back(c[0]);
      ys.push_back(c[1]);
      ss.push_back(c[0] + c[1]);
      ps.push_back(c[2]);
      p_event += c[2];
    }
  }
  if (p_event <= kProbTol) {
    rep.verdict = SubaddVerdict::inapplicable;
    return rep;
  }
  const double p_rest = 1.0 - p_event;
  if (p_rest > 0.0) {
    xs.push_back(0.0);
    ys.push_back(0.0);
    ss.push_back(0.0);
    ps.push_back(p_rest);
  }
  rep.lhs = choquet(g, Distribution::discrete(ss, ps)).value;
  rep.rhs = choquet(g, Distribution::discrete(xs, ps)).value +
            choquet(g, Distribution::discrete(ys, ps)).value;
  rep.verdict = rep.lhs <= rep.rhs + kHoldsTol ? SubaddVerdict::holds
                                               : SubaddVerdict::fails;
  return rep;
}

}  // namespace distort
