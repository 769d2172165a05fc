#include "distort/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "distort/format.hpp"
#include "distort/quadrature.hpp"
#include "distort/special.hpp"

namespace distort {

namespace {

constexpr double kJumpTiny = 1e-15;

// Smallest u with f(u) >= v. Assumes f nondecreasing with f(1) >= v.
double preimage_geq(const DistortionFn& f, double v) {
  if (f(0.0) >= v) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 100; ++i) {
    double m = 0.5 * (lo + hi);
    if (f(m) >= v)
      hi = m;
    else
      lo = m;
  }
  return hi;
}

// Largest u with f(u) <= v. Assumes f nondecreasing with f(0) <= v.
double preimage_leq(const DistortionFn& f, double v) {
  if (f(1.0) <= v) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 100; ++i) {
    double m = 0.5 * (lo + hi);
    if (f(m) <= v)
      lo = m;
    else
      hi = m;
  }
  return lo;
}

std::vector<double> merge_kinks(std::vector<double> ks) {
  std::sort(ks.begin(), ks.end());
  std::vector<double> out;
  for (double k : ks) {
    if (k < 0.0 || k > 1.0) continue;
    if (out.empty() || k - out.back() > 1e-13) out.push_back(k);
  }
  return out;
}

DistortionFn relabel(const DistortionFn& g, std::string label) {
  auto eval = [g](double u) { return g(u); };
  std::function<double(double)> den;
  if (g.has_density()) den = [g](double u) { return g.density(u); };
  return DistortionFn(std::move(label), eval, g.jumps(), den, g.kinks(),
                      g.shape_hint());
}

}  // namespace

DistortionFn::DistortionFn(std::string label,
                           std::function<double(double)> eval,
                           std::vector<Jump> jumps,
                           std::function<double(double)> ac_density,
                           std::vector<double> kinks, Shape shape_hint)
    : label_(std::move(label)),
      eval_(std::move(eval)),
      jumps_(std::move(jumps)),
      density_(std::move(ac_density)),
      kinks_(merge_kinks(std::move(kinks))),
      hint_(shape_hint) {
  if (!eval_) throw std::invalid_argument("distortion: missing evaluator");
  std::sort(jumps_.begin(), jumps_.end(),
            [](const Jump& a, const Jump& b) { return a.location < b.location; });
  std::vector<Jump> kept;
  for (const Jump& j : jumps_) {
    if (j.height <= kJumpTiny) continue;
    if (!(j.location >= 0.0 && j.location <= 1.0))
      throw std::invalid_argument("distortion: jump location outside [0,1]");
    if (!(j.attained >= 0.0 && j.attained <= 1.0))
      throw std::invalid_argument("distortion: jump attained outside [0,1]");
    if (j.location == 0.0 && j.attained > 1e-9)
      throw std::invalid_argument("distortion: jump at 0 must have attained 0");
    if (j.location == 1.0 && j.attained < 1.0 - 1e-9)
      throw std::invalid_argument("distortion: jump at 1 must have attained 1");
    if (!kept.empty() && j.location - kept.back().location <= 1e-13)
      throw std::invalid_argument("distortion: duplicate jump location");
    kept.push_back(j);
  }
  jumps_ = std::move(kept);

  if (std::fabs(eval_(0.0)) > 1e-12)
    throw std::invalid_argument("distortion: g(0) must be 0");
  if (std::fabs(eval_(1.0) - 1.0) > 1e-12)
    throw std::invalid_argument("distortion: g(1) must be 1");
  double prev = 0.0;
  for (int i = 1; i <= 10000; ++i) {
    double v = eval_(i / 10000.0);
    if (v < prev - 1e-12)
      throw std::invalid_argument("distortion: not nondecreasing");
    prev = std::max(prev, v);
  }
}

const Jump* DistortionFn::jump_at(double u) const {
  for (const Jump& j : jumps_) {
    if (std::fabs(j.location - u) <= 1e-13) return &j;
    if (j.location > u + 1e-13) break;
  }
  return nullptr;
}

double DistortionFn::left_limit(double u) const {
  if (u <= 0.0) return eval_(0.0);
  if (const Jump* j = jump_at(u)) return eval_(u) - j->attained * j->height;
  return eval_(u);
}

double DistortionFn::right_limit(double u) const {
  if (u >= 1.0) return eval_(1.0);
  if (const Jump* j = jump_at(u))
    return eval_(u) + (1.0 - j->attained) * j->height;
  return eval_(u);
}

// ---- catalog ----

DistortionFn identity_distortion() {
  return DistortionFn("identity", [](double u) { return u; }, {},
                      [](double) { return 1.0; }, {}, Shape::concave);
}

DistortionFn var_distortion(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("var distortion: p must lie in (0,1)");
  double t = 1.0 - p;
  return DistortionFn("var:" + fmt_num(p),
                      [t](double u) { return u > t ? 1.0 : 0.0; },
                      {{t, 1.0, 0.0}}, [](double) { return 0.0; }, {t},
                      Shape::neither);
}

DistortionFn tvar_distortion(double p) {
  if (!(p >= 0.0 && p < 1.0))
    throw std::domain_error("tvar distortion: p must lie in [0,1)");
  double t = 1.0 - p;
  return DistortionFn(
      "tvar:" + fmt_num(p),
      [t](double u) { return std::min(u / t, 1.0); }, {},
      [t](double u) { return u < t ? 1.0 / t : 0.0; },
      p > 0.0 ? std::vector<double>{t} : std::vector<double>{},
      Shape::concave);
}

DistortionFn power_distortion(double a) {
  if (!(a > 0.0)) throw std::domain_error("power distortion: a must be > 0");
  return DistortionFn(
      "power:" + fmt_num(a), [a](double u) { return std::pow(u, a); }, {},
      [a](double u) { return a * std::pow(u, a - 1.0); }, {},
      a <= 1.0 ? Shape::concave : Shape::convex);
}

DistortionFn dual_power_distortion(double b) {
  if (!(b > 0.0))
    throw std::domain_error("dual power distortion: b must be > 0");
  return DistortionFn(
      "dualpower:" + fmt_num(b),
      [b](double u) { return 1.0 - std::pow(1.0 - u, b); }, {},
      [b](double u) { return b * std::pow(1.0 - u, b - 1.0); }, {},
      b >= 1.0 ? Shape::concave : Shape::convex);
}

DistortionFn wang_distortion(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("wang distortion: p must lie in (0,1)");
  double lam = normal_quantile(p);
  return DistortionFn(
      "wang:" + fmt_num(p),
      [lam](double u) {
        if (u <= 0.0) return 0.0;
        if (u >= 1.0) return 1.0;
        return normal_cdf(normal_quantile(u) + lam);
      },
      {},
      [lam](double u) {
        return std::exp(-lam * normal_quantile(u) - 0.5 * lam * lam);
      },
      {}, p >= 0.5 ? Shape::concave : Shape::convex);
}

DistortionFn lookback_distortion(double p) {
  if (!(p > 0.0 && p <= 1.0))
    throw std::domain_error("lookback distortion: p must lie in (0,1]");
  return DistortionFn(
      "lookback:" + fmt_num(p),
      [p](double u) {
        if (u <= 0.0) return 0.0;
        if (u >= 1.0) return 1.0;
        return std::pow(u, p) * (1.0 - p * std::log(u));
      },
      {},
      [p](double u) { return -p * p * std::pow(u, p - 1.0) * std::log(u); },
      {}, Shape::concave);
}

DistortionFn beta_distortion(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("beta distortion: a and b must be > 0");
  double lnB = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  Shape s = Shape::neither;
  if (a <= 1.0 && b >= 1.0) s = Shape::concave;
  if (a >= 1.0 && b <= 1.0 && s == Shape::neither) s = Shape::convex;
  return DistortionFn(
      "beta:" + fmt_num(a) + "," + fmt_num(b),
      [a, b](double u) { return reg_inc_beta(a, b, u); }, {},
      [a, b, lnB](double u) {
        return std::exp((a - 1.0) * std::log(u) + (b - 1.0) * std::log1p(-u) -
                        lnB);
      },
      {}, s);
}

DistortionFn glue_distortion(double h1, double h2, double alpha, double beta) {
  if (!(alpha >= 0.0 && alpha <= beta && beta < 1.0))
    throw std::domain_error("glue distortion: need 0 <= alpha <= beta < 1");
  if (!(h1 >= 0.0 && h1 <= h2 && h2 <= 1.0))
    throw std::domain_error("glue distortion: need 0 <= h1 <= h2 <= 1");
  if (alpha == beta && h1 != h2)
    throw std::domain_error("glue distortion: alpha == beta requires h1 == h2");
  double ua = 1.0 - alpha, ub = 1.0 - beta;
  double s1 = h1 / ub;
  double s2 = beta > alpha ? (h2 - h1) / (beta - alpha) : 0.0;
  auto eval = [h1, ua, ub, s1, s2](double u) {
    if (u >= ua) return 1.0;
    if (u < ub) return s1 * u;
    return h1 + s2 * (u - ub);
  };
  std::vector<Jump> js;
  if (1.0 - h2 > kJumpTiny) js.push_back({ua, 1.0 - h2, 1.0});
  auto den = [ua, ub, s1, s2](double u) {
    if (u < ub) return s1;
    if (u < ua) return s2;
    return 0.0;
  };
  Shape hint = (1.0 - h2 <= kJumpTiny && s1 >= s2) ? Shape::concave
                                                   : Shape::neither;
  return DistortionFn("glue:" + fmt_num(h1) + "," + fmt_num(h2) + "," +
                          fmt_num(alpha) + "," + fmt_num(beta),
                      eval, std::move(js), den, {ub, ua}, hint);
}

GlueWeights glue_mixture_weights(double h1, double h2, double alpha,
                                 double beta) {
  if (!(alpha >= 0.0 && alpha <= beta && beta < 1.0))
    throw std::domain_error("glue weights: need 0 <= alpha <= beta < 1");
  double s2 = beta > alpha ? (h2 - h1) / (beta - alpha) : 0.0;
  return {h1 - (1.0 - beta) * s2, (1.0 - alpha) * s2, 1.0 - h2};
}

bool glue_concave_on_tail(double h1, double h2, double alpha, double beta) {
  double s1 = h1 / (1.0 - beta);
  double s2 = beta > alpha ? (h2 - h1) / (beta - alpha) : 0.0;
  return s1 >= s2 - 1e-12;
}

// ---- combinators ----

DistortionFn dual(const DistortionFn& g) {
  auto eval = [g](double q) { return 1.0 - g(1.0 - q); };
  std::vector<Jump> js;
  for (const Jump& j : g.jumps())
    js.push_back({1.0 - j.location, j.height, 1.0 - j.attained});
  std::function<double(double)> den;
  if (g.has_density()) den = [g](double q) { return g.density(1.0 - q); };
  std::vector<double> ks;
  for (double k : g.kinks()) ks.push_back(1.0 - k);
  Shape s = Shape::unknown;
  if (g.shape_hint() == Shape::concave) s = Shape::convex;
  if (g.shape_hint() == Shape::convex) s = Shape::concave;
  return DistortionFn("dual(" + g.label() + ")", eval, std::move(js), den,
                      std::move(ks), s);
}

DistortionFn compose(const DistortionFn& outer, const DistortionFn& inner) {
  const DistortionFn& g1 = outer;
  const DistortionFn& g2 = inner;
  auto eval = [g1, g2](double u) { return g1(g2(u)); };

  // Discontinuities sit where the inner map jumps or where it reaches the
  // level of an outer jump; collect candidates and measure each from its
  // one-sided limits.
  std::vector<double> cand;
  for (const Jump& j : g2.jumps()) cand.push_back(j.location);
  for (const Jump& j : g1.jumps()) {
    cand.push_back(preimage_geq(g2, j.location));
    cand.push_back(preimage_leq(g2, j.location));
  }
  std::sort(cand.begin(), cand.end());
  std::vector<double> locs;
  for (double c0 : cand) {
    double u0 = std::clamp(c0, 0.0, 1.0);
    if (locs.empty() || u0 - locs.back() > 5e-13) locs.push_back(u0);
  }
  std::vector<Jump> js;
  for (double u0 : locs) {
    double L, R;
    if (u0 <= 0.0) {
      L = g1(g2(0.0));
    } else {
      double gl = g2.left_limit(u0);
      // A flat approach attains the level, a strict approach does not; our
      // builders produce exact flats so the probe comparison is reliable.
      bool flat = g2(std::max(0.0, u0 - 1e-9)) == gl;
      L = flat ? g1(gl) : g1.left_limit(gl);
    }
    if (u0 >= 1.0) {
      R = g1(g2(1.0));
    } else {
      double gr = g2.right_limit(u0);
      bool flat = g2(std::min(1.0, u0 + 1e-9)) == gr;
      R = flat ? g1(gr) : g1.right_limit(gr);
    }
    double h = R - L;
    if (h <= kJumpTiny) continue;
    double V = g1(g2(u0));
    js.push_back({u0, h, std::clamp((V - L) / h, 0.0, 1.0)});
  }

  std::function<double(double)> den;
  if (g1.has_density() && g2.has_density())
    den = [g1, g2](double u) { return g1.density(g2(u)) * g2.density(u); };

  std::vector<double> ks = g2.kinks();
  for (const Jump& j : js) ks.push_back(j.location);
  for (double k : g1.kinks()) ks.push_back(preimage_geq(g2, k));

  Shape s = Shape::unknown;
  if (g1.shape_hint() == Shape::concave && g2.shape_hint() == Shape::concave)
    s = Shape::concave;
  if (g1.shape_hint() == Shape::convex && g2.shape_hint() == Shape::convex)
    s = Shape::convex;

  return DistortionFn("compose(" + g1.label() + "," + g2.label() + ")", eval,
                      std::move(js), den, std::move(ks), s);
}

DistortionFn compose_chain(const std::vector<DistortionFn>& gs) {
  if (gs.empty()) throw std::invalid_argument("compose_chain: empty chain");
  DistortionFn f = gs.front();
  for (std::size_t i = 1; i < gs.size(); ++i) f = compose(f, gs[i]);
  return f;
}

DistortionFn tail_distortion(const DistortionFn& g, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("tail distortion: p must lie in (0,1)");
  DistortionFn c = compose(g, tvar_distortion(p));
  return relabel(c, "tail(" + g.label() + "," + fmt_num(p) + ")");
}

DistortionFn mix_finite(
    const std::vector<std::pair<double, DistortionFn>>& terms) {
  if (terms.empty()) throw std::invalid_argument("mix: no terms");
  auto parts =
      std::make_shared<std::vector<std::pair<double, DistortionFn>>>();
  long double tot = 0.0L;
  for (const auto& [w, g] : terms) {
    if (w < -1e-15) throw std::invalid_argument("mix: negative weight");
    tot += w;
    if (w > 0.0) parts->emplace_back(w, g);
  }
  if (std::fabs(static_cast<double>(tot) - 1.0) > 1e-12)
    throw std::invalid_argument("mix: weights must sum to 1");
  if (parts->empty()) throw std::invalid_argument("mix: all weights zero");

  auto eval = [parts](double u) {
    double acc = 0.0;
    for (const auto& [w, g] : *parts) acc += w * g(u);
    return acc;
  };

  struct JAcc {
    double loc;
    double mass;
    double attained_mass;
  };
  std::vector<JAcc> acc;
  for (const auto& [w, g] : *parts)
    for (const Jump& j : g.jumps()) {
      double h = w * j.height;
      if (h <= kJumpTiny) continue;
      bool merged = false;
      for (JAcc& a : acc)
        if (std::fabs(a.loc - j.location) <= 1e-12) {
          a.mass += h;
          a.attained_mass += j.attained * h;
          merged = true;
          break;
        }
      if (!merged) acc.push_back({j.location, h, j.attained * h});
    }
  std::vector<Jump> js;
  for (const JAcc& a : acc)
    js.push_back({a.loc, a.mass, a.attained_mass / a.mass});

  bool all_den = true;
  for (const auto& [w, g] : *parts) all_den = all_den && g.has_density();
  std::function<double(double)> den;
  if (all_den)
    den = [parts](double u) {
      double acc2 = 0.0;
      for (const auto& [w, g] : *parts) acc2 += w * g.density(u);
      return acc2;
    };

  std::vector<double> ks;
  for (const auto& [w, g] : *parts)
    ks.insert(ks.end(), g.kinks().begin(), g.kinks().end());

  bool all_cv = true, all_cx = true;
  for (const auto& [w, g] : *parts) {
    all_cv = all_cv && g.shape_hint() == Shape::concave;
    all_cx = all_cx && g.shape_hint() == Shape::convex;
  }
  Shape s = all_cv ? Shape::concave : (all_cx ? Shape::convex : Shape::unknown);

  std::string label = "mix(";
  for (std::size_t i = 0; i < parts->size(); ++i) {
    if (i) label += ",";
    label += fmt_num((*parts)[i].first) + "*" + (*parts)[i].second.label();
  }
  label += ")";
  return DistortionFn(std::move(label), eval, std::move(js), den,
                      std::move(ks), s);
}

DistortionFn mix_countable(
    const std::function<std::pair<double, DistortionFn>(int)>& term,
    int max_terms) {
  if (max_terms < 1) throw std::invalid_argument("mix: max_terms < 1");
  std::vector<std::pair<double, DistortionFn>> terms;
  long double cum = 0.0L;
  for (int i = 1; i <= max_terms; ++i) {
    auto [w, g] = term(i);
    if (w < 0.0) throw std::invalid_argument("mix: negative weight");
    terms.emplace_back(w, g);
    cum += w;
    if (cum >= 1.0 - 1e-12) break;
  }
  // Truncation: whatever mass the dropped tail carried goes to the last term.
  terms.back().first += static_cast<double>(1.0L - cum);
  if (terms.back().first < 0.0) terms.back().first = 0.0;
  return mix_finite(terms);
}

DistortionFn mix_parametric(
    const std::function<DistortionFn(double)>& family,
    const std::function<double(double)>& density, double w_lo, double w_hi,
    int quad_order,
    const std::vector<std::pair<double, DistortionFn>>& atoms) {
  if (!(w_lo < w_hi)) throw std::invalid_argument("mix: need w_lo < w_hi");
  if (quad_order < 2) throw std::invalid_argument("mix: quad_order < 2");
  GaussLegendre gl(quad_order);
  double c = 0.5 * (w_lo + w_hi), h = 0.5 * (w_hi - w_lo);
  double atom_mass = 0.0;
  for (const auto& [w, g] : atoms) {
    if (w < 0.0) throw std::invalid_argument("mix: negative atom weight");
    atom_mass += w;
  }
  std::vector<double> nodes(quad_order), nodew(quad_order);
  double node_mass = 0.0;
  for (int i = 0; i < quad_order; ++i) {
    nodes[i] = c + h * gl.nodes()[i];
    double d = density(nodes[i]);
    if (d < -1e-12) throw std::invalid_argument("mix: negative weight density");
    nodew[i] = h * gl.weights()[i] * std::max(0.0, d);
    node_mass += nodew[i];
  }
  if (std::fabs(node_mass + atom_mass - 1.0) > 1e-6)
    throw std::invalid_argument(
        "mix: weight density plus atoms does not integrate to 1");
  // The quadrature is a one-off discretization; rescale its weights so the
  // result is an exact distortion.
  double scale = (1.0 - atom_mass) / node_mass;
  std::vector<std::pair<double, DistortionFn>> terms = atoms;
  for (int i = 0; i < quad_order; ++i)
    if (nodew[i] * scale > 0.0)
      terms.emplace_back(nodew[i] * scale, family(nodes[i]));
  DistortionFn m = mix_finite(terms);
  return relabel(m, "mix_parametric([" + fmt_num(w_lo) + "," + fmt_num(w_hi) +
                        "],order=" + std::to_string(quad_order) + ")");
}

DistortionFn esssup_combo(double lambda, const DistortionFn& g) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::domain_error("esssup combo: lambda must lie in [0,1]");
  if (lambda == 0.0) return g;
  auto eval = [lambda, g](double u) {
    return u <= 0.0 ? 0.0 : lambda + (1.0 - lambda) * g(u);
  };
  double at_zero = lambda;
  std::vector<Jump> js;
  for (const Jump& j : g.jumps()) {
    double h = (1.0 - lambda) * j.height;
    if (h <= kJumpTiny) continue;
    if (j.location == 0.0)
      at_zero += h;
    else
      js.push_back({j.location, h, j.attained});
  }
  js.insert(js.begin(), {0.0, at_zero, 0.0});
  std::function<double(double)> den;
  if (g.has_density())
    den = [lambda, g](double u) { return (1.0 - lambda) * g.density(u); };
  Shape s = g.shape_hint() == Shape::concave ? Shape::concave : Shape::unknown;
  return DistortionFn(
      "esssup(" + fmt_num(lambda) + "," + g.label() + ")", eval,
      std::move(js), den, g.kinks(), s);
}

// ---- spectral form ----

DistortionFn spectral_to_distortion(const SpectralWeight& phi) {
  double atom_mass = 0.0;
  std::vector<std::pair<double, double>> atoms = phi.atoms;
  std::sort(atoms.begin(), atoms.end());
  for (const auto& [loc, m] : atoms) {
    if (loc < 0.0 || loc > 1.0)
      throw std::invalid_argument("spectral: atom location outside [0,1]");
    if (m <= 0.0) throw std::invalid_argument("spectral: atom mass <= 0");
    atom_mass += m;
  }

  // Cumulative of the density part on a panel grid split at the declared
  // breakpoints; composite midpoint avoids evaluating at the kinks themselves.
  auto cum = std::make_shared<std::vector<double>>();
  auto edges = std::make_shared<std::vector<double>>();
  double den_mass = 0.0;
  if (phi.density) {
    const int kPanels = 4000;
    std::vector<double> e;
    e.reserve(kPanels + 8);
    for (int i = 0; i <= kPanels; ++i) e.push_back(i / double(kPanels));
    for (double b : phi.breakpoints)
      if (b > 0.0 && b < 1.0) e.push_back(b);
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end(),
                        [](double a, double b) { return b - a < 1e-15; }),
            e.end());
    edges->assign(e.begin(), e.end());
    cum->resize(edges->size(), 0.0);
    long double acc = 0.0L;
    for (std::size_t i = 1; i < edges->size(); ++i) {
      double a = (*edges)[i - 1], b = (*edges)[i];
      double w = (b - a) / 4.0;
      double piece = 0.0;
      for (int k = 0; k < 4; ++k) {
        double d = phi.density(a + (k + 0.5) * w);
        if (d < -1e-9)
          throw std::invalid_argument("spectral: negative density");
        piece += w * std::max(0.0, d);
      }
      acc += piece;
      (*cum)[i] = static_cast<double>(acc);
    }
    den_mass = cum->back();
  }

  double total = atom_mass + den_mass;
  if (std::fabs(total - 1.0) > 1e-8)
    throw std::invalid_argument("spectral: weights must integrate to 1");
  double scale = den_mass > 0.0 ? (1.0 - atom_mass) / den_mass : 0.0;
  for (double& cval : *cum) cval *= scale;

  auto atomsp = std::make_shared<std::vector<std::pair<double, double>>>(atoms);
  // F(t): mass of [0,t], atoms included right-continuously.
  auto F = [cum, edges, atomsp](double t) {
    double v = 0.0;
    if (!edges->empty()) {
      if (t >= edges->back())
        v = cum->back();
      else if (t > edges->front()) {
        auto it = std::upper_bound(edges->begin(), edges->end(), t);
        std::size_t i = static_cast<std::size_t>(it - edges->begin());
        double a = (*edges)[i - 1], b = (*edges)[i];
        double f = (t - a) / (b - a);
        v = (*cum)[i - 1] + f * ((*cum)[i] - (*cum)[i - 1]);
      }
    }
    for (const auto& [loc, m] : *atomsp) {
      if (loc <= t)
        v += m;
      else
        break;
    }
    return v;
  };

  auto eval = [F](double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return std::clamp(1.0 - F(1.0 - u), 0.0, 1.0);
  };

  std::vector<Jump> js;
  for (const auto& [loc, m] : atoms) {
    double u0 = 1.0 - loc;
    // F is right-continuous, so g sits at the bottom of the jump except at
    // u = 1 where g(1) = 1 pins it on top.
    js.push_back({u0, m, u0 >= 1.0 ? 1.0 : 0.0});
  }

  std::function<double(double)> den;
  if (phi.density) {
    auto pd = phi.density;
    den = [pd, scale](double u) { return scale * pd(1.0 - u); };
  } else {
    den = [](double) { return 0.0; };
  }

  std::vector<double> ks;
  for (double b : phi.breakpoints) ks.push_back(1.0 - b);
  for (const Jump& j : js) ks.push_back(j.location);

  return DistortionFn("spectral", eval, std::move(js), den, std::move(ks),
                      Shape::unknown);
}

SpectralWeight distortion_to_spectral(const DistortionFn& g) {
  SpectralWeight phi;
  if (g.has_density()) {
    phi.density = [g](double q) { return g.density(1.0 - q); };
  } else {
    // Central difference of g, reflected; adequate away from jumps.
    phi.density = [g](double q) {
      double u = 1.0 - q;
      double h = 1e-6;
      double a = std::max(0.0, u - h), b = std::min(1.0, u + h);
      return (g(b) - g(a)) / (b - a);
    };
  }
  for (const Jump& j : g.jumps())
    phi.atoms.emplace_back(1.0 - j.location, j.height);
  std::sort(phi.atoms.begin(), phi.atoms.end());
  for (double k : g.kinks()) phi.breakpoints.push_back(1.0 - k);
  for (const Jump& j : g.jumps()) phi.breakpoints.push_back(1.0 - j.location);
  std::sort(phi.breakpoints.begin(), phi.breakpoints.end());
  return phi;
}

// ---- shape classification ----

std::string ShapeReport::text() const {
  if (concave_ok && convex_ok) return "linear";
  if (concave_ok) return "concave";
  if (convex_ok) return "convex";
  std::string s = "neither";
  if (!intervals.empty()) {
    s += " [";
    for (std::size_t i = 0; i < intervals.size(); ++i) {
      if (i) s += "; ";
      s += (intervals[i].shape == Shape::concave ? "concave on [" : "convex on [");
      s += fmt_num(intervals[i].lo) + "," + fmt_num(intervals[i].hi) + "]";
    }
    s += "]";
  }
  return s;
}

ShapeReport classify_shape_on(const DistortionFn& g, double lo, double hi,
                              int grid_size) {
  if (grid_size < 4) throw std::invalid_argument("classify: grid too small");
  if (!(lo >= 0.0 && lo < hi && hi <= 1.0))
    throw std::invalid_argument("classify: bad interval");
  const double tol = 1e-9;
  int n = grid_size;
  double h = (hi - lo) / n;
  std::vector<double> v(n + 1);
  for (int i = 0; i <= n; ++i) v[i] = g(lo + i * h);

  ShapeReport rep;
  rep.concave_ok = true;
  rep.convex_ok = true;
  std::vector<int> sign(n - 1, 0);
  for (int i = 1; i < n; ++i) {
    double d = v[i + 1] - 2.0 * v[i] + v[i - 1];
    if (d > tol) {
      rep.concave_ok = false;
      sign[i - 1] = 1;
    } else if (d < -tol) {
      rep.convex_ok = false;
      sign[i - 1] = -1;
    }
  }
  rep.overall = rep.concave_ok
                    ? Shape::concave
                    : (rep.convex_ok ? Shape::convex : Shape::neither);
  if (rep.overall == Shape::neither) {
    // Maximal runs that stay compatible with one curvature sign.
    int i = 0;
    while (i < n - 1) {
      int run_sign = sign[i];
      int j = i;
      while (j < n - 1 && (sign[j] == 0 || run_sign == 0 || sign[j] == run_sign)) {
        if (run_sign == 0) run_sign = sign[j];
        ++j;
      }
      double a = lo + i * h;
      double b = lo + (j + 1) * h;
      rep.intervals.push_back(
          {a, std::min(b, hi),
           run_sign >= 0 ? Shape::convex : Shape::concave});
      i = j;
    }
    // run_sign >= 0 above marks convex cells (positive second differences).
  }
  return rep;
}

ShapeReport classify_shape(const DistortionFn& g, int grid_size) {
  return classify_shape_on(g, 0.0, 1.0, grid_size);
}

}  // namespace distort
