#include "distort/copula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "distort/format.hpp"
#include "distort/rng.hpp"
#include "distort/special.hpp"

namespace distort {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// min/max factoring keeps t^(-theta) sums finite for extreme parameters:
// (u^-t + v^-t - 1)^(-1/t) = m * (1 + (m/M)^t - m^t)^(-1/t) with m = min(u,v).
double archimedean_power_sum(double u, double v, double theta, double outer) {
  double m = std::min(u, v), M = std::max(u, v);
  double inner = 1.0 + std::pow(m / M, theta) - std::pow(m, theta);
  return m * std::pow(inner, outer);
}
}  // namespace

double ArchimedeanGenerator::pseudo_inverse(double t) const {
  if (t <= 0.0) return 1.0;
  if (std::isfinite(psi0) && t >= psi0) return 0.0;
  if (inverse) return std::clamp(inverse(t), 0.0, 1.0);
  double lo = 1e-15, hi = 1.0;
  if (psi(lo) <= t) return lo;
  for (int i = 0; i < 60; ++i) {
    double m = 0.5 * (lo + hi);
    if (psi(m) > t)
      lo = m;
    else
      hi = m;
  }
  return 0.5 * (lo + hi);
}

double ArchimedeanGenerator::derivative(double t) const {
  if (psi_prime) return psi_prime(t);
  double h = 1e-7;
  double a = std::max(1e-12, t - h), b = std::min(1.0, t + h);
  return (psi(b) - psi(a)) / (b - a);
}

// ---- constructors ----

Copula Copula::independence() {
  Copula c;
  c.family_ = Family::independence;
  c.label_ = "independence";
  ArchimedeanGenerator g;
  g.psi = [](double t) { return -std::log(t); };
  g.psi_prime = [](double t) { return -1.0 / t; };
  g.inverse = [](double s) { return std::exp(-s); };
  g.psi0 = kInf;
  c.gen_ = std::move(g);
  return c;
}

Copula Copula::comonotone() {
  Copula c;
  c.family_ = Family::comonotone;
  c.label_ = "comonotone";
  return c;
}

Copula Copula::countermonotone() {
  Copula c;
  c.family_ = Family::countermonotone;
  c.label_ = "countermonotone";
  return c;
}

Copula Copula::clayton(double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("clayton: alpha must be > 0");
  Copula c;
  c.family_ = Family::clayton;
  c.a_ = alpha;
  c.label_ = "clayton:" + fmt_num(alpha);
  ArchimedeanGenerator g;
  g.psi = [alpha](double t) { return (std::pow(t, -alpha) - 1.0) / alpha; };
  g.psi_prime = [alpha](double t) { return -std::pow(t, -alpha - 1.0); };
  g.inverse = [alpha](double s) {
    return std::pow(1.0 + alpha * s, -1.0 / alpha);
  };
  g.psi0 = kInf;
  c.gen_ = std::move(g);
  return c;
}

Copula Copula::frank(double alpha) {
  if (alpha == 0.0 || !std::isfinite(alpha))
    throw std::domain_error("frank: alpha must be finite and nonzero");
  Copula c;
  c.family_ = Family::frank;
  c.a_ = alpha;
  c.label_ = "frank:" + fmt_num(alpha);
  ArchimedeanGenerator g;
  g.psi = [alpha](double t) {
    return -std::log(std::expm1(-alpha * t) / std::expm1(-alpha));
  };
  g.psi_prime = [alpha](double t) {
    double a = std::expm1(-alpha * t);
    return alpha * (a + 1.0) / a;
  };
  g.inverse = [alpha](double s) {
    return -std::log1p(std::expm1(-alpha) * std::exp(-s)) / alpha;
  };
  g.psi0 = kInf;
  c.gen_ = std::move(g);
  return c;
}

Copula Copula::pareto_survival(double alpha) {
  if (!(alpha > 0.0))
    throw std::domain_error("pareto survival copula: alpha must be > 0");
  Copula c;
  c.family_ = Family::pareto_survival;
  c.a_ = alpha;
  c.label_ = "paretosurvival:" + fmt_num(alpha);
  ArchimedeanGenerator g;
  g.psi = [alpha](double t) { return std::pow(t, -1.0 / alpha) - 1.0; };
  g.psi_prime = [alpha](double t) {
    return -std::pow(t, -1.0 / alpha - 1.0) / alpha;
  };
  g.inverse = [alpha](double s) { return std::pow(1.0 + s, -alpha); };
  g.psi0 = kInf;
  c.gen_ = std::move(g);
  return c;
}

Copula Copula::amh(double alpha) {
  if (!(alpha >= -1.0 && alpha < 1.0))
    throw std::domain_error("amh: alpha must lie in [-1,1)");
  Copula c;
  c.family_ = Family::amh;
  c.a_ = alpha;
  c.label_ = "amh:" + fmt_num(alpha);
  ArchimedeanGenerator g;
  g.psi = [alpha](double t) {
    return std::log1p(alpha * (t - 1.0)) - std::log(t);
  };
  g.psi_prime = [alpha](double t) {
    return alpha / (1.0 + alpha * (t - 1.0)) - 1.0 / t;
  };
  g.inverse = [alpha](double s) {
    return (1.0 - alpha) / (std::exp(s) - alpha);
  };
  g.psi0 = kInf;
  c.gen_ = std::move(g);
  return c;
}

Copula Copula::gumbel_hougaard(double alpha) {
  if (!(alpha >= 1.0))
    throw std::domain_error("gumbel-hougaard: alpha must be >= 1");
  Copula c;
  c.family_ = Family::gumbel_hougaard;
  c.a_ = alpha;
  c.label_ = "gumbel:" + fmt_num(alpha);
  ArchimedeanGenerator g;
  g.psi = [alpha](double t) { return std::pow(-std::log(t), alpha); };
  g.psi_prime = [alpha](double t) {
    return -alpha * std::pow(-std::log(t), alpha - 1.0) / t;
  };
  g.inverse = [alpha](double s) {
    return std::exp(-std::pow(s, 1.0 / alpha));
  };
  g.psi0 = kInf;
  c.gen_ = std::move(g);
  return c;
}

Copula Copula::fgm(double alpha) {
  if (!(alpha >= -1.0 && alpha <= 1.0))
    throw std::domain_error("fgm: alpha must lie in [-1,1]");
  Copula c;
  c.family_ = Family::fgm;
  c.a_ = alpha;
  c.label_ = "fgm:" + fmt_num(alpha);
  return c;
}

Copula Copula::marshall_olkin(double a, double b) {
  if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0))
    throw std::domain_error("marshall-olkin: parameters must lie in [0,1]");
  Copula c;
  c.family_ = Family::marshall_olkin;
  c.a_ = a;
  c.b_ = b;
  c.label_ = "marshallolkin:" + fmt_num(a) + "," + fmt_num(b);
  return c;
}

Copula Copula::gaussian(double rho) {
  if (!(rho > -1.0 && rho < 1.0))
    throw std::domain_error("gaussian copula: rho must lie in (-1,1)");
  Copula c;
  c.family_ = Family::gaussian;
  c.a_ = rho;
  c.label_ = "gaussian:" + fmt_num(rho);
  return c;
}

Copula Copula::archimedean(ArchimedeanGenerator gen, std::string label) {
  if (!gen.psi) throw std::invalid_argument("archimedean: missing psi");
  if (std::fabs(gen.psi(1.0)) > 1e-9)
    throw std::invalid_argument("archimedean: psi(1) must be 0");
  Copula c;
  c.family_ = Family::custom_archimedean;
  c.gen_ = std::move(gen);
  c.label_ = std::move(label);
  return c;
}

// ---- evaluation ----

double Copula::operator()(double u, double v) const {
  u = std::clamp(u, 0.0, 1.0);
  v = std::clamp(v, 0.0, 1.0);
  if (u == 0.0 || v == 0.0) return 0.0;
  if (u == 1.0) return v;
  if (v == 1.0) return u;
  switch (family_) {
    case Family::independence:
      return u * v;
    case Family::comonotone:
      return std::min(u, v);
    case Family::countermonotone:
      return std::max(u + v - 1.0, 0.0);
    case Family::clayton:
      return archimedean_power_sum(u, v, a_, -1.0 / a_);
    case Family::frank:
      return -std::log1p(std::expm1(-a_ * u) * std::expm1(-a_ * v) /
                         std::expm1(-a_)) /
             a_;
    case Family::pareto_survival:
      return archimedean_power_sum(u, v, 1.0 / a_, -a_);
    case Family::amh:
      return u * v / (1.0 - a_ * (1.0 - u) * (1.0 - v));
    case Family::gumbel_hougaard: {
      double su = std::pow(-std::log(u), a_);
      double sv = std::pow(-std::log(v), a_);
      return std::exp(-std::pow(su + sv, 1.0 / a_));
    }
    case Family::fgm:
      return u * v * (1.0 + a_ * (1.0 - u) * (1.0 - v));
    case Family::marshall_olkin:
      return std::min(std::pow(u, 1.0 - a_) * v, u * std::pow(v, 1.0 - b_));
    case Family::gaussian:
      return bivariate_normal_cdf(normal_quantile(u), normal_quantile(v), a_);
    default:
      return gen_->pseudo_inverse(gen_->psi(u) + gen_->psi(v));
  }
}

double Copula::conditional(double u, double v) const {
  if (!(u > 0.0 && u < 1.0))
    throw std::domain_error("conditional: u must lie in (0,1)");
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return 1.0;
  switch (family_) {
    case Family::independence:
      return v;
    case Family::comonotone:
      return v >= u ? 1.0 : 0.0;
    case Family::countermonotone:
      return v >= 1.0 - u ? 1.0 : 0.0;
    case Family::clayton: {
      double C = (*this)(u, v);
      return std::pow(C / u, a_ + 1.0);
    }
    case Family::frank: {
      double A = std::expm1(-a_ * u);
      double B = std::expm1(-a_ * v);
      double D = std::expm1(-a_);
      return (A + 1.0) * B / (D + A * B);
    }
    case Family::pareto_survival: {
      double C = (*this)(u, v);
      return std::pow(C / u, (a_ + 1.0) / a_);
    }
    case Family::gumbel_hougaard: {
      double C = (*this)(u, v);
      return (C / u) *
             std::pow(std::log(u) / std::log(C), a_ - 1.0);
    }
    case Family::fgm:
      return v + a_ * v * (1.0 - v) * (1.0 - 2.0 * u);
    case Family::marshall_olkin: {
      if (a_ == 0.0) return v;
      if (b_ == 0.0) return v;
      double vstar = std::pow(u, a_ / b_);
      if (v < vstar) return (1.0 - a_) * std::pow(u, -a_) * v;
      return std::pow(v, 1.0 - b_);
    }
    case Family::gaussian: {
      double x = normal_quantile(u), y = normal_quantile(v);
      return normal_cdf((y - a_ * x) / std::sqrt(1.0 - a_ * a_));
    }
    default: {
      // For any Archimedean family dC/du = psi'(u)/psi'(C(u,v)).
      double C = (*this)(u, v);
      return gen_->derivative(u) / gen_->derivative(C);
    }
  }
}

double Copula::conditional_inverse(double u, double t) const {
  if (!(u > 0.0 && u < 1.0))
    throw std::domain_error("conditional_inverse: u must lie in (0,1)");
  t = std::clamp(t, 0.0, 1.0);
  if (t == 0.0) return 0.0;
  if (t == 1.0) return 1.0;
  switch (family_) {
    case Family::independence:
      return t;
    case Family::comonotone:
      return u;  // the conditional law is the point mass at u
    case Family::countermonotone:
      return 1.0 - u;
    case Family::clayton: {
      double A = std::pow(t, -a_ / (1.0 + a_));
      double lnB = -a_ * std::log(u);
      if (lnB < 650.0)
        return std::pow((A - 1.0) * std::exp(lnB) + 1.0, -1.0 / a_);
      return std::exp(-(std::log(A - 1.0) + lnB) / a_);
    }
    case Family::frank: {
      double A = std::expm1(-a_ * u);
      double D = std::expm1(-a_);
      double B = t * D / (1.0 + A * (1.0 - t));
      return -std::log1p(B) / a_;
    }
    case Family::pareto_survival: {
      double A = std::pow(t, -1.0 / (1.0 + a_));
      double lnB = -std::log(u) / a_;
      if (lnB < 650.0)
        return std::pow((A - 1.0) * std::exp(lnB) + 1.0, -a_);
      return std::exp(-a_ * (std::log(A - 1.0) + lnB));
    }
    case Family::fgm: {
      double a = a_ * (1.0 - 2.0 * u);
      if (std::fabs(a) < 1e-9) return t;
      double disc = (1.0 + a) * (1.0 + a) - 4.0 * a * t;
      return ((1.0 + a) - std::sqrt(disc)) / (2.0 * a);
    }
    case Family::gaussian: {
      double x = normal_quantile(u);
      double y = a_ * x + std::sqrt(1.0 - a_ * a_) * normal_quantile(t);
      return normal_cdf(y);
    }
    default: {
      double lo = 0.0, hi = 1.0;
      for (int i = 0; i < 100 && hi - lo > 1e-10; ++i) {
        double m = 0.5 * (lo + hi);
        if (conditional(u, m) < t)
          lo = m;
        else
          hi = m;
      }
      return 0.5 * (lo + hi);
    }
  }
}

std::vector<std::pair<double, double>> Copula::sample_pairs(
    std::size_t n, std::uint64_t seed) const {
  std::vector<std::pair<double, double>> out;
  out.reserve(n);
  std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  for (std::size_t c = 0; c < chunks; ++c) {
    std::mt19937_64 gen(derive_seed(seed, c));
    std::size_t m = std::min(kSampleChunk, n - c * kSampleChunk);
    for (std::size_t i = 0; i < m; ++i) {
      double u = uniform01(gen);
      double t = uniform01(gen);
      out.emplace_back(u, conditional_inverse(u, t));
    }
  }
  return out;
}

// ---- derived distortions ----

DistortionFn derived_distortion(const Copula& c, double v, Side side) {
  if (!(v > 0.0 && v <= 1.0))
    throw std::domain_error("derived distortion: v must lie in (0,1]");
  auto eval = [c, v, side](double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    double C = side == Side::first ? c(u, v) : c(v, u);
    return std::min(C / v, 1.0);
  };

  std::vector<double> kinks;
  switch (c.family()) {
    case Copula::Family::comonotone:
      kinks.push_back(v);
      break;
    case Copula::Family::countermonotone:
      kinks.push_back(1.0 - v);
      break;
    case Copula::Family::marshall_olkin: {
      double a = c.param1(), b = c.param2();
      double num = side == Side::first ? b : a;
      double den = side == Side::first ? a : b;
      if (den > 0.0) {
        double k = std::pow(v, num / den);
        if (k > 0.0 && k < 1.0) kinks.push_back(k);
      }
      break;
    }
    default:
      break;
  }

  Shape s = Shape::unknown;
  double a = c.param1();
  switch (c.family()) {
    case Copula::Family::independence:
    case Copula::Family::comonotone:
    case Copula::Family::clayton:
    case Copula::Family::pareto_survival:
    case Copula::Family::marshall_olkin:
      s = Shape::concave;
      break;
    case Copula::Family::countermonotone:
      s = Shape::convex;
      break;
    case Copula::Family::frank:
      s = a > 0.0 ? Shape::concave : Shape::convex;
      break;
    case Copula::Family::amh:
    case Copula::Family::fgm:
    case Copula::Family::gaussian:
      s = a >= 0.0 ? Shape::concave : Shape::convex;
      break;
    case Copula::Family::gumbel_hougaard:
      s = a <= 2.0 ? Shape::concave : Shape::neither;
      break;
    default:
      break;
  }

  std::string label = "copula(" + c.label() + ",v=" + fmt_num(v);
  if (side == Side::second) label += ",side=second";
  label += ")";
  return DistortionFn(std::move(label), eval, {}, nullptr, std::move(kinks), s);
}

GeneratorConcavity generator_reciprocal_concavity(
    const ArchimedeanGenerator& gen, int grid) {
  if (grid < 8) throw std::invalid_argument("generator concavity: grid too small");
  if (std::isfinite(gen.psi0))
    throw std::domain_error(
        "generator concavity: criterion requires a strict generator "
        "(psi(0+) = +inf)");
  double lo = 1e-3, hi = 1.0 - 1e-3;
  double h = (hi - lo) / (grid - 1);
  std::vector<double> f(grid);
  for (int i = 0; i < grid; ++i) f[i] = 1.0 / gen.derivative(lo + i * h);
  for (int i = 1; i + 1 < grid; ++i) {
    double d = f[i + 1] - 2.0 * f[i] + f[i - 1];
    if (d > 1e-9) return GeneratorConcavity::not_concave;
  }
  return GeneratorConcavity::concave;
}

}  // namespace distort
