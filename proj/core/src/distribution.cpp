#include "distort/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "distort/errors.hpp"
#include "distort/format.hpp"
#include "distort/special.hpp"

namespace distort {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sort (value, prob) pairs and merge values closer than 1e-12. The merged
// value is the probability-weighted mean, so first moments survive merging.
void sort_merge(std::vector<double>& xs, std::vector<double>& ps) {
  std::vector<std::size_t> idx(xs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> vx, vp;
  vx.reserve(xs.size());
  vp.reserve(xs.size());
  for (std::size_t k : idx) {
    if (ps[k] <= 0.0) continue;
    if (!vx.empty() && xs[k] - vx.back() <= 1e-12) {
      // Nudge toward the incoming value by its weight share; equal values
      // merge without any rounding drift.
      double w = vp.back() + ps[k];
      vx.back() += (xs[k] - vx.back()) * (ps[k] / w);
      vp.back() = w;
    } else {
      vx.push_back(xs[k]);
      vp.push_back(ps[k]);
    }
  }
  xs = std::move(vx);
  ps = std::move(vp);
}

std::string atoms_label(const std::vector<double>& xs,
                        const std::vector<double>& ps) {
  if (xs.size() > 64) return "discrete(n=" + std::to_string(xs.size()) + ")";
  std::string s = "discrete:";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ",";
    s += fmt_num(xs[i]) + ":" + fmt_num(ps[i]);
  }
  return s;
}

}  // namespace

void Distribution::build_atom_tables() {
  cum_.resize(atoms_.size());
  surv_.resize(atoms_.size());
  long double acc = 0.0L;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    acc += probs_[i];
    cum_[i] = std::min<double>(1.0, static_cast<double>(acc));
  }
  cum_.back() = 1.0;
  acc = 0.0L;
  for (std::size_t i = atoms_.size(); i-- > 0;) {
    surv_[i] = std::min<double>(1.0, static_cast<double>(acc));
    acc += probs_[i];
  }
}

Distribution Distribution::discrete(std::vector<double> atoms,
                                    std::vector<double> probs) {
  if (atoms.size() != probs.size())
    throw std::invalid_argument("discrete: atoms/probs size mismatch");
  if (atoms.empty()) throw std::invalid_argument("discrete: empty support");
  long double tot = 0.0L;
  for (double p : probs) {
    if (p < -kProbTol)
      throw std::invalid_argument("discrete: negative probability");
    tot += std::max(0.0, p);
  }
  if (std::fabs(static_cast<double>(tot) - 1.0) > kProbTol)
    throw std::invalid_argument("discrete: probabilities must sum to 1");
  for (double x : atoms)
    if (!std::isfinite(x))
      throw std::invalid_argument("discrete: non-finite atom");
  sort_merge(atoms, probs);
  Distribution d;
  d.kind_ = Kind::Discrete;
  d.atoms_ = std::move(atoms);
  d.probs_ = std::move(probs);
  d.build_atom_tables();
  d.label_ = atoms_label(d.atoms_, d.probs_);
  return d;
}

Distribution Distribution::empirical(std::vector<double> samples,
                                     std::string label) {
  if (samples.empty()) throw std::invalid_argument("empirical: no samples");
  for (double x : samples)
    if (!std::isfinite(x))
      throw std::invalid_argument("empirical: non-finite sample");
  std::sort(samples.begin(), samples.end());
  Distribution d;
  d.kind_ = Kind::Empirical;
  d.samples_ = std::move(samples);
  d.label_ = label.empty()
                 ? "empirical(n=" + std::to_string(d.samples_.size()) + ")"
                 : std::move(label);
  return d;
}

Distribution Distribution::uniform(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("uniform: need finite a < b");
  Distribution d;
  d.family_ = Family::Uniform;
  d.p1_ = a;
  d.p2_ = b;
  d.label_ = "uniform:" + fmt_num(a) + "," + fmt_num(b);
  return d;
}

Distribution Distribution::bernoulli(double q) {
  if (!(q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("bernoulli: q must lie in [0,1]");
  Distribution d;
  d.family_ = Family::Bernoulli;
  d.p1_ = q;
  if (q < 1.0) {
    d.atoms_.push_back(0.0);
    d.probs_.push_back(1.0 - q);
  }
  if (q > 0.0) {
    d.atoms_.push_back(1.0);
    d.probs_.push_back(q);
  }
  d.build_atom_tables();
  d.label_ = "bernoulli:" + fmt_num(q);
  return d;
}

Distribution Distribution::pareto(double alpha, double scale) {
  if (!(alpha > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("pareto: alpha and scale must be positive");
  Distribution d;
  d.family_ = Family::Pareto;
  d.p1_ = alpha;
  d.p2_ = scale;
  d.label_ = "pareto:" + fmt_num(alpha) + "," + fmt_num(scale);
  return d;
}

Distribution Distribution::exponential(double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("exponential: rate must be positive");
  Distribution d;
  d.family_ = Family::Exponential;
  d.p1_ = lambda;
  d.label_ = "exponential:" + fmt_num(lambda);
  return d;
}

Distribution Distribution::lognormal(double mu, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(mu))
    throw std::invalid_argument("lognormal: need finite mu, sigma > 0");
  Distribution d;
  d.family_ = Family::Lognormal;
  d.p1_ = mu;
  d.p2_ = sigma;
  d.label_ = "lognormal:" + fmt_num(mu) + "," + fmt_num(sigma);
  return d;
}

Distribution Distribution::normal(double mu, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(mu))
    throw std::invalid_argument("normal: need finite mu, sigma > 0");
  Distribution d;
  d.family_ = Family::Normal;
  d.p1_ = mu;
  d.p2_ = sigma;
  d.label_ = "normal:" + fmt_num(mu) + "," + fmt_num(sigma);
  return d;
}

double Distribution::cdf(double x) const {
  if (!atoms_.empty()) {
    auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x);
    if (it == atoms_.begin()) return 0.0;
    return cum_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
  }
  switch (kind_ == Kind::Empirical ? Family::None : family_) {
    case Family::Uniform: {
      if (x <= p1_) return 0.0;
      if (x >= p2_) return 1.0;
      return (x - p1_) / (p2_ - p1_);
    }
    case Family::Pareto:
      return x <= p2_ ? 0.0 : 1.0 - std::pow(p2_ / x, p1_);
    case Family::Exponential:
      return x <= 0.0 ? 0.0 : -std::expm1(-p1_ * x);
    case Family::Lognormal:
      return x <= 0.0 ? 0.0 : normal_cdf((std::log(x) - p1_) / p2_);
    case Family::Normal:
      return normal_cdf((x - p1_) / p2_);
    default: {
      auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
      return static_cast<double>(it - samples_.begin()) /
             static_cast<double>(samples_.size());
    }
  }
}

double Distribution::survival(double x) const {
  if (!atoms_.empty()) {
    auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x);
    if (it == atoms_.begin()) return 1.0;
    return surv_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
  }
  switch (kind_ == Kind::Empirical ? Family::None : family_) {
    case Family::Uniform: {
      if (x <= p1_) return 1.0;
      if (x >= p2_) return 0.0;
      return (p2_ - x) / (p2_ - p1_);
    }
    case Family::Pareto:
      return x <= p2_ ? 1.0 : std::pow(p2_ / x, p1_);
    case Family::Exponential:
      return x <= 0.0 ? 1.0 : std::exp(-p1_ * x);
    case Family::Lognormal:
      return x <= 0.0 ? 1.0 : normal_cdf(-(std::log(x) - p1_) / p2_);
    case Family::Normal:
      return normal_cdf(-(x - p1_) / p2_);
    default: {
      auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
      return static_cast<double>(samples_.end() - it) /
             static_cast<double>(samples_.size());
    }
  }
}

double Distribution::quantile_lower(double p) const {
  if (!(p > 0.0 && p <= 1.0))
    throw std::domain_error("quantile_lower: p must lie in (0,1]");
  if (!atoms_.empty()) {
    double target = p - kProbTol;
    auto it = std::lower_bound(cum_.begin(), cum_.end(), target);
    if (it == cum_.end()) --it;
    return atoms_[static_cast<std::size_t>(it - cum_.begin())];
  }
  if (kind_ == Kind::Empirical) {
    double n = static_cast<double>(samples_.size());
    double k = std::ceil(n * p - 1e-9);
    std::size_t i = static_cast<std::size_t>(std::max(1.0, std::min(n, k)));
    return samples_[i - 1];
  }
  switch (family_) {
    case Family::Uniform:
      return p1_ + (p2_ - p1_) * p;
    case Family::Pareto:
      return p == 1.0 ? kInf : p2_ * std::pow(1.0 - p, -1.0 / p1_);
    case Family::Exponential:
      return p == 1.0 ? kInf : -std::log1p(-p) / p1_;
    case Family::Lognormal:
      return p == 1.0 ? kInf : std::exp(p1_ + p2_ * normal_quantile(p));
    default:
      return p == 1.0 ? kInf : p1_ + p2_ * normal_quantile(p);
  }
}

double Distribution::quantile_upper(double p) const {
  if (!(p >= 0.0 && p < 1.0))
    throw std::domain_error("quantile_upper: p must lie in [0,1)");
  if (!atoms_.empty()) {
    double target = p + kProbTol;
    auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
    if (it == cum_.end()) return atoms_.back();
    return atoms_[static_cast<std::size_t>(it - cum_.begin())];
  }
  if (kind_ == Kind::Empirical) {
    double n = static_cast<double>(samples_.size());
    double k = std::floor(n * p + 1e-9) + 1.0;
    std::size_t i = static_cast<std::size_t>(std::max(1.0, std::min(n, k)));
    return samples_[i - 1];
  }
  switch (family_) {
    case Family::Uniform:
      return p1_ + (p2_ - p1_) * p;
    case Family::Pareto:
      return p == 0.0 ? p2_ : p2_ * std::pow(1.0 - p, -1.0 / p1_);
    case Family::Exponential:
      return p == 0.0 ? 0.0 : -std::log1p(-p) / p1_;
    case Family::Lognormal:
      return p == 0.0 ? 0.0 : std::exp(p1_ + p2_ * normal_quantile(p));
    default:
      return p == 0.0 ? -kInf : p1_ + p2_ * normal_quantile(p);
  }
}

double Distribution::mean() const {
  if (!atoms_.empty()) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      acc += static_cast<long double>(atoms_[i]) * probs_[i];
    return static_cast<double>(acc);
  }
  if (kind_ == Kind::Empirical) {
    long double acc = 0.0L;
    for (double x : samples_) acc += x;
    return static_cast<double>(acc / samples_.size());
  }
  switch (family_) {
    case Family::Uniform:
      return 0.5 * (p1_ + p2_);
    case Family::Pareto:
      if (p1_ <= 1.0)
        throw unsupported_error("pareto mean is infinite for alpha <= 1");
      return p2_ * p1_ / (p1_ - 1.0);
    case Family::Exponential:
      return 1.0 / p1_;
    case Family::Lognormal:
      return std::exp(p1_ + 0.5 * p2_ * p2_);
    default:
      return p1_;
  }
}

std::pair<double, double> Distribution::support() const {
  if (!atoms_.empty()) return {atoms_.front(), atoms_.back()};
  if (kind_ == Kind::Empirical) return {samples_.front(), samples_.back()};
  switch (family_) {
    case Family::Uniform:
      return {p1_, p2_};
    case Family::Pareto:
      return {p2_, kInf};
    case Family::Exponential:
      return {0.0, kInf};
    case Family::Lognormal:
      return {0.0, kInf};
    default:
      return {-kInf, kInf};
  }
}

bool Distribution::bounded_above() const {
  return std::isfinite(support().second);
}

bool Distribution::bounded_below() const {
  return std::isfinite(support().first);
}

bool Distribution::discrete_like() const {
  return !atoms_.empty() || kind_ == Kind::Empirical;
}

void Distribution::atoms_probs(std::vector<double>& atoms,
                               std::vector<double>& probs) const {
  if (!atoms_.empty()) {
    atoms = atoms_;
    probs = probs_;
    return;
  }
  if (kind_ != Kind::Empirical)
    throw unsupported_error("atoms_probs: law has no atom representation");
  atoms.clear();
  probs.clear();
  double w = 1.0 / static_cast<double>(samples_.size());
  for (std::size_t i = 0; i < samples_.size();) {
    std::size_t j = i;
    while (j < samples_.size() && samples_[j] == samples_[i]) ++j;
    atoms.push_back(samples_[i]);
    probs.push_back(w * static_cast<double>(j - i));
    i = j;
  }
}

const std::vector<double>& Distribution::sorted_samples() const {
  if (kind_ != Kind::Empirical)
    throw unsupported_error("sorted_samples: not an empirical law");
  return samples_;
}

std::optional<TailIndex> Distribution::tail_index() const {
  if (declared_tail_) return declared_tail_;
  if (family_ == Family::Pareto) return TailIndex{p1_, p1_};
  return std::nullopt;
}

Distribution Distribution::with_tail_index(double alpha, double beta) const {
  if (!(alpha > 0.0) || !(beta >= alpha))
    throw std::invalid_argument("with_tail_index: need 0 < alpha <= beta");
  Distribution d = *this;
  d.declared_tail_ = TailIndex{alpha, beta};
  return d;
}

MdaClass Distribution::mda_class() const {
  switch (family_) {
    case Family::Pareto:
      return {MdaClass::Kind::Frechet, p1_, false};
    case Family::Uniform:
      return {MdaClass::Kind::Weibull, 1.0, true};
    case Family::Exponential:
    case Family::Lognormal:
    case Family::Normal:
      return {MdaClass::Kind::Gumbel, 0.0, false};
    default:
      // Bernoulli and every atomic/empirical law: bounded upper endpoint.
      return {MdaClass::Kind::Weibull, 0.0, true};
  }
}

Distribution convolve_discrete(const Distribution& a, const Distribution& b) {
  if (!a.discrete_like() || !b.discrete_like())
    throw unsupported_error("convolve_discrete: both laws must be atomic");
  std::vector<double> xa, pa, xb, pb;
  a.atoms_probs(xa, pa);
  b.atoms_probs(xb, pb);
  std::vector<double> xs, ps;
  xs.reserve(xa.size() * xb.size());
  ps.reserve(xa.size() * xb.size());
  for (std::size_t i = 0; i < xa.size(); ++i)
    for (std::size_t j = 0; j < xb.size(); ++j) {
      xs.push_back(xa[i] + xb[j]);
      ps.push_back(pa[i] * pb[j]);
    }
  return Distribution::discrete(std::move(xs), std::move(ps));
}

Distribution affine(const Distribution& d, double scale, double shift) {
  if (!(scale > 0.0))
    throw std::invalid_argument("affine: scale must be positive");
  if (d.discrete_like() && d.kind() != Distribution::Kind::Empirical) {
    std::vector<double> xs, ps;
    d.atoms_probs(xs, ps);
    for (double& x : xs) x = scale * x + shift;
    return Distribution::discrete(std::move(xs), std::move(ps));
  }
  switch (d.family()) {
    case Family::Uniform:
      return Distribution::uniform(scale * d.param1() + shift,
                                   scale * d.param2() + shift);
    case Family::Normal:
      return Distribution::normal(scale * d.param1() + shift,
                                  scale * d.param2());
    case Family::Pareto:
      if (shift == 0.0)
        return Distribution::pareto(d.param1(), scale * d.param2());
      break;
    case Family::Exponential:
      if (shift == 0.0) return Distribution::exponential(d.param1() / scale);
      break;
    case Family::Lognormal:
      if (shift == 0.0)
        return Distribution::lognormal(d.param1() + std::log(scale),
                                       d.param2());
      break;
    default:
      break;
  }
  if (d.kind() == Distribution::Kind::Empirical) {
    std::vector<double> xs = d.sorted_samples();
    for (double& x : xs) x = scale * x + shift;
    return Distribution::empirical(std::move(xs));
  }
  throw unsupported_error("affine: family not closed under this map");
}

Distribution load_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open csv file: " + path);
  std::vector<double> xs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const char* s = line.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end == s) continue;  // header or blank line
    xs.push_back(v);
  }
  if (xs.empty())
    throw parse_error("csv file contains no numeric samples", lineno ? lineno : 1, 1);
  return Distribution::empirical(std::move(xs), "csv:" + path);
}

}  // namespace distort
