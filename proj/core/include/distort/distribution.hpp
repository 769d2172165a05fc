#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace distort {

// Probabilities are compared with this absolute tolerance everywhere. Values
// (atom locations, quantiles) are compared exactly unless stated otherwise.
constexpr double kProbTol = 1e-12;

enum class Family {
  None,
  Uniform,
  Bernoulli,
  Pareto,
  Exponential,
  Lognormal,
  Normal
};

// Extreme-value classification of the upper tail.
struct MdaClass {
  enum class Kind { Frechet, Weibull, Gumbel } kind;
  double index;          // Frechet: tail index; Weibull: shape when known, else 0
  bool finite_endpoint;  // bounded above
};

// Survival function is extended regularly varying with indices -alpha (upper
// envelope) and -beta (lower envelope), alpha <= beta. Plain regular variation
// has alpha == beta.
struct TailIndex {
  double alpha;
  double beta;
};

class Distribution {
 public:
  enum class Kind { Discrete, Empirical, Parametric };

  static Distribution discrete(std::vector<double> atoms,
                               std::vector<double> probs);
  static Distribution empirical(std::vector<double> samples,
                                std::string label = "");
  static Distribution uniform(double a, double b);
  static Distribution bernoulli(double q);
  static Distribution pareto(double alpha, double scale);
  static Distribution exponential(double lambda);
  static Distribution lognormal(double mu, double sigma);
  static Distribution normal(double mu, double sigma);

  Kind kind() const { return kind_; }
  Family family() const { return family_; }
  const std::string& label() const { return label_; }

  double cdf(double x) const;
  double survival(double x) const;

  // quantile_lower(p) = inf{x : F(x) >= p} for p in (0,1];
  // quantile_upper(p) = sup{x : F(x) <= p} for p in [0,1).
  // Cumulative probabilities are matched with kProbTol slack so that
  // breakpoints hit exactly in exact arithmetic are hit here too.
  double quantile_lower(double p) const;
  double quantile_upper(double p) const;

  double mean() const;  // throws unsupported_error when infinite
  std::pair<double, double> support() const;
  bool bounded_above() const;
  bool bounded_below() const;

  // True when the law is purely atomic with a short atom list available
  // (Discrete, Empirical, Bernoulli).
  bool discrete_like() const;
  void atoms_probs(std::vector<double>& atoms, std::vector<double>& probs) const;
  const std::vector<double>& sorted_samples() const;  // Empirical only

  std::optional<TailIndex> tail_index() const;
  // Returns a copy carrying a declared ERV tail band, for laws whose tail is
  // known only through envelopes.
  Distribution with_tail_index(double alpha, double beta) const;

  MdaClass mda_class() const;

  double param1() const { return p1_; }
  double param2() const { return p2_; }

 private:
  Distribution() = default;

  Kind kind_ = Kind::Parametric;
  Family family_ = Family::None;
  double p1_ = 0.0, p2_ = 0.0;
  std::vector<double> atoms_, probs_;
  std::vector<double> cum_;   // P(X <= atom_i)
  std::vector<double> surv_;  // P(X > atom_i), summed from the top
  std::vector<double> samples_;
  std::optional<TailIndex> declared_tail_;
  std::string label_;

  void build_atom_tables();
};

// Distribution of X+Y for independent atomic laws; atoms within 1e-12 of each
// other are merged.
Distribution convolve_discrete(const Distribution& a, const Distribution& b);

// Law of scale*X + shift, scale > 0. Exact for families closed under the map;
// throws unsupported_error otherwise.
Distribution affine(const Distribution& d, double scale, double shift);

// One sample value per line; lines that do not start with a number (headers,
// blanks) are skipped. Throws parse_error when no values are found.
Distribution load_samples_csv(const std::string& path);

}  // namespace distort
