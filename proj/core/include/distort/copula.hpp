#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "distort/distortion.hpp"

namespace distort {

// Archimedean generator Psi: (0,1] -> [0, inf), decreasing and convex with
// Psi(1) = 0. psi0 is the limit at 0+, +inf for strict generators.
struct ArchimedeanGenerator {
  std::function<double(double)> psi;
  std::function<double(double)> psi_prime;  // optional, numeric fallback
  std::function<double(double)> inverse;    // optional closed-form inverse
  double psi0 = 0.0;

  // Psi^{[-1]}(t) = Psi^{-1}(t) for t <= psi0 and 0 beyond; bisection on
  // [1e-15, 1] when no closed form is supplied.
  double pseudo_inverse(double t) const;
  double derivative(double t) const;
};

class Copula {
 public:
  enum class Family {
    independence,
    comonotone,
    countermonotone,
    clayton,
    frank,
    pareto_survival,
    amh,
    gumbel_hougaard,
    fgm,
    marshall_olkin,
    gaussian,
    custom_archimedean
  };

  static Copula independence();
  static Copula comonotone();
  static Copula countermonotone();
  static Copula clayton(double alpha);          // alpha > 0
  static Copula frank(double alpha);            // alpha != 0
  static Copula pareto_survival(double alpha);  // alpha > 0
  static Copula amh(double alpha);              // alpha in [-1,1)
  static Copula gumbel_hougaard(double alpha);  // alpha >= 1
  static Copula fgm(double alpha);              // alpha in [-1,1]
  static Copula marshall_olkin(double a, double b);  // a,b in [0,1]
  static Copula gaussian(double rho);           // rho in (-1,1)
  static Copula archimedean(ArchimedeanGenerator gen, std::string label);

  double operator()(double u, double v) const;
  const std::string& label() const { return label_; }
  Family family() const { return family_; }
  double param1() const { return a_; }
  double param2() const { return b_; }
  const std::optional<ArchimedeanGenerator>& generator() const { return gen_; }

  // t = P(V <= v | U = u), the u-partial of C; closed forms where available,
  // central differences otherwise.
  double conditional(double u, double v) const;
  // Inverse of the above in v; bisection to 1e-10 when no closed form exists.
  double conditional_inverse(double u, double t) const;

  // Chunked, seed-stable sampling: pair i depends only on (seed, i).
  std::vector<std::pair<double, double>> sample_pairs(std::size_t n,
                                                      std::uint64_t seed) const;

 private:
  Copula() = default;
  Family family_ = Family::independence;
  double a_ = 0.0, b_ = 0.0;
  std::optional<ArchimedeanGenerator> gen_;
  std::string label_;
};

enum class Side { first, second };

// g(u) = C(u,v)/v for fixed v in (0,1] (or C(v,u)/v for the second side).
// Always a distortion; concavity follows the family parameter.
DistortionFn derived_distortion(const Copula& c, double v, Side side = Side::first);

// Concavity of 1/Psi' on (0,1), the criterion deciding whether every derived
// distortion of the generator's copula is concave. Requires psi0 = +inf.
enum class GeneratorConcavity { concave, not_concave };
GeneratorConcavity generator_reciprocal_concavity(const ArchimedeanGenerator& gen,
                                                  int grid = 2001);

}  // namespace distort
