#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "distort/copula.hpp"
#include "distort/distribution.hpp"

namespace distort {

// Step function on (0,1]: value on (edges[i-1], edges[i]] is values[i];
// edges strictly increase and the last edge is 1.
struct StepMap {
  std::vector<double> edges;
  std::vector<double> values;
  double operator()(double u) const;
};

// A vector of risks with one of five dependence structures. Everything the
// asymptotics and tail-subadditivity code needs funnels through here.
class JointModel {
 public:
  enum class Dependence {
    independent,
    comonotone,
    copula,
    joint_pmf,
    functional
  };

  static JointModel independent(std::vector<Distribution> marginals);
  static JointModel comonotone(std::vector<Distribution> marginals);
  static JointModel copula_coupled(Distribution x, Distribution y, Copula c);
  // Cells (x, y, p); marginals are derived by projection.
  static JointModel joint_pmf(const std::vector<std::array<double, 3>>& cells);
  // Components are step functions of one common uniform variable.
  static JointModel functional(std::vector<StepMap> maps);

  Dependence dependence() const { return dep_; }
  std::size_t dim() const { return marginals_.size(); }
  const std::vector<Distribution>& marginals() const { return marginals_; }
  const Copula& copula() const;
  const std::vector<std::array<double, 3>>& cells() const { return cells_; }
  const std::vector<StepMap>& maps() const { return maps_; }
  const std::string& label() const { return label_; }

  // The distribution of the component sum is exact for atomic structures and
  // needs Monte Carlo otherwise.
  bool sum_exact() const;
  Distribution sum_distribution() const;
  Distribution sum_distribution_mc(std::size_t n, std::uint64_t seed) const;

  // Exact bivariate cells (x, y, p); available whenever dim() == 2 and
  // sum_exact() holds. Lets callers restrict both risks to a joint event.
  std::vector<std::array<double, 3>> component_cells() const;

  // Seed-stable sampling; sums avoid materializing components.
  std::vector<double> sample_sums(std::size_t n, std::uint64_t seed) const;
  std::vector<std::vector<double>> sample_components(std::size_t n,
                                                     std::uint64_t seed) const;

  // Is there an outcome with positive probability where every component
  // strictly exceeds its threshold and the sum strictly exceeds sum_threshold?
  // Exact structures only; copula coupling needs the sampled variant.
  bool common_tail_nonempty(const std::vector<double>& comp_thresholds,
                            double sum_threshold) const;

 private:
  JointModel() = default;
  Dependence dep_ = Dependence::independent;
  std::vector<Distribution> marginals_;
  std::optional<Copula> cop_;
  std::vector<std::array<double, 3>> cells_;
  std::vector<double> cell_cum_;
  std::vector<StepMap> maps_;
  std::string label_;
};

}  // namespace distort
