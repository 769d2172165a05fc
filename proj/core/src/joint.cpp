#include "distort/joint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "distort/errors.hpp"
#include "distort/rng.hpp"

namespace distort {

namespace {

constexpr double kEdgeTol = 1e-12;

void validate_step_map(const StepMap& m) {
  if (m.edges.empty() || m.edges.size() != m.values.size())
    throw std::invalid_argument("step map needs matching nonempty edges/values");
  double prev = 0.0;
  for (double e : m.edges) {
    if (!std::isfinite(e) || e <= prev)
      throw std::invalid_argument("step map edges must increase in (0,1]");
    prev = e;
  }
  if (std::fabs(m.edges.back() - 1.0) > kEdgeTol)
    throw std::invalid_argument("step map must cover (0,1]: last edge != 1");
  for (double v : m.values)
    if (!std::isfinite(v))
      throw std::invalid_argument("step map values must be finite");
}

std::string marginal_list(const std::vector<Distribution>& ms) {
  std::string out;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (i) out += ";";
    out += ms[i].label();
  }
  return out;
}

// Merged partition of (0,1] refining every marginal's cumulative breakpoints.
std::vector<double> merged_cum_edges(const std::vector<Distribution>& ms) {
  std::vector<double> edges;
  for (const auto& d : ms) {
    std::vector<double> vals, probs;
    d.atoms_probs(vals, probs);
    double cum = 0.0;
    for (double p : probs) {
      cum += p;
      edges.push_back(std::min(cum, 1.0));
    }
  }
  edges.push_back(1.0);
  std::sort(edges.begin(), edges.end());
  std::vector<double> out;
  for (double e : edges) {
    if (e <= kEdgeTol) continue;
    if (!out.empty() && e - out.back() <= kEdgeTol) continue;
    out.push_back(e);
  }
  out.back() = 1.0;
  return out;
}

}  // namespace

double StepMap::operator()(double u) const {
  auto it = std::lower_bound(edges.begin(), edges.end(), u);
  if (it == edges.end()) return values.back();
  return values[static_cast<std::size_t>(it - edges.begin())];
}

JointModel JointModel::independent(std::vector<Distribution> marginals) {
  if (marginals.size() < 2)
    throw std::invalid_argument("independent joint model needs >= 2 marginals");
  JointModel j;
  j.dep_ = Dependence::independent;
  j.label_ = "independent(" + marginal_list(marginals) + ")";
  j.marginals_ = std::move(marginals);
  return j;
}

JointModel JointModel::comonotone(std::vector<Distribution> marginals) {
  if (marginals.size() < 2)
    throw std::invalid_argument("comonotone joint model needs >= 2 marginals");
  JointModel j;
  j.dep_ = Dependence::comonotone;
  j.label_ = "comonotone(" + marginal_list(marginals) + ")";
  j.marginals_ = std::move(marginals);
  return j;
}

JointModel JointModel::copula_coupled(Distribution x, Distribution y, Copula c) {
  JointModel j;
  j.dep_ = Dependence::copula;
  j.label_ = "copula(" + c.label() + ";" + x.label() + ";" + y.label() + ")";
  j.marginals_.push_back(std::move(x));
  j.marginals_.push_back(std::move(y));
  j.cop_ = std::move(c);
  return j;
}

JointModel JointModel::joint_pmf(const std::vector<std::array<double, 3>>& cells) {
  if (cells.empty()) throw std::invalid_argument("joint pmf needs cells");
  double total = 0.0;
  for (const auto& c : cells) {
    if (!std::isfinite(c[0]) || !std::isfinite(c[1]))
      throw std::invalid_argument("joint pmf cell coordinates must be finite");
    if (!(c[2] >= 0.0) || !std::isfinite(c[2]))
      throw std::invalid_argument("joint pmf cell probabilities must be >= 0");
    total += c[2];
  }
  if (std::fabs(total - 1.0) > 1e-9)
    throw std::invalid_argument("joint pmf probabilities must sum to 1");

  JointModel j;
  j.dep_ = Dependence::joint_pmf;
  for (const auto& c : cells)
    if (c[2] > 0.0) j.cells_.push_back(c);
  if (j.cells_.empty()) throw std::invalid_argument("joint pmf has no mass");

  // Renormalize the tiny rounding slack so sampling inversion is clean.
  double cum = 0.0;
  j.cell_cum_.reserve(j.cells_.size());
  for (auto& c : j.cells_) {
    c[2] /= total;
    cum += c[2];
    j.cell_cum_.push_back(cum);
  }
  j.cell_cum_.back() = 1.0;

  std::vector<double> xs, ys, ps;
  for (const auto& c : j.cells_) {
    xs.push_back(c[0]);
    ys.push_back(c[1]);
    ps.push_back(c[2]);
  }
  j.marginals_.push_back(Distribution::discrete(xs, ps));
  j.marginals_.push_back(Distribution::discrete(ys, ps));
  j.label_ = "jointpmf(cells=" + std::to_string(j.cells_.size()) + ")";
  return j;
}

JointModel JointModel::functional(std::vector<StepMap> maps) {
  if (maps.size() < 2)
    throw std::invalid_argument("functional joint model needs >= 2 component maps");
  for (const auto& m : maps) validate_step_map(m);

  JointModel j;
  j.dep_ = Dependence::functional;
  j.maps_ = std::move(maps);
  for (const auto& m : j.maps_) {
    std::vector<double> vals, probs;
    double prev = 0.0;
    for (std::size_t i = 0; i < m.edges.size(); ++i) {
      double len = m.edges[i] - prev;
      if (len > 0.0) {
        vals.push_back(m.values[i]);
        probs.push_back(len);
      }
      prev = m.edges[i];
    }
    j.marginals_.push_back(Distribution::discrete(vals, probs));
  }
  j.label_ = "functional(k=" + std::to_string(j.maps_.size()) + ")";
  return j;
}

const Copula& JointModel::copula() const {
  if (!cop_) throw std::logic_error("joint model has no copula");
  return *cop_;
}

bool JointModel::sum_exact() const {
  switch (dep_) {
    case Dependence::joint_pmf:
    case Dependence::functional:
      return true;
    case Dependence::independent:
    case Dependence::comonotone:
      for (const auto& d : marginals_)
        if (!d.discrete_like()) return false;
      return true;
    case Dependence::copula:
      return false;
  }
  return false;
}

Distribution JointModel::sum_distribution() const {
  if (!sum_exact())
    throw unsupported_error(
        "exact sum distribution unavailable for this dependence; use Monte Carlo");

  switch (dep_) {
    case Dependence::joint_pmf: {
      std::vector<double> vals, probs;
      for (const auto& c : cells_) {
        vals.push_back(c[0] + c[1]);
        probs.push_back(c[2]);
      }
      return Distribution::discrete(vals, probs);
    }
    case Dependence::functional: {
      std::vector<double> edges;
      for (const auto& m : maps_)
        edges.insert(edges.end(), m.edges.begin(), m.edges.end());
      std::sort(edges.begin(), edges.end());
      edges.erase(std::unique(edges.begin(), edges.end(),
                              [](double a, double b) { return b - a <= kEdgeTol; }),
                  edges.end());
      edges.back() = 1.0;
      std::vector<double> vals, probs;
      double prev = 0.0;
      for (double e : edges) {
        double len = e - prev;
        if (len > 0.0) {
          double s = 0.0;
          for (const auto& m : maps_) s += m(e);
          vals.push_back(s);
          probs.push_back(len);
        }
        prev = e;
      }
      return Distribution::discrete(vals, probs);
    }
    case Dependence::independent: {
      Distribution acc = marginals_[0];
      for (std::size_t i = 1; i < marginals_.size(); ++i)
        acc = convolve_discrete(acc, marginals_[i]);
      return acc;
    }
    case Dependence::comonotone: {
      // On the merged cumulative partition every marginal's lower quantile is
      // constant per piece, so the sum is a step function of the common level.
      auto edges = merged_cum_edges(marginals_);
      std::vector<double> vals, probs;
      double prev = 0.0;
      for (double e : edges) {
        double len = e - prev;
        if (len > kEdgeTol) {
          double s = 0.0;
          for (const auto& d : marginals_) s += d.quantile_lower(e);
          vals.push_back(s);
          probs.push_back(len);
        }
        prev = e;
      }
      return Distribution::discrete(vals, probs);
    }
    case Dependence::copula:
      break;
  }
  throw unsupported_error("exact sum distribution unavailable");
}

Distribution JointModel::sum_distribution_mc(std::size_t n, std::uint64_t seed) const {
  return Distribution::empirical(sample_sums(n, seed));
}

std::vector<std::array<double, 3>> JointModel::component_cells() const {
  if (dim() != 2)
    throw std::invalid_argument("component cells are defined for bivariate joints");
  if (!sum_exact())
    throw unsupported_error(
        "exact component cells unavailable for this dependence; use sampling");

  switch (dep_) {
    case Dependence::joint_pmf:
      return cells_;
    case Dependence::functional: {
      std::vector<double> edges;
      for (const auto& m : maps_)
        edges.insert(edges.end(), m.edges.begin(), m.edges.end());
      std::sort(edges.begin(), edges.end());
      edges.erase(std::unique(edges.begin(), edges.end(),
                              [](double a, double b) { return b - a <= kEdgeTol; }),
                  edges.end());
      edges.back() = 1.0;
      std::vector<std::array<double, 3>> out;
      double prev = 0.0;
      for (double e : edges) {
        double len = e - prev;
        if (len > 0.0) out.push_back({maps_[0](e), maps_[1](e), len});
        prev = e;
      }
      return out;
    }
    case Dependence::independent: {
      std::vector<double> xs, px, ys, py;
      marginals_[0].atoms_probs(xs, px);
      marginals_[1].atoms_probs(ys, py);
      std::vector<std::array<double, 3>> out;
      out.reserve(xs.size() * ys.size());
      for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t k = 0; k < ys.size(); ++k)
          out.push_back({xs[i], ys[k], px[i] * py[k]});
      return out;
    }
    case Dependence::comonotone: {
      auto edges = merged_cum_edges(marginals_);
      std::vector<std::array<double, 3>> out;
      double prev = 0.0;
      for (double e : edges) {
        double len = e - prev;
        if (len > kEdgeTol)
          out.push_back({marginals_[0].quantile_lower(e),
                         marginals_[1].quantile_lower(e), len});
        prev = e;
      }
      return out;
    }
    case Dependence::copula:
      break;
  }
  throw unsupported_error("exact component cells unavailable");
}

std::vector<double> JointModel::sample_sums(std::size_t n, std::uint64_t seed) const {
  std::vector<double> out(n);
  const std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  for (std::size_t c = 0; c < chunks; ++c) {
    std::mt19937_64 gen(derive_seed(seed, c));
    const std::size_t lo = c * kSampleChunk;
    const std::size_t hi = std::min(n, lo + kSampleChunk);
    for (std::size_t i = lo; i < hi; ++i) {
      double s = 0.0;
      switch (dep_) {
        case Dependence::independent:
          for (const auto& d : marginals_) s += d.quantile_lower(uniform01(gen));
          break;
        case Dependence::comonotone: {
          double u = uniform01(gen);
          for (const auto& d : marginals_) s += d.quantile_lower(u);
          break;
        }
        case Dependence::copula: {
          double u = uniform01(gen);
          double t = uniform01(gen);
          double v = cop_->conditional_inverse(u, t);
          s = marginals_[0].quantile_lower(u) + marginals_[1].quantile_lower(v);
          break;
        }
        case Dependence::joint_pmf: {
          double u = uniform01(gen);
          auto it = std::lower_bound(cell_cum_.begin(), cell_cum_.end(), u);
          const auto& cell =
              cells_[std::min<std::size_t>(cells_.size() - 1,
                                           static_cast<std::size_t>(it - cell_cum_.begin()))];
          s = cell[0] + cell[1];
          break;
        }
        case Dependence::functional: {
          double u = uniform01(gen);
          for (const auto& m : maps_) s += m(u);
          break;
        }
      }
      out[i] = s;
    }
  }
  return out;
}

std::vector<std::vector<double>> JointModel::sample_components(
    std::size_t n, std::uint64_t seed) const {
  const std::size_t k = dim();
  std::vector<std::vector<double>> out(k, std::vector<double>(n));
  const std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  for (std::size_t c = 0; c < chunks; ++c) {
    std::mt19937_64 gen(derive_seed(seed, c));
    const std::size_t lo = c * kSampleChunk;
    const std::size_t hi = std::min(n, lo + kSampleChunk);
    for (std::size_t i = lo; i < hi; ++i) {
      switch (dep_) {
        case Dependence::independent:
          for (std::size_t m = 0; m < k; ++m)
            out[m][i] = marginals_[m].quantile_lower(uniform01(gen));
          break;
        case Dependence::comonotone: {
          double u = uniform01(gen);
          for (std::size_t m = 0; m < k; ++m)
            out[m][i] = marginals_[m].quantile_lower(u);
          break;
        }
        case Dependence::copula: {
          double u = uniform01(gen);
          double t = uniform01(gen);
          double v = cop_->conditional_inverse(u, t);
          out[0][i] = marginals_[0].quantile_lower(u);
          out[1][i] = marginals_[1].quantile_lower(v);
          break;
        }
        case Dependence::joint_pmf: {
          double u = uniform01(gen);
          auto it = std::lower_bound(cell_cum_.begin(), cell_cum_.end(), u);
          const auto& cell =
              cells_[std::min<std::size_t>(cells_.size() - 1,
                                           static_cast<std::size_t>(it - cell_cum_.begin()))];
          out[0][i] = cell[0];
          out[1][i] = cell[1];
          break;
        }
        case Dependence::functional: {
          double u = uniform01(gen);
          for (std::size_t m = 0; m < k; ++m) out[m][i] = maps_[m](u);
          break;
        }
      }
    }
  }
  return out;
}

bool JointModel::common_tail_nonempty(const std::vector<double>& comp_thresholds,
                                      double sum_threshold) const {
  if (comp_thresholds.size() != dim())
    throw std::invalid_argument("one threshold per component required");

  switch (dep_) {
    case Dependence::joint_pmf: {
      for (const auto& c : cells_)
        if (c[2] > kProbTol && c[0] > comp_thresholds[0] &&
            c[1] > comp_thresholds[1] && c[0] + c[1] > sum_threshold)
          return true;
      return false;
    }
    case Dependence::functional: {
      std::vector<double> edges;
      for (const auto& m : maps_)
        edges.insert(edges.end(), m.edges.begin(), m.edges.end());
      std::sort(edges.begin(), edges.end());
      edges.erase(std::unique(edges.begin(), edges.end(),
                              [](double a, double b) { return b - a <= kEdgeTol; }),
                  edges.end());
      double prev = 0.0;
      for (double e : edges) {
        if (e - prev > kProbTol) {
          double s = 0.0;
          bool above = true;
          for (std::size_t m = 0; m < maps_.size(); ++m) {
            double v = maps_[m](e);
            s += v;
            if (!(v > comp_thresholds[m])) above = false;
          }
          if (above && s > sum_threshold) return true;
        }
        prev = e;
      }
      return false;
    }
    case Dependence::independent:
    case Dependence::comonotone: {
      // Either structure can realize every component near its upper endpoint
      // simultaneously, so the box is reachable iff each marginal puts mass
      // above its threshold and the best-case sum clears the sum threshold.
      double top_sum = 0.0;
      for (std::size_t m = 0; m < dim(); ++m) {
        if (!(marginals_[m].survival(comp_thresholds[m]) > kProbTol)) return false;
        double hi = marginals_[m].support().second;
        if (std::isinf(hi)) return true;
        top_sum += hi;
      }
      return top_sum > sum_threshold;
    }
    case Dependence::copula:
      throw unsupported_error(
          "common-tail check for copula coupling requires sampling");
  }
  return false;
}

}  // namespace distort
