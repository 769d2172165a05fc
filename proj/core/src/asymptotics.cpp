#include "distort/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "distort/errors.hpp"
#include "distort/format.hpp"
#include "distort/rng.hpp"

namespace distort {

namespace {

bool is_unit_uniform(const Distribution& d) {
  return d.family() == Family::Uniform && d.param1() == 0.0 &&
         d.param2() == 1.0;
}

bool identical_marginals(const JointModel& j) {
  const auto& ms = j.marginals();
  for (std::size_t i = 1; i < ms.size(); ++i)
    if (ms[i].label() != ms[0].label()) return false;
  return true;
}


RatioPoint ratio_point(const JointModel& j, double p,
                       const std::optional<McParams>& mc,
                       std::uint64_t point_seed_index) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("var_ratio needs p in (0,1)");

  RatioPoint pt;
  pt.p = p;
  long double den = 0.0L;
  for (const auto& d : j.marginals()) den += d.quantile_lower(p);
  pt.denominator = static_cast<double>(den);

  if (j.dependence() == JointModel::Dependence::comonotone) {
    // The sum's quantile is the quantile sum, the same doubles as the
    // denominator, so the ratio is exactly 1.
    pt.numerator = pt.denominator;
    pt.method = "exact";
  } else if (j.dependence() == JointModel::Dependence::independent &&
             j.dim() == 2 && is_unit_uniform(j.marginals()[0]) &&
             is_unit_uniform(j.marginals()[1])) {
    pt.numerator = uniform_sum_closed_form(p);
    pt.method = "closed_form";
  } else if (j.sum_exact()) {
    pt.numerator = j.sum_distribution().quantile_lower(p);
    pt.method = "exact";
  } else {
    if (!mc || mc->n == 0)
      throw unsupported_error(
          "var_ratio: this joint needs Monte Carlo (supply n and seed)");
    std::vector<double> sums =
        j.sample_sums(mc->n, derive_seed(mc->seed, point_seed_index));
    std::sort(sums.begin(), sums.end());
    SampleQuantile q = sample_quantile(sums, p);
    pt.numerator = q.value;
    pt.ci_halfwidth = q.ci_halfwidth;
    pt.method = "monte_carlo";
    pt.low_confidence = static_cast<double>(mc->n) * (1.0 - p) < 100.0;
  }

  if (pt.denominator == 0.0) throw zero_denominator_error(pt.numerator);
  pt.ratio = pt.numerator / pt.denominator;
  if (pt.method == "monte_carlo" && pt.denominator != 0.0)
    pt.ci_halfwidth = std::fabs(pt.ci_halfwidth / pt.denominator);
  return pt;
}

}  // namespace

std::string LimitPrediction::text() const {
  switch (kind) {
    case Kind::none:
      return "";
    case Kind::point:
      return fmt_num(lo);
    case Kind::band:
      return "[" + fmt_num(lo) + ";" + fmt_num(hi) + "]";
    case Kind::upper_bound:
      return "<=" + fmt_num(hi);
  }
  return "";
}

double uniform_sum_closed_form(double p) {
  if (!(p > 0.0 && p <= 1.0))
    throw std::domain_error("uniform_sum_closed_form needs p in (0,1]");
  if (p <= 0.5) return std::sqrt(2.0 * p);
  return 2.0 - std::sqrt(2.0 * (1.0 - p));
}

SampleQuantile sample_quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty())
    throw std::domain_error("sample_quantile needs a nonempty sample");
  if (!(p > 0.0 && p <= 1.0))
    throw std::domain_error("sample_quantile needs p in (0,1]");
  const auto n = static_cast<double>(sorted.size());
  auto at = [&](double rank) {
    double r = std::clamp(rank, 1.0, n);
    return sorted[static_cast<std::size_t>(std::ceil(r)) - 1];
  };
  SampleQuantile q;
  q.value = at(std::ceil(n * p));
  double spread = 1.96 * std::sqrt(n * p * (1.0 - p));
  q.ci_halfwidth = 0.5 * (at(n * p + spread) - at(n * p - spread));
  return q;
}

RatioPoint var_ratio(const JointModel& j, double p,
                     const std::optional<McParams>& mc) {
  return ratio_point(j, p, mc, 0);
}

RatioScan ratio_scan(const JointModel& j, double p_start, double p_end,
                     std::size_t points, const std::optional<McParams>& mc) {
  if (!(p_start > 0.0 && p_start <= p_end && p_end < 1.0))
    throw std::domain_error("ratio_scan needs 0 < p_start <= p_end < 1");
  if (points == 0) throw std::domain_error("ratio_scan needs >= 1 point");

  std::vector<double> grid;
  if (points == 1 || p_start == p_end) {
    grid.push_back(p_start);
  } else {
    double u_s = 1.0 - p_start, u_e = 1.0 - p_end;
    for (std::size_t i = 0; i < points; ++i) {
      double t = static_cast<double>(i) / static_cast<double>(points - 1);
      grid.push_back(1.0 - u_s * std::pow(u_e / u_s, t));
    }
    grid.front() = p_start;
    grid.back() = p_end;
  }

  RatioScan scan;
  scan.predicted = limit_predictor(j);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      scan.points.push_back(ratio_point(j, grid[i], mc, i));
    } catch (const zero_denominator_error& e) {
      RatioPoint pt;
      pt.p = grid[i];
      pt.ratio = std::numeric_limits<double>::quiet_NaN();
      pt.numerator = e.numerator();
      pt.denominator = 0.0;
      pt.method = "zero_denominator";
      scan.points.push_back(pt);
    }
  }
  return scan;
}

LimitPrediction limit_predictor(const JointModel& j) {
  LimitPrediction out;
  const auto k = static_cast<double>(j.dim());

  if (j.dependence() == JointModel::Dependence::comonotone) {
    out.kind = LimitPrediction::Kind::point;
    out.lo = out.hi = 1.0;
    return out;
  }

  bool all_bounded = true;
  for (const auto& d : j.marginals())
    if (!d.bounded_above()) all_bounded = false;
  if (all_bounded) {
    out.kind = LimitPrediction::Kind::upper_bound;
    out.lo = out.hi = 1.0;
    return out;
  }

  if (j.dependence() == JointModel::Dependence::independent &&
      identical_marginals(j)) {
    auto ti = j.marginals()[0].tail_index();
    if (ti) {
      if (ti->alpha == ti->beta) {
        out.kind = LimitPrediction::Kind::point;
        out.lo = out.hi =
            ti->alpha == 1.0 ? 1.0 : std::pow(k, 1.0 / ti->alpha - 1.0);
      } else {
        out.kind = LimitPrediction::Kind::band;
        double a = std::pow(k, 1.0 / ti->beta - 1.0);
        double b = std::pow(k, 1.0 / ti->alpha - 1.0);
        out.lo = std::min(a, b);
        out.hi = std::max(a, b);
      }
      return out;
    }
  }
  return out;
}

std::string tail_ratio_regime(std::vector<double> c, double alpha,
                            std::size_t k) {
  if (!(alpha > 0.0)) throw std::domain_error("tail index must be positive");
  if (c.empty()) c.assign(k, 1.0);
  if (c.size() != k)
    throw std::domain_error("need one tail constant per risk");
  if (c[0] != 1.0)
    throw std::domain_error("tail constants are normalized so c_1 = 1");
  for (double ci : c)
    if (!(ci > 0.0)) throw std::domain_error("tail constants must be positive");

  if (alpha == 1.0) return "=1";
  long double sum = 0.0L, sum_pow = 0.0L;
  for (double ci : c) {
    sum += ci;
    sum_pow += std::pow(static_cast<long double>(ci), 1.0L / alpha);
  }
  long double lhs = std::pow(sum, 1.0L / alpha);
  long double tol = 1e-12L * (1.0L + std::fabs(static_cast<double>(lhs)));
  if (lhs < sum_pow - tol) return "<1";
  if (lhs > sum_pow + tol) return ">1";
  return "=1";
}

void write_scan_csv(const RatioScan& scan, std::ostream& os) {
  os << "p,ratio,ci_halfwidth,method,predicted_limit\n";
  const std::string pred = scan.predicted.text();
  for (const auto& pt : scan.points) {
    os << fmt_num(pt.p) << ","
       << (std::isnan(pt.ratio) ? std::string("nan") : fmt_num(pt.ratio)) << ","
       << fmt_num(pt.ci_halfwidth) << "," << pt.method << "," << pred << "\n";
  }
}

}  // namespace distort
