#pragma once

#include <functional>
#include <vector>

namespace distort {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // accumulated local Richardson estimates
};

// Adaptive Simpson with an absolute tolerance. The function must be finite on
// [a,b]; endpoints are evaluated.
QuadResult adaptive_simpson(const std::function<double(double)>& f, double a,
                            double b, double tol, int max_depth = 40);

// Gauss-Legendre rule of the given order. Nodes are computed once at
// construction by Newton iteration on the Legendre recurrence.
class GaussLegendre {
 public:
  explicit GaussLegendre(int order);
  double integrate(const std::function<double(double)>& f, double a,
                   double b) const;
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> nodes_;    // on [-1,1]
  std::vector<double> weights_;
};

}  // namespace distort
