#include "distort/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace distort {

namespace {

struct SimpsonCtx {
  const std::function<double(double)>& f;
  double value = 0.0;
  double error = 0.0;
};

void simpson_rec(SimpsonCtx& ctx, double a, double b, double fa, double fm,
                 double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = ctx.f(lm);
  double frm = ctx.f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    ctx.value += left + right + delta / 15.0;
    ctx.error += std::fabs(delta) / 15.0;
    return;
  }
  simpson_rec(ctx, a, m, fa, flm, fm, left, tol * 0.5, depth - 1);
  simpson_rec(ctx, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

}  // namespace

QuadResult adaptive_simpson(const std::function<double(double)>& f, double a,
                            double b, double tol, int max_depth) {
  if (a == b) return {0.0, 0.0};
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  SimpsonCtx ctx{f};
  double fa = f(a);
  double m = 0.5 * (a + b);
  double fm = f(m);
  double fb = f(b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  simpson_rec(ctx, a, b, fa, fm, fb, whole, tol, max_depth);
  return {sign * ctx.value, ctx.error};
}

GaussLegendre::GaussLegendre(int order) {
  if (order < 1 || order > 1024)
    throw std::invalid_argument("GaussLegendre: order must lie in [1,1024]");
  nodes_.resize(order);
  weights_.resize(order);
  int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    nodes_[i] = -x;
    nodes_[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights_[i] = w;
    weights_[n - 1 - i] = w;
  }
}

double GaussLegendre::integrate(const std::function<double(double)>& f,
                                double a, double b) const {
  double c = 0.5 * (a + b);
  double h = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    acc += weights_[i] * f(c + h * nodes_[i]);
  return acc * h;
}

}  // namespace distort
