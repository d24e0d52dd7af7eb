#include "fracctl/quadrature.hpp"

namespace fracctl {

GaussRule gauss_legendre(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes(n - 1 - i) = x;
    r.weights(n - 1 - i) = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

const GaussRule& gauss16() {
  static const GaussRule rule = gauss_legendre(16);
  return rule;
}

Eigen::VectorXd trapezoid_weights(Eigen::Index n, double h) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, h);
  w(0) *= 0.5;
  w(n - 1) *= 0.5;
  return w;
}

namespace {

double panel(const std::function<double(double)>& f, double a, double b) {
  const auto& g = gauss16();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (Eigen::Index i = 0; i < g.nodes.size(); ++i) s += g.weights(i) * f(c + h * g.nodes(i));
  return s * h;
}

double adapt(const std::function<double(double)>& f, double a, double b, double whole, double tol,
             int depth) {
  const double m = 0.5 * (a + b);
  const double left = panel(f, a, m), right = panel(f, m, b);
  if (depth <= 0 || std::abs(left + right - whole) <= tol) return left + right;
  return adapt(f, a, m, left, 0.5 * tol, depth - 1) + adapt(f, m, b, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  return adapt(f, a, b, panel(f, a, b), abs_tol, max_depth);
}

}  // namespace fracctl
