#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>

namespace fracctl {

struct GaussRule {
  Eigen::VectorXd nodes;    // on [-1, 1]
  Eigen::VectorXd weights;
};

// Gauss-Legendre rule by Newton iteration on P_n.
GaussRule gauss_legendre(int n);

// Cached 16-point rule.
const GaussRule& gauss16();

// Composite trapezoid weights for a uniform grid with n points and spacing h.
Eigen::VectorXd trapezoid_weights(Eigen::Index n, double h);

// Adaptive bisection with 16-point Gauss panels; a panel is accepted when
// it agrees with the sum of its halves to abs_tol.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-10, int max_depth = 30);

}  // namespace fracctl
