#pragma once

// Green function of the space-fractional diffusion operator on the real
// line, the solution formula built from it, and the L-infinity bound for
// separable forcing.

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "fracctl/fractional_core.hpp"
#include "fracctl/params.hpp"

namespace fracctl {

enum class QuadRule { trapezoid, gauss };

struct GreenQuadrature {
  double s_max = 0.0;          // 0 selects the truncation radius automatically
  int n_nodes = 256;           // lower bound; raised to resolve oscillation
  QuadRule rule = QuadRule::gauss;
  double tail_tol = 1e-12;     // target for exp(a0 Re phi(s_max) t)
  long max_nodes = 4'000'000;
};

struct GreenValue {
  double value = 0.0;
  double imag_residual = 0.0;  // imaginary part of the full-line integral
  double s_max = 0.0;
  long nodes = 0;
};

// exp(a(t) phi(s) t).
ComplexSymbol green_tilde(double s, double t, double alpha, const PhysicalParams& p);

// Truncation radius with exp(-a0 sin(pi alpha/2) s^(alpha+1) t) = tol.
double green_truncation(double t, double alpha, const PhysicalParams& p, double tol = 1e-12);

// Node set for G(., t) that can be reused across many x with |x| <= x_max.
class GreenKernel {
 public:
  GreenKernel(double t, double alpha, const PhysicalParams& p, double x_max,
              const GreenQuadrature& quad = {});

  double operator()(double x) const;
  GreenValue detail(double x) const;

  double t() const { return t_; }
  double s_max() const { return s_max_; }
  long nodes() const { return long(s_.size()); }

 private:
  double t_;
  double s_max_;
  Eigen::VectorXd s_, w_;
  Eigen::VectorXcd symbol_;
};

GreenValue green_eval_detail(double x, double t, double alpha, const PhysicalParams& p,
                             const GreenQuadrature& quad = {});
double green_eval(double x, double t, double alpha, const PhysicalParams& p,
                  const GreenQuadrature& quad = {});

struct AnalyticInputs {
  std::function<double(double, double)> Q;    // (x, t); empty means zero
  std::function<double(double)> g0;           // initial profile; empty means zero
  std::function<double(double)> u;            // right boundary value; empty means zero
  std::function<double(double)> du;           // derivative of u
};

struct AnalyticOptions {
  double inner_tol = 1e-9;   // spatial convolution tolerance
  double time_tol = 1e-6;    // successive-refinement tolerance for the time integral
  int max_time_panels = 64;
};

// Solution value at (x, t) for constant k. Sources and the initial profile
// are restricted to [0, L]. The kernel is evaluated at x - y.
double analytic_solution(const AnalyticInputs& in, double x, double t, double alpha,
                         const PhysicalParams& p, const GreenQuadrature& quad = {},
                         const AnalyticOptions& opt = {});

// Profile at a fixed time over the given x values; shares one kernel.
Eigen::VectorXd analytic_profile(const AnalyticInputs& in, const Eigen::VectorXd& xs, double t,
                                 double alpha, const PhysicalParams& p,
                                 const GreenQuadrature& quad = {}, const AnalyticOptions& opt = {});

// Green mass on [-left, right].
double green_mass(double t, double alpha, const PhysicalParams& p, double left, double right,
                  const GreenQuadrature& quad = {});

// (|r|/2pi) (C mu / (k0 sin(pi alpha/2))) (2 |J^(alpha+1) q|_1 + |q|_1) + |u_max|.
// Returns +inf when sin(pi alpha/2) underflows.
double stability_bound(const Sampled& q, double r, double u_max, double alpha,
                       const PhysicalParams& p);

}  // namespace fracctl
