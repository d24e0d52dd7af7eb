#pragma once

// Reference-tracking boundary controllers: the polynomial Volterra kernel
// design and the time-convolution design.

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "fracctl/exosystem.hpp"
#include "fracctl/fdm_engine.hpp"
#include "fracctl/params.hpp"

namespace fracctl {

// K(x, y) = coeff * (x - y)^(2m+1) on 0 <= y <= x.
struct PolyKernel {
  int m = 1;
  double coeff = 1.0;

  int power() const { return 2 * m + 1; }
  double operator()(double x, double y) const;
};

double kernel_eval(const PolyKernel& k, double x, double y);

struct KernelFracDerivs {
  double dx_shifted_caputo;  // d/dx of the Caputo derivative in x with lower terminal y
  double right_caputo_dy;    // right Caputo on [y, x] of dK/dy
};

// Both closed forms. Under the (-1)^n right-sided convention they are
// negatives of each other, so the kernel equation residual is their sum.
KernelFracDerivs kernel_frac_derivs(const PolyKernel& k, double x, double y, double alpha);
double kernel_pde_residual(const PolyKernel& k, double x, double y, double alpha);

// Right Caputo on [y, x] of K(x, .) evaluated at y.
double kernel_right_caputo(const PolyKernel& k, double x, double y, double alpha);
// Order alpha-1 shifted derivative (RL integral of order 1-alpha in x from y).
double kernel_shifted_integral(const PolyKernel& k, double x, double y, double alpha);

// Trapezoid Volterra operator: (T P)_i = int_0^{x_i} K(x_i, y) P(y) dy.
Eigen::MatrixXd volterra_matrix(const PolyKernel& k, const Grid& g);

Eigen::VectorXd volterra_forward(const Eigen::VectorXd& P, const PolyKernel& k, const Grid& g);
// Lower-triangular solve of (I - T) P = w.
Eigen::VectorXd volterra_inverse(const Eigen::VectorXd& w, const PolyKernel& k, const Grid& g);
// Successive approximation P = sum_n T^n w; stops when a term drops below tol.
Eigen::VectorXd volterra_inverse_series(const Eigen::VectorXd& w, const PolyKernel& k,
                                        const Grid& g, double tol = 1e-12, int max_terms = 10000);

// l(tau, t) = l_hat(t - tau) with l_hat(s) = gamma exp(-gamma s).
struct TransportKernel {
  double gamma = 5.0;

  double l_hat(double s) const;
  double l(double tau, double t) const { return l_hat(t - tau); }
};

enum class ControllerKind { volterra, convolution, none };

struct MCurve {
  Eigen::MatrixXd Pi;  // steady plant profile per exosystem state, nx x nV
  Eigen::MatrixXd M;   // transformed profile M^T(x), nx x nV
  Eigen::VectorXd m;   // M^T(1): feedforward gain
  Eigen::VectorXd n;   // M^T(0)
};

struct MOptions {
  ControllerKind kind = ControllerKind::volterra;
  TransportKernel transport;
  CaputoScheme scheme = CaputoScheme::l1;
  // > 0 designs against the implicit-Euler plant sampled at this step,
  // with the controller reading the state one step behind.
  double sample_dt = 0.0;
};

// Regulator profile for the plant driven by the exosystem: for each mode
// lambda of S solve lambda Pi - a A Pi = f (a^T w)/(C rho) with Pi_x(0) = b^T w
// and Pi_x(1) = c^T w, then M = V{Pi} and m = M(1).
MCurve solve_M(const Exosystem& exo, const PolyKernel& kernel, double alpha,
               const PhysicalParams& p, const Eigen::VectorXd& f, const Grid& g,
               const MOptions& opt = {});

// max over interior nodes of |Pi S - a A Pi - f a^T/(C rho)|, continuous design only.
double m_system_residual(const MCurve& mc, const Exosystem& exo, double alpha,
                         const PhysicalParams& p, const Eigen::VectorXd& f, const Grid& g,
                         CaputoScheme scheme = CaputoScheme::l1);

double control_volterra(const Eigen::VectorXd& P_hat, const PolyKernel& k, const MCurve& mc,
                        const Exosystem& exo, double t, const Grid& g);

// history[j] = P_hat(1, j dt) for j = 0..n with t = (n+1) dt.
double control_convolution(const std::vector<double>& history, const TransportKernel& tk,
                           const MCurve& mc, const Exosystem& exo, double t, double dt);

// Homogeneous error system e_t = a d/dx C D^alpha e, e_x(0) = 0, e(1) = 0.
Field tracking_error_target(const std::function<double(double)>& e0, double alpha,
                            const PhysicalParams& p, const Grid& g,
                            CaputoScheme scheme = CaputoScheme::l1);

}  // namespace fracctl
