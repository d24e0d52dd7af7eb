#include "fracctl/backstepping.hpp"

#include <cmath>
#include <complex>

#include "fracctl/errors.hpp"
#include "fracctl/fractional_core.hpp"

namespace fracctl {

namespace {

using cd = std::complex<double>;

void check_point(double x, double y) {
  if (!(y >= 0.0 && y <= x)) throw DomainError("kernel needs 0 <= y <= x");
}

void check_kernel(const PolyKernel& k) {
  if (k.m < 1) throw DomainError("polynomial kernel needs m >= 1");
}

Eigen::VectorXd trap_row(const PolyKernel& k, const Grid& g, int i) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(g.nx);
  if (i == 0) return r;
  const double h = g.dx(), x = g.x(i);
  for (int j = 0; j <= i; ++j) r(j) = h * k(x, g.x(j));
  r(0) *= 0.5;
  r(i) *= 0.5;
  return r;
}

}  // namespace

double PolyKernel::operator()(double x, double y) const {
  return coeff * std::pow(x - y, power());
}

double kernel_eval(const PolyKernel& k, double x, double y) {
  check_kernel(k);
  check_point(x, y);
  return k(x, y);
}

KernelFracDerivs kernel_frac_derivs(const PolyKernel& k, double x, double y, double alpha) {
  check_kernel(k);
  check_point(x, y);
  (void)FractionalOrder(alpha);
  const double p = k.power();
  const double r = x - y;
  KernelFracDerivs d;
  // power rule in x, then one more x-derivative
  d.dx_shifted_caputo = k.coeff * gamma_fn(p + 1.0) / gamma_fn(p - alpha) * std::pow(r, p - 1.0 - alpha);
  // dK/dy = -c p (x-y)^(p-1); its s-derivative is c p (p-1) (x-s)^(p-2).
  // -1/Gamma(1-alpha) int_y^x (s-y)^-alpha c p (p-1) (x-s)^(p-2) ds, a Beta integral.
  if (alpha == 1.0) {
    // Gamma(0) pole: the right Caputo of order one is -d/dy.
    d.right_caputo_dy = -k.coeff * p * (p - 1.0) * std::pow(r, p - 2.0);
  } else {
    const double beta = gamma_fn(1.0 - alpha) * gamma_fn(p - 1.0) / gamma_fn(p - alpha);
    d.right_caputo_dy = -k.coeff * p * (p - 1.0) * beta / gamma_fn(1.0 - alpha) * std::pow(r, p - 1.0 - alpha);
  }
  return d;
}

double kernel_pde_residual(const PolyKernel& k, double x, double y, double alpha) {
  const auto d = kernel_frac_derivs(k, x, y, alpha);
  return d.dx_shifted_caputo + d.right_caputo_dy;
}

double kernel_right_caputo(const PolyKernel& k, double x, double y, double alpha) {
  check_kernel(k);
  check_point(x, y);
  (void)FractionalOrder(alpha);
  const double p = k.power();
  return k.coeff * gamma_fn(p + 1.0) / gamma_fn(p + 1.0 - alpha) * std::pow(x - y, p - alpha);
}

double kernel_shifted_integral(const PolyKernel& k, double x, double y, double alpha) {
  check_kernel(k);
  check_point(x, y);
  (void)FractionalOrder(alpha);
  const double p = k.power();
  return k.coeff * gamma_fn(p + 1.0) / gamma_fn(p + 2.0 - alpha) * std::pow(x - y, p + 1.0 - alpha);
}

Eigen::MatrixXd volterra_matrix(const PolyKernel& k, const Grid& g) {
  check_kernel(k);
  Eigen::MatrixXd T(g.nx, g.nx);
  for (int i = 0; i < g.nx; ++i) T.row(i) = trap_row(k, g, i).transpose();
  return T;
}

Eigen::VectorXd volterra_forward(const Eigen::VectorXd& P, const PolyKernel& k, const Grid& g) {
  if (P.size() != g.nx) throw SizeError("profile does not match the grid");
  return P - volterra_matrix(k, g) * P;
}

Eigen::VectorXd volterra_inverse(const Eigen::VectorXd& w, const PolyKernel& k, const Grid& g) {
  if (w.size() != g.nx) throw SizeError("profile does not match the grid");
  const Eigen::MatrixXd I_T = Eigen::MatrixXd::Identity(g.nx, g.nx) - volterra_matrix(k, g);
  return I_T.triangularView<Eigen::Lower>().solve(w);
}

Eigen::VectorXd volterra_inverse_series(const Eigen::VectorXd& w, const PolyKernel& k,
                                        const Grid& g, double tol, int max_terms) {
  if (w.size() != g.nx) throw SizeError("profile does not match the grid");
  const Eigen::MatrixXd T = volterra_matrix(k, g);
  Eigen::VectorXd sum = w, term = w;
  for (int n = 1; n <= max_terms; ++n) {
    term = T * term;
    sum += term;
    if (term.cwiseAbs().maxCoeff() < tol) return sum;
  }
  throw AccuracyError("Volterra series did not converge");
}

double TransportKernel::l_hat(double s) const {
  return s < 0.0 ? 0.0 : gamma * std::exp(-gamma * s);
}

MCurve solve_M(const Exosystem& exo, const PolyKernel& kernel, double alpha,
               const PhysicalParams& p, const Eigen::VectorXd& f, const Grid& g,
               const MOptions& opt) {
  check_kernel(kernel);
  p.validate();
  g.validate();
  if (f.size() != g.nx) throw SizeError("source profile does not match the grid");
  const int n = g.nx;
  const Eigen::Index nv = exo.dim();
  const double a = p.a0();
  const double dt = opt.sample_dt;
  const Eigen::MatrixXd A = assemble_frac_operator(alpha, g, opt.scheme);
  const Eigen::MatrixXd T = volterra_matrix(kernel, g);
  const Eigen::MatrixXcd& W = exo.eigenvectors();
  const Eigen::MatrixXcd& Winv = exo.eigenvectors_inv();
  const Eigen::VectorXcd& lam = exo.eigenvalues();

  Eigen::MatrixXcd Pi_modes(n, nv), M_modes(n, nv);
  Eigen::VectorXcd m_modes(nv);
  const Eigen::RowVectorXd left = left_slope_row(g), right = right_slope_row(g);
  for (Eigen::Index k = 0; k < nv; ++k) {
    const cd l = lam(k);
    const cd mu = dt > 0.0 ? std::exp(l * dt) : cd(1.0);
    const cd lt = dt > 0.0 ? (1.0 - 1.0 / mu) / dt : l;
    const cd ak = exo.a().cast<cd>().dot(W.col(k));
    const cd bk = exo.b().cast<cd>().dot(W.col(k));
    const cd ck = exo.c().cast<cd>().dot(W.col(k));
    // dot() conjugates its left argument; a, b, c are real so that is harmless.
    Eigen::MatrixXcd Msys = (-a * A).cast<cd>();
    Msys.diagonal().array() += lt;
    Eigen::VectorXcd rhs = (f.cast<cd>() * ak) / (p.C * p.rho);
    Msys.row(0) = left.cast<cd>();
    Msys.row(n - 1) = right.cast<cd>();
    rhs(0) = bk;
    rhs(n - 1) = ck;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Msys);
    const Eigen::VectorXcd Pk = lu.solve(rhs);
    if (!Pk.allFinite() || (Msys * Pk - rhs).cwiseAbs().maxCoeff() > 1e-6 * (1.0 + rhs.cwiseAbs().maxCoeff())) {
      throw SolverError("regulator equation is singular for an exosystem mode");
    }
    Pi_modes.col(k) = Pk;
    M_modes.col(k) = Pk - T.cast<cd>() * Pk;
    const cd U = Pk(n - 1);
    const cd TP = (T.row(n - 1).cast<cd>() * Pk)(0);
    switch (opt.kind) {
      case ControllerKind::volterra:
        // state read one step behind when sampled
        m_modes(k) = U - TP / mu;
        break;
      case ControllerKind::convolution: {
        const double gam = opt.transport.gamma;
        if (dt > 0.0) {
          const double e = std::exp(-gam * dt);
          m_modes(k) = U / (1.0 + e * gam * dt / (mu - e * (1.0 + gam * dt)));
        } else {
          m_modes(k) = U * l / (l + gam);
        }
        break;
      }
      case ControllerKind::none:
        m_modes(k) = U;
        break;
    }
  }
  MCurve mc;
  mc.Pi = (Pi_modes * Winv).real();
  mc.M = (M_modes * Winv).real();
  mc.m = (m_modes.transpose() * Winv).real().transpose();
  mc.n = mc.M.row(0).transpose();
  return mc;
}

double m_system_residual(const MCurve& mc, const Exosystem& exo, double alpha,
                         const PhysicalParams& p, const Eigen::VectorXd& f, const Grid& g,
                         CaputoScheme scheme) {
  const Eigen::MatrixXd A = assemble_frac_operator(alpha, g, scheme);
  const Eigen::MatrixXd R =
      mc.Pi * exo.S() - p.a0() * A * mc.Pi - f * exo.a().transpose() / (p.C * p.rho);
  return R.middleRows(1, g.nx - 2).cwiseAbs().maxCoeff();
}

double control_volterra(const Eigen::VectorXd& P_hat, const PolyKernel& k, const MCurve& mc,
                        const Exosystem& exo, double t, const Grid& g) {
  if (P_hat.size() != g.nx) throw SizeError("state does not match the grid");
  return trap_row(k, g, g.nx - 1).dot(P_hat) + mc.m.dot(exo.evolve(t));
}

double control_convolution(const std::vector<double>& history, const TransportKernel& tk,
                           const MCurve& mc, const Exosystem& exo, double t, double dt) {
  double z = 0.0;
  for (std::size_t j = 0; j < history.size(); ++j) z += history[j] * tk.l(double(j) * dt, t) * dt;
  return z + mc.m.dot(exo.evolve(t));
}

Field tracking_error_target(const std::function<double(double)>& e0, double alpha,
                            const PhysicalParams& p, const Grid& g, CaputoScheme scheme) {
  PdeSpec spec;
  spec.params = p;
  spec.alpha = alpha;
  spec.scheme = scheme;
  return simulate(spec, g, e0, Controls{});
}

}  // namespace fracctl
