#include "fracctl/adaptive_observer.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <iostream>

#include "fracctl/errors.hpp"

namespace fracctl {

ObserverGains compute_gains(const PolyKernel& kernel, double alpha, const Grid& g) {
  Eigen::VectorXd h1(g.nx), h2(g.nx);
  for (int i = 0; i < g.nx; ++i) {
    h1(i) = kernel_right_caputo(kernel, g.x(i), 0.0, alpha);
    h2(i) = kernel_eval(kernel, g.x(i), 0.0);
  }
  return {volterra_inverse(h1, kernel, g), -volterra_inverse(h2, kernel, g)};
}

LawRates adaptive_rhs(const Eigen::Matrix2d& R, const Eigen::Vector2d& g, double e) {
  const double den = 1.0 + g.squaredNorm();
  const Eigen::Vector2d Rg = R * g;
  return {-Rg * e / den, R - Rg * Rg.transpose() / den};
}

void adaptive_update(ObserverState& s, double e, double dt) {
  const Eigen::Vector2d g = s.Lambda.rows() == 2 ? Eigen::Vector2d(s.Lambda(0, 0), s.Lambda(1, 0))
                                                 : Eigen::Vector2d::Zero();
  // theta does not enter the right-hand side, so only R needs staging
  const LawRates k1 = adaptive_rhs(s.R, g, e);
  const LawRates k2 = adaptive_rhs(s.R + 0.5 * dt * k1.R_dot, g, e);
  const LawRates k3 = adaptive_rhs(s.R + 0.5 * dt * k2.R_dot, g, e);
  const LawRates k4 = adaptive_rhs(s.R + dt * k3.R_dot, g, e);
  s.theta_dot = k1.theta_dot;
  s.regressor = g;
  s.innovation = e;
  s.theta_hat += dt / 6.0 * (k1.theta_dot + 2.0 * k2.theta_dot + 2.0 * k3.theta_dot + k4.theta_dot);
  Eigen::Matrix2d R = s.R + dt / 6.0 * (k1.R_dot + 2.0 * k2.R_dot + 2.0 * k3.R_dot + k4.R_dot);
  R = 0.5 * (R + R.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(R);
  const double floor = 1e-12 * std::max(R.trace(), 1e-300);
  if (es.eigenvalues().minCoeff() < floor) {
    const Eigen::Vector2d ev = es.eigenvalues().cwiseMax(floor);
    R = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    ++s.spd_repairs;
    std::cerr << "warning: adaptive gain matrix lost definiteness, repaired\n";
  }
  s.R = R;
  if (!s.theta_hat.allFinite() || !s.R.allFinite()) throw SolverError("adaptive law produced non-finite values");
}

AdaptiveObserver::AdaptiveObserver(ObserverGains gains, Eigen::VectorXd f, double alpha,
                                   PhysicalParams p, Grid g, ObserverOptions opt)
    : gains_(std::move(gains)), f_(std::move(f)), alpha_(alpha), params_(std::move(p)), grid_(g),
      opt_(opt) {
  if (gains_.H1.size() != g.nx || gains_.H2.size() != g.nx || f_.size() != g.nx) {
    throw SizeError("observer profiles do not match the grid");
  }
  PdeSpec os;
  os.params = params_;
  os.alpha = alpha_;
  os.scheme = opt_.scheme;
  // -a H1 (P_hat(0) - z_m): the P_hat(0) part is implicit
  os.couplings.push_back({-params_.a0() * gains_.H1, 0});
  obs_ = std::make_unique<ImplicitStepper>(os, grid_);

  PdeSpec ls;
  ls.params = params_;
  ls.alpha = alpha_;
  ls.scheme = opt_.scheme;
  ls.advection = gains_.H1;
  lam_ = std::make_unique<ImplicitStepper>(ls, grid_);
  reset(Eigen::VectorXd::Zero(g.nx));
}

void AdaptiveObserver::reset(const Eigen::VectorXd& P_hat0, const Eigen::Vector2d& theta0) {
  if (P_hat0.size() != grid_.nx) throw SizeError("initial observer state does not match the grid");
  st_ = ObserverState{};
  st_.P_hat = P_hat0;
  st_.theta_hat = theta0;
  st_.Lambda = Eigen::MatrixXd::Zero(2, grid_.nx);
  st_.Lambda_prev = st_.Lambda;
}

double AdaptiveObserver::caputo_at_origin() const {
  return caputo_origin_row(alpha_, grid_).dot(st_.P_hat);
}

void AdaptiveObserver::step_lambda(double t_next) {
  st_.Lambda_prev = st_.Lambda;
  const Eigen::VectorXd src = f_ / (params_.C * params_.rho);
  const Eigen::VectorXd l1 = st_.Lambda.row(0).transpose();
  const Eigen::VectorXd l2 = st_.Lambda.row(1).transpose();
  st_.Lambda.row(0) = lam_->step(l1, t_next, {0.0, 0.0}, &src).transpose();
  st_.Lambda.row(1) = lam_->step(l2, t_next, {1.0, 0.0}).transpose();
}

void AdaptiveObserver::observer_step(double t_next, double z_m, double y_m, double u) {
  const double e = st_.P_hat(0) - z_m;
  if (opt_.adapt) {
    adaptive_update(st_, e, grid_.dt());
  } else {
    st_.theta_dot.setZero();
    st_.regressor = Eigen::Vector2d(st_.Lambda(0, 0), st_.Lambda(1, 0));
    st_.innovation = e;
  }
  const double a = params_.a(t_next);
  Eigen::VectorXd extra = f_ * (st_.theta_hat(0) / (params_.C * params_.rho));
  extra += st_.Lambda.transpose() * st_.theta_dot;
  extra += a * gains_.H1 * z_m;
  extra += a * gains_.H2 * (y_m - caputo_at_origin());
  st_.P_hat = obs_->step(st_.P_hat, t_next, {st_.theta_hat(1), u}, &extra);
  step_lambda(t_next);
  ++st_.steps;
}

}  // namespace fracctl
