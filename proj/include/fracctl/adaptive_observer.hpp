#pragma once

// Adaptive boundary observer: state copy with output injection, auxiliary
// states Lambda = [lambda1, lambda2] and a forgetting-factor least-squares
// law for theta = (d1, d2).

#include <Eigen/Dense>

#include <memory>

#include "fracctl/backstepping.hpp"
#include "fracctl/fdm_engine.hpp"
#include "fracctl/params.hpp"

namespace fracctl {

struct ObserverGains {
  Eigen::VectorXd H1;
  Eigen::VectorXd H2;
};

// H1 = V^-1{right Caputo of K at y = 0}, H2 = -V^-1{K(x, 0)}.
ObserverGains compute_gains(const PolyKernel& kernel, double alpha, const Grid& g);

struct ObserverState {
  Eigen::VectorXd P_hat;
  Eigen::Vector2d theta_hat = Eigen::Vector2d::Zero();
  Eigen::Matrix2d R = Eigen::Matrix2d::Identity();
  Eigen::MatrixXd Lambda;       // 2 x nx, rows lambda1, lambda2
  Eigen::MatrixXd Lambda_prev;  // copy before the last Lambda step
  Eigen::Vector2d theta_dot = Eigen::Vector2d::Zero();
  // regressor and innovation used by the last update
  Eigen::Vector2d regressor = Eigen::Vector2d::Zero();
  double innovation = 0.0;
  long steps = 0;
  int spd_repairs = 0;
};

struct LawRates {
  Eigen::Vector2d theta_dot;
  Eigen::Matrix2d R_dot;
};

// theta' = -R g e/(1 + g.g), R' = R - R g g^T R/(1 + g.g), with g = Lambda(0)
// and e = P_hat(0) - z_m.
LawRates adaptive_rhs(const Eigen::Matrix2d& R, const Eigen::Vector2d& g, double e);

// One RK4 step with g and e held fixed. Stores the first-stage rate in
// state.theta_dot. Re-symmetrizes R and floors its eigenvalues.
void adaptive_update(ObserverState& state, double p_tilde0, double dt);

struct ObserverOptions {
  bool adapt = true;  // false freezes theta_hat and R
  CaputoScheme scheme = CaputoScheme::l1;
};

class AdaptiveObserver {
 public:
  AdaptiveObserver(ObserverGains gains, Eigen::VectorXd f, double alpha, PhysicalParams p,
                   Grid g, ObserverOptions opt = {});

  void reset(const Eigen::VectorXd& P_hat0, const Eigen::Vector2d& theta0 = Eigen::Vector2d::Zero());

  // Advances Lambda by one step to t_next.
  void step_lambda(double t_next);
  // Full step to t_next: adaptive law, observer state, then Lambda.
  // z_m = P(0, t), y_m = C D^alpha P(0, t), u = P(1, t_next).
  void observer_step(double t_next, double z_m, double y_m, double u);

  const ObserverState& state() const { return st_; }
  const ObserverGains& gains() const { return gains_; }
  // Discrete Caputo derivative of P_hat at x = 0.
  double caputo_at_origin() const;

 private:
  ObserverGains gains_;
  Eigen::VectorXd f_;
  double alpha_;
  PhysicalParams params_;
  Grid grid_;
  ObserverOptions opt_;
  std::unique_ptr<ImplicitStepper> obs_, lam_;
  ObserverState st_;
};

}  // namespace fracctl
