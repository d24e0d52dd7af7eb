#pragma once

// Linear signal generator V' = S V with output vectors for the domain
// disturbance d1, the boundary disturbance d2, the reference y_d and the
// measurement y_m.

#include <Eigen/Dense>

namespace fracctl {

struct ExoSignals {
  double d1 = 0.0;
  double d2 = 0.0;
  double yd = 0.0;
  double ym = 0.0;
};

class Exosystem {
 public:
  Exosystem() = default;
  // Throws DomainError for repeated eigenvalues or Re(lambda) > 0.
  Exosystem(Eigen::MatrixXd S, Eigen::VectorXd V0, Eigen::VectorXd a, Eigen::VectorXd b,
            Eigen::VectorXd c, Eigen::VectorXd q);

  // Scalar decay S = -25, V0 = 1, all outputs reading the single state.
  static Exosystem scalar(double s, double v0, double a, double b, double c, double q);

  Eigen::Index dim() const { return S_.rows(); }
  // True when some eigenvalue sits on the imaginary axis.
  bool marginal() const { return marginal_; }

  Eigen::VectorXd evolve(double t) const;
  // exp(S t) as a real matrix.
  Eigen::MatrixXd transition(double t) const;
  ExoSignals signals(double t) const;
  ExoSignals signals_of(const Eigen::VectorXd& V) const;

  const Eigen::MatrixXd& S() const { return S_; }
  const Eigen::VectorXd& V0() const { return V0_; }
  const Eigen::VectorXd& a() const { return a_; }
  const Eigen::VectorXd& b() const { return b_; }
  const Eigen::VectorXd& c() const { return c_; }
  const Eigen::VectorXd& q() const { return q_; }
  const Eigen::VectorXcd& eigenvalues() const { return lambda_; }
  const Eigen::MatrixXcd& eigenvectors() const { return W_; }
  const Eigen::MatrixXcd& eigenvectors_inv() const { return Winv_; }

 private:
  Eigen::MatrixXd S_;
  Eigen::VectorXd V0_, a_, b_, c_, q_;
  Eigen::VectorXcd lambda_;
  Eigen::MatrixXcd W_, Winv_;
  bool marginal_ = false;
};

}  // namespace fracctl
