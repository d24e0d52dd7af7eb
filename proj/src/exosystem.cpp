#include "fracctl/exosystem.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "fracctl/errors.hpp"

namespace fracctl {

namespace {
constexpr double kMarginTol = 1e-12;
}

Exosystem::Exosystem(Eigen::MatrixXd S, Eigen::VectorXd V0, Eigen::VectorXd a, Eigen::VectorXd b,
                     Eigen::VectorXd c, Eigen::VectorXd q)
    : S_(std::move(S)), V0_(std::move(V0)), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)),
      q_(std::move(q)) {
  const Eigen::Index n = S_.rows();
  if (n == 0 || S_.cols() != n) throw DomainError("exosystem matrix must be square and non-empty");
  for (const auto* v : {&V0_, &a_, &b_, &c_, &q_}) {
    if (v->size() != n) throw DomainError("exosystem vectors must match the matrix size");
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(S_);
  if (es.info() != Eigen::Success) throw DomainError("exosystem eigensolve failed");
  lambda_ = es.eigenvalues();
  W_ = es.eigenvectors();
  const double scale = std::max(1.0, S_.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lambda_(i).real() > kMarginTol * scale) {
      throw DomainError("exosystem has an eigenvalue with positive real part");
    }
    if (std::abs(lambda_(i).real()) <= kMarginTol * scale) marginal_ = true;
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(lambda_(i) - lambda_(j)) <= 1e-9 * scale) {
        throw DomainError("exosystem eigenvalues must be distinct");
      }
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(W_);
  if (!lu.isInvertible()) throw DomainError("exosystem matrix is not diagonalizable");
  Winv_ = lu.inverse();
}

Exosystem Exosystem::scalar(double s, double v0, double a, double b, double c, double q) {
  Eigen::MatrixXd S(1, 1);
  S(0, 0) = s;
  auto one = [](double v) {
    Eigen::VectorXd r(1);
    r(0) = v;
    return r;
  };
  return Exosystem(S, one(v0), one(a), one(b), one(c), one(q));
}

Eigen::MatrixXd Exosystem::transition(double t) const {
  const Eigen::VectorXcd e = (lambda_ * t).array().exp();
  return (W_ * e.asDiagonal() * Winv_).real();
}

Eigen::VectorXd Exosystem::evolve(double t) const {
  if (t < 0.0) throw DomainError("exosystem evolve requires t >= 0");
  return transition(t) * V0_;
}

ExoSignals Exosystem::signals_of(const Eigen::VectorXd& V) const {
  return {a_.dot(V), b_.dot(V), c_.dot(V), q_.dot(V)};
}

ExoSignals Exosystem::signals(double t) const { return signals_of(evolve(t)); }

}  // namespace fracctl
