#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracctl/errors.hpp"
#include "fracctl/exosystem.hpp"

using namespace fracctl;

namespace {

Eigen::VectorXd rk4(const Eigen::MatrixXd& S, Eigen::VectorXd v, double T, int n) {
  const double h = T / n;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd k1 = S * v, k2 = S * (v + 0.5 * h * k1), k3 = S * (v + 0.5 * h * k2), k4 = S * (v + h * k3);
    v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return v;
}

Exosystem demo() {
  const double w = 2.0 * std::numbers::pi;
  Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
  S(0, 0) = -25.0;
  S(1, 2) = w;
  S(2, 1) = -w;
  return Exosystem(S, Eigen::Vector3d(1, 0, 1), Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(1, 0, 0),
                   Eigen::Vector3d(0, 1, 0), Eigen::Vector3d::Zero());
}

}  // namespace

TEST(Exosystem, EvolveMatchesRk4) {
  const Exosystem e = demo();
  for (double t : {0.0, 0.13, 1.0, 2.7}) {
    const Eigen::VectorXd ref = rk4(e.S(), e.V0(), t, 20000);
    EXPECT_LT((e.evolve(t) - ref).cwiseAbs().maxCoeff(), 1e-10) << t;
  }
}

TEST(Exosystem, SignalsAreDecayAndSine) {
  const Exosystem e = demo();
  const auto s = e.signals(0.3);
  EXPECT_NEAR(s.d1, std::exp(-7.5), 1e-14);
  EXPECT_NEAR(s.d2, std::exp(-7.5), 1e-14);
  EXPECT_NEAR(s.yd, std::sin(0.6 * std::numbers::pi), 1e-13);
  EXPECT_EQ(s.ym, 0.0);
  EXPECT_TRUE(e.marginal());
}

TEST(Exosystem, ScalarDecay) {
  const Exosystem e = Exosystem::scalar(-25.0, 1.0, 1.0, 1.0, 1.0, 0.0);
  EXPECT_NEAR(e.evolve(0.1)(0), std::exp(-2.5), 1e-15);
  EXPECT_FALSE(e.marginal());
  EXPECT_NEAR(e.transition(0.2)(0, 0), std::exp(-5.0), 1e-15);
}

TEST(Exosystem, RejectsUnstableAndRepeated) {
  EXPECT_THROW(Exosystem::scalar(0.5, 1, 1, 1, 1, 0), DomainError);
  const Eigen::Matrix2d Z = Eigen::Matrix2d::Zero();
  const Eigen::Vector2d v(1, 1);
  EXPECT_THROW(Exosystem(Z, v, v, v, v, v), DomainError);
  EXPECT_THROW(Exosystem(Eigen::MatrixXd::Zero(2, 3), v, v, v, v, v), DomainError);
  Eigen::Matrix2d S;
  S << -1.0, 0.0, 0.0, -2.0;
  EXPECT_THROW(Exosystem(S, Eigen::Vector3d::Ones(), v, v, v, v), DomainError);
}

TEST(Exosystem, RejectsNegativeTime) { EXPECT_THROW(demo().evolve(-1.0), DomainError); }

TEST(Exosystem, TransitionIsSemigroup) {
  const Exosystem e = demo();
  const Eigen::MatrixXd a = e.transition(0.4) * e.transition(0.35);
  EXPECT_LT((a - e.transition(0.75)).cwiseAbs().maxCoeff(), 1e-13);
}
