#pragma once

// Caputo derivatives, Riemann-Liouville integrals and Grunwald-Letnikov
// weights on uniform grids, plus closed forms used as oracles.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>

#include "fracctl/errors.hpp"

namespace fracctl {

// Diffusion order alpha in (0, 1].
class FractionalOrder {
 public:
  explicit FractionalOrder(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
      throw DomainError("fractional order must lie in (0, 1], got " + std::to_string(alpha));
    }
  }
  double value() const { return alpha_; }
  operator double() const { return alpha_; }

 private:
  double alpha_;
};

template <typename Scalar = double>
struct SampledFunction {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector values;
  Scalar dx{1};
  Scalar x0{0};

  SampledFunction() = default;
  SampledFunction(Vector v, Scalar spacing, Scalar left = Scalar(0))
      : values(std::move(v)), dx(spacing), x0(left) {
    if (values.size() < 2) throw SizeError("sampled function needs at least 2 samples");
    if (!(dx > Scalar(0))) throw DomainError("sample spacing must be positive");
  }

  Eigen::Index size() const { return values.size(); }
  Scalar x(Eigen::Index i) const { return x0 + Scalar(i) * dx; }

  template <typename F>
  static SampledFunction from(F&& f, Eigen::Index n, Scalar a, Scalar b) {
    Vector v(n);
    const Scalar h = (b - a) / Scalar(n - 1);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = f(a + Scalar(i) * h);
    return SampledFunction(std::move(v), h, a);
  }
};

using Sampled = SampledFunction<double>;
using ComplexSymbol = std::complex<double>;

enum class CaputoScheme { l1, grunwald };

// Lanczos approximation (g = 7, 9 coefficients); z > 0.
double gamma_fn(double z);

// Gamma on the whole real line except the poles, via reflection.
double gamma_reflect(double z);

// Gamma(beta+1)/Gamma(beta-alpha+1) * (t - t0)^(beta-alpha).
double caputo_power_rule(double beta, double alpha, double t, double t0 = 0.0);

// Shifted Grunwald-Letnikov weights w_j = (-1)^j binom(alpha, j).
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gl_weights(Scalar alpha, Eigen::Index n) {
  if (n < 1) throw SizeError("gl_weights needs n >= 1");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w(n);
  w(0) = Scalar(1);
  for (Eigen::Index j = 1; j < n; ++j) {
    w(j) = w(j - 1) * (Scalar(1) - (alpha + Scalar(1)) / Scalar(j));
  }
  return w;
}

// L1 coefficients b_j = (j+1)^(1-alpha) - j^(1-alpha).
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> l1_coefficients(Scalar alpha, Eigen::Index n) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b(n);
  const Scalar p = Scalar(1) - alpha;
  for (Eigen::Index j = 0; j < n; ++j) {
    b(j) = j == 0 ? Scalar(1) : std::pow(Scalar(j + 1), p) - std::pow(Scalar(j), p);
  }
  return b;
}

// Lower-triangular matrix mapping samples to the discrete left Caputo
// derivative at the same nodes. Row 0 is zero.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> caputo_matrix(
    Scalar alpha, Eigen::Index n, Scalar dx, CaputoScheme scheme = CaputoScheme::l1) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix D = Matrix::Zero(n, n);
  if (scheme == CaputoScheme::l1) {
    const auto b = l1_coefficients<Scalar>(alpha, n);
    const Scalar c = std::pow(dx, -alpha) / Scalar(gamma_fn(2.0 - double(alpha)));
    for (Eigen::Index i = 1; i < n; ++i) {
      for (Eigen::Index j = 0; j < i; ++j) {
        D(i, i - j) += c * b(j);
        D(i, i - j - 1) -= c * b(j);
      }
    }
  } else {
    // GL applied to f - f(x0), which removes the Riemann-Liouville singular term.
    const auto w = gl_weights<Scalar>(alpha, n);
    const Scalar c = std::pow(dx, -alpha);
    for (Eigen::Index i = 1; i < n; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        D(i, i - j) += c * w(j);
        D(i, 0) -= c * w(j);
      }
    }
  }
  return D;
}

template <typename Scalar = double>
SampledFunction<Scalar> caputo_left(const SampledFunction<Scalar>& f, Scalar alpha,
                                    CaputoScheme scheme = CaputoScheme::l1) {
  if (f.size() < 3) throw SizeError("caputo_left needs at least 3 samples");
  FractionalOrder check(static_cast<double>(alpha));
  (void)check;
  const auto D = caputo_matrix<Scalar>(alpha, f.size(), f.dx, scheme);
  return SampledFunction<Scalar>(D * f.values, f.dx, f.x0);
}

// Right-sided Caputo derivative on [x0, b] with b the last sample. The
// reflection x -> b - x turns it into a left derivative; the (-1)^n factor
// of the definition is absorbed by the chain rule.
template <typename Scalar = double>
SampledFunction<Scalar> caputo_right(const SampledFunction<Scalar>& f, Scalar alpha,
                                     CaputoScheme scheme = CaputoScheme::l1) {
  if (f.size() < 3) throw SizeError("caputo_right needs at least 3 samples");
  SampledFunction<Scalar> r(f.values.reverse().eval(), f.dx, f.x0);
  auto d = caputo_left<Scalar>(r, alpha, scheme);
  return SampledFunction<Scalar>(d.values.reverse().eval(), f.dx, f.x0);
}

// Product-rectangle rule for (1/Gamma(a)) int_0^x (x-s)^(a-1) f(s) ds with the
// cell value taken as the mean of its endpoints. Any a > 0 is accepted.
template <typename Scalar = double>
SampledFunction<Scalar> rl_integral(const SampledFunction<Scalar>& f, Scalar order) {
  if (!(order > Scalar(0))) throw DomainError("rl_integral order must be positive");
  const Eigen::Index n = f.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> kern(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    kern(j) = std::pow(Scalar(j + 1), order) - std::pow(Scalar(j), order);
  }
  const Scalar c = std::pow(f.dx, order) / Scalar(gamma_fn(double(order) + 1.0));
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
  for (Eigen::Index i = 1; i < n; ++i) {
    Scalar acc(0);
    for (Eigen::Index j = 0; j < i; ++j) {
      acc += kern(i - 1 - j) * Scalar(0.5) * (f.values(j) + f.values(j + 1));
    }
    out(i) = c * acc;
  }
  return SampledFunction<Scalar>(std::move(out), f.dx, f.x0);
}

// (-i s)^(alpha+1) on the branch whose real part is -|s|^(alpha+1) sin(pi alpha / 2).
ComplexSymbol phi_symbol(double s, double alpha);

}  // namespace fracctl
