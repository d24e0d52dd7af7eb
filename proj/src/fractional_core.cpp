#include "fracctl/fractional_core.hpp"

#include <array>
#include <limits>
#include <string>

namespace fracctl {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

}  // namespace

double gamma_fn(double z) {
  if (!(z > 0.0)) throw DomainError("gamma_fn requires z > 0, got " + std::to_string(z));
  if (z < 0.5) {
    // Reflection keeps the series in its accurate range.
    return std::numbers::pi / (std::sin(std::numbers::pi * z) * gamma_fn(1.0 - z));
  }
  const double x = z - 1.0;
  double a = kLanczos[0];
  const double t = x + kLanczosG + 0.5;
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (x + double(i));
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

double gamma_reflect(double z) {
  if (z > 0.0) return gamma_fn(z);
  if (z == std::floor(z)) throw DomainError("gamma pole at " + std::to_string(z));
  return std::numbers::pi / (std::sin(std::numbers::pi * z) * gamma_fn(1.0 - z));
}

double caputo_power_rule(double beta, double alpha, double t, double t0) {
  if (t < t0) throw DomainError("caputo_power_rule requires t >= t0");
  if (beta == 0.0) return 0.0;  // Caputo kills constants
  const double den_arg = beta - alpha + 1.0;
  if (den_arg <= 0.0 && den_arg == std::floor(den_arg)) {
    throw DomainError("caputo_power_rule hits a gamma pole");
  }
  const double p = beta - alpha;
  if (t == t0) {
    if (p > 0.0) return 0.0;
    if (p == 0.0) return gamma_fn(beta + 1.0) / gamma_reflect(den_arg);
    return std::numeric_limits<double>::infinity();
  }
  return gamma_fn(beta + 1.0) / gamma_reflect(den_arg) * std::pow(t - t0, p);
}

ComplexSymbol phi_symbol(double s, double alpha) {
  if (s == 0.0) return {0.0, 0.0};
  const double mag = std::pow(std::abs(s), alpha + 1.0);
  const double sn = std::sin(std::numbers::pi * alpha / 2.0);
  const double cs = std::cos(std::numbers::pi * alpha / 2.0);
  if (s > 0.0) return {-mag * sn, -mag * cs};
  return {-mag * sn, mag * cs};
}

}  // namespace fracctl
