#pragma once

#include <functional>
#include <string>

#include "fracctl/errors.hpp"

namespace fracctl {

// Reservoir constants. k(t) defaults to the constant k0.
struct PhysicalParams {
  double k0 = 5.0;
  std::function<double(double)> k_of_t;
  double mu = 1.0;
  double C = 1.0;
  double rho = 1.0726;
  double L = 1.0;

  double k(double t) const { return k_of_t ? k_of_t(t) : k0; }
  // Diffusivity k(t)/(C mu).
  double a(double t) const { return k(t) / (C * mu); }
  double a0() const { return k0 / (C * mu); }
  bool constant_k() const { return !k_of_t; }

  void validate() const {
    if (!(k0 > 0.0)) throw DomainError("k0 must be positive");
    if (!(mu > 0.0 && C > 0.0 && rho > 0.0 && L > 0.0)) {
      throw DomainError("mu, C, rho and L must be positive");
    }
  }
};

// Uniform lattice on [0, L] x [0, T].
struct Grid {
  int nx = 201;
  int nt = 2001;
  double L = 1.0;
  double T = 3.0;

  Grid() = default;
  Grid(int nx_, int nt_, double L_, double T_) : nx(nx_), nt(nt_), L(L_), T(T_) { validate(); }

  double dx() const { return L / double(nx - 1); }
  double dt() const { return T / double(nt - 1); }
  double x(int i) const { return double(i) * dx(); }
  double t(int j) const { return double(j) * dt(); }

  void validate() const {
    if (nx < 8) throw DomainError("grid needs nx >= 8");
    if (nt < 2) throw DomainError("grid needs nt >= 2");
    if (!(L > 0.0 && T > 0.0)) throw DomainError("grid extents must be positive");
  }
};

}  // namespace fracctl
