#include "fracctl/fdm_engine.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace fracctl {

Eigen::MatrixXd assemble_frac_operator(double alpha, const Grid& g, CaputoScheme scheme) {
  FractionalOrder check(alpha);
  (void)check;
  const int n = g.nx;
  const double dx = g.dx();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  if (scheme == CaputoScheme::l1) {
    // Caputo at x_{i+1/2}: exact integral of the piecewise-linear interpolant.
    Eigen::VectorXd c(n);
    const double p = 1.0 - alpha;
    c(0) = std::pow(0.5, p);
    for (int j = 1; j < n; ++j) c(j) = std::pow(j + 0.5, p) - std::pow(j - 0.5, p);
    const double k = std::pow(dx, -alpha) / gamma_fn(2.0 - alpha);
    Eigen::MatrixXd half = Eigen::MatrixXd::Zero(n - 1, n);
    for (int i = 0; i < n - 1; ++i) {
      for (int j = 0; j <= i; ++j) {
        half(i, i + 1 - j) += k * c(j);
        half(i, i - j) -= k * c(j);
      }
    }
    for (int i = 1; i < n - 1; ++i) A.row(i) = (half.row(i) - half.row(i - 1)) / dx;
  } else {
    const Eigen::MatrixXd D = caputo_matrix<double>(alpha, n, dx, CaputoScheme::grunwald);
    for (int i = 1; i < n - 1; ++i) A.row(i) = (D.row(i + 1) - D.row(i)) / dx;
  }
  return A;
}

Eigen::RowVectorXd caputo_origin_row(double, const Grid& g) {
  return Eigen::RowVectorXd::Zero(g.nx);
}

Eigen::RowVectorXd left_slope_row(const Grid& g) {
  Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(g.nx);
  const double h = g.dx();
  r(0) = -1.5 / h;
  r(1) = 2.0 / h;
  r(2) = -0.5 / h;
  return r;
}

Eigen::RowVectorXd right_slope_row(const Grid& g) {
  Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(g.nx);
  const double h = g.dx();
  const int n = g.nx;
  r(n - 1) = 1.5 / h;
  r(n - 2) = -2.0 / h;
  r(n - 3) = 0.5 / h;
  return r;
}

double cfl_number(const PdeSpec& spec, const Grid& g) {
  double a_max = spec.params.a0();
  for (int j = 0; j < g.nt; ++j) a_max = std::max(a_max, spec.params.a(g.t(j)));
  return g.dt() * a_max / std::pow(g.dx(), spec.alpha + 1.0);
}

ImplicitStepper::ImplicitStepper(PdeSpec spec, Grid grid)
    : spec_(std::move(spec)), grid_(grid) {
  grid_.validate();
  spec_.params.validate();
  x_ = Eigen::VectorXd::LinSpaced(grid_.nx, 0.0, grid_.L);
  A_ = assemble_frac_operator(spec_.alpha, grid_, spec_.scheme);
  if (spec_.advection.size() != 0 && spec_.advection.size() != grid_.nx) {
    throw SizeError("advection profile does not match the grid");
  }
  for (const auto& inj : spec_.injections) {
    if (inj.profile.size() != grid_.nx) throw SizeError("injection profile does not match the grid");
  }
  for (const auto& c : spec_.couplings) {
    if (c.profile.size() != grid_.nx || c.node < 0 || c.node >= grid_.nx) {
      throw SizeError("node coupling does not match the grid");
    }
  }
}

void ImplicitStepper::factorize(double a) {
  const int n = grid_.nx;
  const double dt = grid_.dt(), dx = grid_.dx();
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) - dt * a * A_;
  if (spec_.advection.size() == n) {
    for (int i = 1; i < n - 1; ++i) {
      const double h = spec_.advection(i);
      if (h >= 0.0) {
        M(i, i) += dt * h / dx;
        M(i, i - 1) -= dt * h / dx;
      } else {
        M(i, i + 1) += dt * h / dx;
        M(i, i) -= dt * h / dx;
      }
    }
  }
  for (const auto& c : spec_.couplings) {
    for (int i = 1; i < n - 1; ++i) M(i, c.node) -= dt * c.profile(i);
  }
  M.row(0) = left_slope_row(grid_);
  M.row(n - 1).setZero();
  M(n - 1, n - 1) = 1.0;
  lu_.compute(M);
  if (!std::isfinite(lu_.rcond()) || lu_.rcond() < 1e-14) {
    throw SolverError("implicit step matrix is singular at step " + std::to_string(steps_));
  }
  cached_a_ = a;
  ++factorizations_;
}

Eigen::VectorXd ImplicitStepper::step(const Eigen::VectorXd& p, double t_next,
                                      const BoundaryData& bc, const Eigen::VectorXd* extra) {
  const int n = grid_.nx;
  if (p.size() != n) throw SizeError("state does not match the grid");
  const double a = spec_.params.a(t_next);
  if (!cached_a_ || *cached_a_ != a) factorize(a);
  const double dt = grid_.dt();
  Eigen::VectorXd rhs = p;
  if (spec_.forcing) {
    for (int i = 0; i < n; ++i) rhs(i) += dt * spec_.forcing(x_(i), t_next);
  }
  for (const auto& inj : spec_.injections) rhs += dt * inj.signal(t_next) * inj.profile;
  if (extra) rhs += dt * *extra;
  rhs(0) = bc.left_flux;
  rhs(n - 1) = bc.right_value;
  Eigen::VectorXd out = lu_.solve(rhs);
  ++steps_;
  if (!out.allFinite()) {
    throw SolverError("non-finite state at step " + std::to_string(steps_));
  }
  return out;
}

Field simulate(const PdeSpec& spec, const Grid& grid, const std::function<double(double)>& initial,
               const Controls& controls) {
  ImplicitStepper stepper(spec, grid);
  Field f;
  f.grid = grid;
  f.data.resize(grid.nx, grid.nt);
  Eigen::VectorXd p(grid.nx);
  for (int i = 0; i < grid.nx; ++i) p(i) = initial ? initial(stepper.x()(i)) : 0.0;
  f.data.col(0) = p;
  f.sup_norm.push_back(p.cwiseAbs().maxCoeff());
  for (int j = 1; j < grid.nt; ++j) {
    const double t = grid.t(j);
    BoundaryData bc;
    bc.left_flux = controls.left_flux ? controls.left_flux(t) : 0.0;
    bc.right_value = controls.right_value ? controls.right_value(t) : 0.0;
    p = stepper.step(p, t, bc);
    f.data.col(j) = p;
    f.sup_norm.push_back(p.cwiseAbs().maxCoeff());
  }
  return f;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_field_csv(const Field& f, std::ostream& os) {
  os << "x";
  for (int i = 0; i < f.grid.nx; ++i) os << ',' << fmt17(f.grid.x(i));
  os << '\n';
  for (int j = 0; j < f.data.cols(); ++j) {
    os << fmt17(f.grid.t(j));
    for (int i = 0; i < f.grid.nx; ++i) os << ',' << fmt17(f.data(i, j));
    os << '\n';
  }
}

}  // namespace fracctl
