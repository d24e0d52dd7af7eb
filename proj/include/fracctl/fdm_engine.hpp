#pragma once

// Implicit finite differences for
//   P_t = a(t) d/dx(C D^alpha_x P) - H(x) P_x + sources
// with P_x(0, t) given and P(1, t) given.

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracctl/fractional_core.hpp"
#include "fracctl/params.hpp"

namespace fracctl {

// Discrete d/dx o C D^alpha_x on the grid. Interior rows only; the first
// and last rows are zero and get replaced by boundary equations.
//  l1:       L1 Caputo at half nodes, centred outer difference
//  grunwald: GL Caputo at nodes, forward outer difference
Eigen::MatrixXd assemble_frac_operator(double alpha, const Grid& g,
                                       CaputoScheme scheme = CaputoScheme::l1);

// Row of the discrete Caputo derivative at x = 0 (zero by the lower-terminal
// convention, kept as a row so callers never special-case it).
Eigen::RowVectorXd caputo_origin_row(double alpha, const Grid& g);

// Second-order one-sided derivative rows at either end.
Eigen::RowVectorXd left_slope_row(const Grid& g);
Eigen::RowVectorXd right_slope_row(const Grid& g);

struct Injection {
  Eigen::VectorXd profile;
  std::function<double(double)> signal;
};

// Adds profile(x) * P(node) to the right-hand side, treated implicitly.
struct NodeCoupling {
  Eigen::VectorXd profile;
  int node = 0;
};

struct PdeSpec {
  PhysicalParams params;
  double alpha = 0.5;
  CaputoScheme scheme = CaputoScheme::l1;
  std::function<double(double, double)> forcing;  // (x, t)
  Eigen::VectorXd advection;                      // H(x); empty for none
  std::vector<Injection> injections;
  std::vector<NodeCoupling> couplings;
};

struct BoundaryData {
  double left_flux = 0.0;
  double right_value = 0.0;
};

// dt a_max / dx^(alpha+1); reported, not enforced.
double cfl_number(const PdeSpec& spec, const Grid& g);

class ImplicitStepper {
 public:
  ImplicitStepper(PdeSpec spec, Grid grid);

  // Advances p from t_next - dt to t_next. `extra` is an additional source
  // sampled on the grid at t_next.
  Eigen::VectorXd step(const Eigen::VectorXd& p, double t_next, const BoundaryData& bc,
                       const Eigen::VectorXd* extra = nullptr);

  const Eigen::MatrixXd& frac_operator() const { return A_; }
  const Grid& grid() const { return grid_; }
  const PdeSpec& spec() const { return spec_; }
  const Eigen::VectorXd& x() const { return x_; }
  long steps_taken() const { return steps_; }
  int factorizations() const { return factorizations_; }

 private:
  void factorize(double a);

  PdeSpec spec_;
  Grid grid_;
  Eigen::VectorXd x_;
  Eigen::MatrixXd A_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  std::optional<double> cached_a_;
  long steps_ = 0;
  int factorizations_ = 0;
};

struct Controls {
  std::function<double(double)> left_flux;    // P_x(0, t)
  std::function<double(double)> right_value;  // P(1, t)
};

struct Field {
  Grid grid;
  Eigen::MatrixXd data;  // nx x nt, column j holds time t_j
  std::vector<double> sup_norm;
  std::string bc_left = "neumann";
  std::string bc_right = "dirichlet";

  Eigen::VectorXd at(int j) const { return data.col(j); }
};

Field simulate(const PdeSpec& spec, const Grid& grid, const std::function<double(double)>& initial,
               const Controls& controls);

// Header row "x,x_0,...", then one row per time step "t,P_0,...".
void write_field_csv(const Field& f, std::ostream& os);

// Shortest round-trip formatting used by every CSV writer.
std::string fmt17(double v);

}  // namespace fracctl
