#pragma once

// Scenario configuration, closed-loop orchestration and run output.

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fracctl/adaptive_observer.hpp"
#include "fracctl/backstepping.hpp"
#include "fracctl/exosystem.hpp"
#include "fracctl/fdm_engine.hpp"
#include "fracctl/params.hpp"

namespace fracctl {

struct ExoConfig {
  Eigen::MatrixXd S;
  Eigen::VectorXd V0, a, b, c, q;

  Exosystem build() const { return Exosystem(S, V0, a, b, c, q); }
};

enum class ObserverKind { adaptive, none };

// What the run exercises.
//  track:       controller fed by the true plant state
//  observe:     observer only, plant driven by the open-loop feedforward
//  closed_loop: controller fed by the observer estimate
enum class RunMode { track, observe, closed_loop };

struct Scenario {
  PhysicalParams params;
  double alpha = 0.5;
  CaputoScheme scheme = CaputoScheme::l1;
  Grid grid;
  ExoConfig exo;
  ControllerKind controller = ControllerKind::volterra;
  PolyKernel kernel;
  double gamma = 5.0;
  bool sampled_design = true;
  ObserverKind observer = ObserverKind::adaptive;
  bool adapt = true;
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;
  double p0_amplitude = 4.0;  // P(x, 0) = amplitude * sin(2 pi x)
  Eigen::VectorXd f;          // empty: default_source(grid)

  void validate() const;
};

// Defaults used by the demonstration runs: decaying disturbance e^{-25 t}
// on d1 and d2, reference sin(2 pi t).
Scenario default_scenario();

// sin(2 pi x) scaled to unit L1 norm.
Eigen::VectorXd default_source(const Grid& g);

// INI-style text: [params] [grid] [exosystem] [controller] [observer] [noise].
Scenario parse_scenario(std::istream& is);
Scenario load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const Scenario& sc);

struct RunReport {
  RunMode mode = RunMode::closed_loop;
  std::vector<double> t, u, y, yd, e;
  std::vector<double> ptilde, d1, d1_hat, d2, d2_hat, w0, V1, eps, theta_err;
  Field field;
  std::map<std::string, double> metrics;
  std::string config;
};

RunReport run_closed_loop(const Scenario& sc, RunMode mode = RunMode::closed_loop);

// Summary metrics from the logged series; run_closed_loop fills them in.
std::map<std::string, double> compute_metrics(const RunReport& r, const Grid& g);

// field.csv, tracking.csv, observer.csv, report.json, plot.py
void write_run(const RunReport& r, const std::filesystem::path& dir);
void write_tracking_csv(const RunReport& r, std::ostream& os);
void write_observer_csv(const RunReport& r, std::ostream& os);
void write_plot_script(const std::filesystem::path& dir);

const char* to_string(RunMode m);
const char* to_string(ControllerKind k);

}  // namespace fracctl
