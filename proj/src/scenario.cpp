#include "fracctl/scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

#include <json.hpp>

#include "fracctl/errors.hpp"
#include "fracctl/quadrature.hpp"

namespace fracctl {

namespace {

constexpr double kLyapunovTol = 1e-6;

double sup_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

// least-squares slope of log(v) against t over t >= t_from
double log_slope(const std::vector<double>& t, const std::vector<double>& v, double t_from) {
  double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_from || !(v[i] > 0.0)) continue;
    const double y = std::log(v[i]);
    n += 1;
    st += t[i];
    sy += y;
    stt += t[i] * t[i];
    sty += t[i] * y;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sty - st * sy) / (n * stt - st * st);
}

void check_vec(const Eigen::VectorXd& v, Eigen::Index n, const char* name) {
  if (v.size() != n) throw ConfigError(std::string("exosystem.") + name + " must have one entry per state");
}

}  // namespace

const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::track: return "track";
    case RunMode::observe: return "observe";
    case RunMode::closed_loop: return "closed-loop";
  }
  return "?";
}

const char* to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::volterra: return "volterra";
    case ControllerKind::convolution: return "convolution";
    case ControllerKind::none: return "none";
  }
  return "?";
}

Eigen::VectorXd default_source(const Grid& g) {
  Eigen::VectorXd f(g.nx);
  for (int i = 0; i < g.nx; ++i) f(i) = std::sin(2.0 * std::numbers::pi * g.x(i) / g.L);
  const Eigen::VectorXd w = trapezoid_weights(g.nx, g.dx());
  return f / w.dot(f.cwiseAbs());
}

Scenario default_scenario() {
  Scenario sc;
  const double w = 2.0 * std::numbers::pi;
  sc.exo.S = Eigen::MatrixXd::Zero(3, 3);
  sc.exo.S(0, 0) = -25.0;
  sc.exo.S(1, 2) = w;
  sc.exo.S(2, 1) = -w;
  sc.exo.V0 = Eigen::Vector3d(1.0, 0.0, 1.0);
  sc.exo.a = Eigen::Vector3d(1.0, 0.0, 0.0);
  sc.exo.b = Eigen::Vector3d(1.0, 0.0, 0.0);
  sc.exo.c = Eigen::Vector3d(0.0, 1.0, 0.0);
  sc.exo.q = Eigen::Vector3d::Zero();
  return sc;
}

void Scenario::validate() const {
  params.validate();
  grid.validate();
  (void)FractionalOrder(alpha);
  if (grid.L != params.L) throw ConfigError("grid length must equal params.L");
  const Eigen::Index n = exo.S.rows();
  if (n == 0 || exo.S.cols() != n) throw ConfigError("exosystem.S must be square and non-empty");
  check_vec(exo.V0, n, "V0");
  check_vec(exo.a, n, "a");
  check_vec(exo.b, n, "b");
  check_vec(exo.c, n, "c");
  check_vec(exo.q, n, "q");
  if (kernel.m < 1) throw ConfigError("controller.m must be >= 1");
  if (!(gamma > 0.0)) throw ConfigError("controller.gamma must be positive");
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise.sigma must be >= 0");
  if (f.size() != 0 && f.size() != grid.nx) throw ConfigError("source profile does not match the grid");
  try {
    (void)exo.build();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

RunReport run_closed_loop(const Scenario& sc, RunMode mode) {
  sc.validate();
  const Grid& g = sc.grid;
  const int n = g.nx, N = g.nx - 1;
  const double dt = g.dt();
  const Exosystem exo = sc.exo.build();
  const Eigen::VectorXd f = sc.f.size() ? sc.f : default_source(g);
  const double cr = sc.params.C * sc.params.rho;
  const bool with_observer = mode != RunMode::track;
  if (with_observer && sc.observer != ObserverKind::adaptive) {
    throw ConfigError(std::string(to_string(mode)) + " needs observer.kind = adaptive");
  }

  // observe mode drives the plant with the open-loop feedforward Pi(1) V
  const ControllerKind kind = mode == RunMode::observe ? ControllerKind::none : sc.controller;
  const bool controlled = mode == RunMode::observe || sc.controller != ControllerKind::none;
  MOptions mopt;
  mopt.kind = kind;
  mopt.transport.gamma = sc.gamma;
  mopt.scheme = sc.scheme;
  mopt.sample_dt = sc.sampled_design ? dt : 0.0;
  MCurve mc;
  if (controlled) mc = solve_M(exo, sc.kernel, sc.alpha, sc.params, f, g, mopt);

  PdeSpec plant_spec;
  plant_spec.params = sc.params;
  plant_spec.alpha = sc.alpha;
  plant_spec.scheme = sc.scheme;
  ImplicitStepper plant(plant_spec, g);

  std::optional<AdaptiveObserver> obs;
  if (with_observer) {
    ObserverOptions oo;
    oo.adapt = sc.adapt;
    oo.scheme = sc.scheme;
    obs.emplace(compute_gains(sc.kernel, sc.alpha, g), f, sc.alpha, sc.params, g, oo);
  }

  std::mt19937_64 rng(sc.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::RowVectorXd origin_row = caputo_origin_row(sc.alpha, g);
  const Eigen::RowVectorXd slope_row = right_slope_row(g);
  const TransportKernel tk{sc.gamma};

  Eigen::VectorXd P(n);
  for (int i = 0; i < n; ++i) P(i) = sc.p0_amplitude * std::sin(2.0 * std::numbers::pi * g.x(i) / g.L);

  RunReport r;
  r.mode = mode;
  r.config = serialize_scenario(sc);
  r.field.grid = g;
  r.field.data.resize(n, g.nt);
  Eigen::Vector2d theta_prev_hat = Eigen::Vector2d::Zero();

  auto log = [&](int j, double u, const ExoSignals& s, double eps) {
    const double t = g.t(j);
    r.field.data.col(j) = P;
    r.field.sup_norm.push_back(P.cwiseAbs().maxCoeff());
    const double y = slope_row.dot(P);
    r.t.push_back(t);
    r.u.push_back(u);
    r.y.push_back(y);
    r.yd.push_back(s.yd);
    r.e.push_back(y - s.yd);
    if (!obs) return;
    const ObserverState& st = obs->state();
    const Eigen::Vector2d theta(s.d1, s.d2);
    const Eigen::Vector2d tt = st.theta_hat - theta;
    r.ptilde.push_back(sup_diff(st.P_hat, P));
    r.d1.push_back(s.d1);
    r.d1_hat.push_back(st.theta_hat(0));
    r.d2.push_back(s.d2);
    r.d2_hat.push_back(st.theta_hat(1));
    r.w0.push_back((st.P_hat(0) - P(0)) - st.Lambda.col(0).dot(tt));
    r.V1.push_back(tt.dot(st.R.ldlt().solve(tt)));
    r.eps.push_back(eps);
    r.theta_err.push_back(tt.norm());
  };

  log(0, P(N), exo.signals(0.0), 0.0);
  std::vector<double> history;
  history.reserve(g.nt);
  for (int j = 0; j + 1 < g.nt; ++j) {
    const double t1 = g.t(j + 1);
    const ExoSignals s0 = exo.signals(g.t(j));
    const double zm = P(0) + sc.noise_sigma * normal(rng);
    const double ym = origin_row.dot(P) + sc.noise_sigma * normal(rng);
    const Eigen::VectorXd& feed = mode == RunMode::closed_loop ? obs->state().P_hat : P;
    history.push_back(feed(N));

    double u = 0.0;
    if (controlled) {
      switch (kind) {
        case ControllerKind::volterra:
          u = control_volterra(feed, sc.kernel, mc, exo, t1, g);
          break;
        case ControllerKind::convolution:
          u = control_convolution(history, tk, mc, exo, t1, dt);
          break;
        case ControllerKind::none:
          u = mc.m.dot(exo.evolve(t1));
          break;
      }
    }
    const ExoSignals s1 = exo.signals(t1);
    const Eigen::VectorXd src = f * (s1.d1 / cr);
    try {
      P = plant.step(P, t1, {s1.d2, u}, &src);
    } catch (const SolverError& e) {
      throw SolverError(std::string("plant: ") + e.what());
    }
    double eps = 0.0;
    if (obs) {
      theta_prev_hat = obs->state().theta_hat;
      obs->observer_step(t1, zm, ym, u);
      const ObserverState& st = obs->state();
      eps = st.innovation - st.regressor.dot(theta_prev_hat - Eigen::Vector2d(s0.d1, s0.d2));
    }
    log(j + 1, u, s1, eps);
  }
  r.metrics = compute_metrics(r, g);
  r.metrics["cfl"] = cfl_number(plant_spec, g);
  if (obs) r.metrics["spd_repairs"] = obs->state().spd_repairs;
  return r;
}

std::map<std::string, double> compute_metrics(const RunReport& r, const Grid& g) {
  std::map<std::string, double> m;
  const double T = r.t.empty() ? 0.0 : r.t.back();
  double peak = 0.0, late = 0.0, umax = 0.0;
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    peak = std::max(peak, std::abs(r.e[i]));
    if (r.t[i] >= 2.0 * T / 3.0) late = std::max(late, std::abs(r.e[i]));
    umax = std::max(umax, std::abs(r.u[i]));
  }
  m["e_peak"] = peak;
  m["e_late_max"] = late;
  m["e_late_ratio"] = peak > 0.0 ? late / peak : 0.0;
  m["u_max"] = umax;
  if (r.field.data.cols() > 0 && g.nx >= 4) {
    const Eigen::VectorXd p = r.field.data.col(r.field.data.cols() - 1);
    const int N = g.nx - 1;
    const double h = g.dx();
    const double d3 = (p(N) - 3.0 * p(N - 1) + 3.0 * p(N - 2) - p(N - 3)) / (h * h * h);
    // leading error term of the one-sided slope used for y
    m["y_truncation_estimate"] = h * h / 3.0 * std::abs(d3);
  }
  if (!r.ptilde.empty()) {
    m["ptilde_initial"] = r.ptilde.front();
    m["ptilde_final"] = r.ptilde.back();
    m["ptilde_ratio"] = r.ptilde.front() > 0.0 ? r.ptilde.back() / r.ptilde.front() : 0.0;
    m["theta_err_final"] = r.theta_err.back();
    m["theta_log_slope"] = log_slope(r.t, r.theta_err, T / 3.0);
    const double dt = g.dt();
    std::size_t ok = 0, total = 0;
    for (std::size_t i = 0; i + 1 < r.V1.size(); ++i) {
      const double lhs = (r.V1[i + 1] - r.V1[i]) / dt;
      const double rhs = -0.5 * (r.V1[i] + r.V1[i + 1]) + r.eps[i + 1] * r.eps[i + 1];
      ++total;
      if (lhs <= rhs + kLyapunovTol) ++ok;
    }
    m["lyapunov_fraction"] = total ? double(ok) / double(total) : 1.0;
  }
  return m;
}

void write_tracking_csv(const RunReport& r, std::ostream& os) {
  os << "t,u,y,yd,e\n";
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    os << fmt17(r.t[i]) << ',' << fmt17(r.u[i]) << ',' << fmt17(r.y[i]) << ',' << fmt17(r.yd[i]) << ','
       << fmt17(r.e[i]) << '\n';
  }
}

void write_observer_csv(const RunReport& r, std::ostream& os) {
  os << "t,ptilde_inf,d1,d1_hat,d2,d2_hat,w0,V1,eps,theta_err\n";
  for (std::size_t i = 0; i < r.ptilde.size(); ++i) {
    os << fmt17(r.t[i]) << ',' << fmt17(r.ptilde[i]) << ',' << fmt17(r.d1[i]) << ',' << fmt17(r.d1_hat[i])
       << ',' << fmt17(r.d2[i]) << ',' << fmt17(r.d2_hat[i]) << ',' << fmt17(r.w0[i]) << ','
       << fmt17(r.V1[i]) << ',' << fmt17(r.eps[i]) << ',' << fmt17(r.theta_err[i]) << '\n';
  }
}

void write_plot_script(const std::filesystem::path& dir) {
  std::ofstream os(dir / "plot.py");
  if (!os) throw ConfigError("cannot write " + (dir / "plot.py").string());
  os << R"(import os
import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))

def load(name):
    return np.genfromtxt(os.path.join(here, name), delimiter=",", names=True)

tr = load("tracking.csv")
fig, ax = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
ax[0].plot(tr["t"], tr["y"], label="y")
ax[0].plot(tr["t"], tr["yd"], "--", label="y_d")
ax[0].legend()
ax[1].plot(tr["t"], tr["e"])
ax[1].set_ylabel("e")
ax[1].set_xlabel("t")
fig.savefig(os.path.join(here, "tracking.png"), dpi=120)

raw = np.loadtxt(os.path.join(here, "field.csv"), delimiter=",", skiprows=1)
x = np.loadtxt(os.path.join(here, "field.csv"), delimiter=",", max_rows=1, usecols=range(1, raw.shape[1]))
t, P = raw[:, 0], raw[:, 1:]
step = max(1, len(t) // 200)
fig = plt.figure(figsize=(7, 5))
ax = fig.add_subplot(projection="3d")
X, Tg = np.meshgrid(x, t[::step])
ax.plot_surface(X, Tg, P[::step], cmap="viridis", linewidth=0)
ax.set_xlabel("x")
ax.set_ylabel("t")
fig.savefig(os.path.join(here, "field.png"), dpi=120)

if os.path.exists(os.path.join(here, "observer.csv")):
    ob = load("observer.csv")
    fig, ax = plt.subplots(3, 1, figsize=(7, 8), sharex=True)
    ax[0].semilogy(ob["t"], ob["ptilde_inf"])
    ax[0].set_ylabel("|P - P_hat|")
    ax[1].plot(ob["t"], ob["d1"], label="d1")
    ax[1].plot(ob["t"], ob["d1_hat"], "--", label="d1 estimate")
    ax[1].legend()
    ax[2].plot(ob["t"], ob["d2"], label="d2")
    ax[2].plot(ob["t"], ob["d2_hat"], "--", label="d2 estimate")
    ax[2].legend()
    ax[2].set_xlabel("t")
    fig.savefig(os.path.join(here, "observer.png"), dpi=120)
)";
}

void write_run(const RunReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream os(dir / name);
    if (!os) throw ConfigError("cannot write " + (dir / name).string());
    return os;
  };
  {
    auto os = open("field.csv");
    write_field_csv(r.field, os);
  }
  {
    auto os = open("tracking.csv");
    write_tracking_csv(r, os);
  }
  std::vector<std::string> files = {"field.csv", "tracking.csv"};
  if (!r.ptilde.empty()) {
    auto os = open("observer.csv");
    write_observer_csv(r, os);
    files.push_back("observer.csv");
  }
  nlohmann::ordered_json j;
  j["mode"] = to_string(r.mode);
  j["steps"] = r.t.empty() ? 0 : r.t.size() - 1;
  for (const auto& [k, v] : r.metrics) j["metrics"][k] = v;
  j["files"] = files;
  j["config"] = r.config;
  {
    auto os = open("report.json");
    os << j.dump(2) << '\n';
  }
  write_plot_script(dir);
}

}  // namespace fracctl
