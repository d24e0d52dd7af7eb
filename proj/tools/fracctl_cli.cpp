// Command line front end: open-loop runs, Green function probes, the
// stability bound, kernel checks and the controller/observer scenarios.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fracctl/backstepping.hpp"
#include "fracctl/errors.hpp"
#include "fracctl/green_solver.hpp"
#include "fracctl/scenario.hpp"

namespace fs = std::filesystem;
using namespace fracctl;

namespace {

constexpr int kConfigExit = 2;
constexpr int kNumericExit = 3;

struct Globals {
  std::string config;
  std::string out = "run";
  long long seed = -1;
};

Scenario load(const Globals& g) {
  Scenario sc = g.config.empty() ? default_scenario() : load_scenario(g.config);
  if (g.seed >= 0) sc.seed = std::uint64_t(g.seed);
  return sc;
}

void print_metrics(const RunReport& r) {
  for (const auto& [k, v] : r.metrics) std::printf("%-24s %.6g\n", k.c_str(), v);
}

int run_scenario(const Globals& gl, RunMode mode, const std::string& controller) {
  Scenario sc = load(gl);
  if (controller == "volterra") sc.controller = ControllerKind::volterra;
  else if (controller == "convolution") sc.controller = ControllerKind::convolution;
  else if (controller == "none") sc.controller = ControllerKind::none;
  else if (!controller.empty()) throw ConfigError("unknown controller " + controller);
  const RunReport r = run_closed_loop(sc, mode);
  write_run(r, gl.out);
  print_metrics(r);
  std::printf("wrote %s\n", gl.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractional diffusion control toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals gl;
  app.add_option("--config", gl.config, "scenario file")->check(CLI::ExistingFile);
  app.add_option("--out", gl.out, "output directory");
  app.add_option("--seed", gl.seed, "noise seed override")->check(CLI::NonNegativeNumber);

  auto* sim = app.add_subcommand("simulate", "open-loop plant, u = 0");

  auto* green = app.add_subcommand("green", "Green function value and profile");
  double gx = 0.0, gt = 0.1, galpha = 0.5, grange = 2.0;
  int gn = 401;
  green->add_option("--x", gx);
  green->add_option("--t", gt)->check(CLI::PositiveNumber);
  green->add_option("--alpha", galpha);
  green->add_option("--range", grange, "profile on [-range, range]")->check(CLI::PositiveNumber);
  green->add_option("--points", gn)->check(CLI::Range(2, 100000));

  auto* bound = app.add_subcommand("bound", "bound on sup |P| for separable forcing q(x) r(t)");
  double bq = 0.0, br = 1.0, bu = 0.0, balpha = 0.5;
  int bnx = 201;
  bound->add_option("--q", bq, "amplitude of q(x) = q sin(pi x)");
  bound->add_option("--r", br, "sup |r(t)|");
  bound->add_option("--umax", bu);
  bound->add_option("--alpha", balpha);
  bound->add_option("--nx", bnx)->check(CLI::Range(8, 1000000));

  auto* vk = app.add_subcommand("verify-kernel", "closed-form kernel equation and boundary residuals");
  int vm = 1, vsamples = 10000;
  double valpha = 0.5;
  vk->add_option("--m", vm)->check(CLI::Range(1, 20));
  vk->add_option("--alpha", valpha);
  vk->add_option("--samples", vsamples)->check(CLI::PositiveNumber);

  std::string controller;
  auto* track = app.add_subcommand("track", "controller with true-state feedback");
  auto* observe = app.add_subcommand("observe", "observer only, feedforward input");
  auto* closed = app.add_subcommand("closed-loop", "controller fed by the observer");
  for (auto* s : {track, closed}) s->add_option("--controller", controller, "volterra, convolution or none");

  auto* plots = app.add_subcommand("plots", "write plot.py into existing run directories");
  std::vector<std::string> plot_dirs;
  plots->add_option("dirs", plot_dirs)->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigExit;
  }

  try {
    if (*sim) {
      Scenario sc = load(gl);
      sc.controller = ControllerKind::none;
      const RunReport r = run_closed_loop(sc, RunMode::track);
      write_run(r, gl.out);
      std::printf("final sup|P| %.6g\nwrote %s\n", r.field.sup_norm.back(), gl.out.c_str());
    } else if (*green) {
      const Scenario sc = load(gl);
      std::printf("G(%g, %g) = %.12g\n", gx, gt, green_eval(gx, gt, galpha, sc.params));
      GreenKernel kern(gt, galpha, sc.params, grange, GreenQuadrature{});
      fs::create_directories(gl.out);
      std::ofstream os(fs::path(gl.out) / "green.csv");
      os << "x,G\n";
      for (int i = 0; i < gn; ++i) {
        const double x = -grange + 2.0 * grange * i / (gn - 1);
        os << fmt17(x) << ',' << fmt17(kern(x)) << '\n';
      }
      std::printf("wrote %s\n", (fs::path(gl.out) / "green.csv").string().c_str());
    } else if (*bound) {
      const Scenario sc = load(gl);
      const Sampled q = Sampled::from([&](double x) { return bq * std::sin(std::numbers::pi * x / sc.params.L); },
                                      bnx, 0.0, sc.params.L);
      std::printf("%.12g\n", stability_bound(q, br, bu, balpha, sc.params));
    } else if (*vk) {
      std::mt19937_64 rng(gl.seed >= 0 ? std::uint64_t(gl.seed) : 7u);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const PolyKernel k{vm, 1.0};
      double pde = 0.0, bc = 0.0;
      for (int i = 0; i < vsamples; ++i) {
        const double x = unit(rng), y = x * unit(rng);
        pde = std::max(pde, std::abs(kernel_pde_residual(k, x, y, valpha)));
        bc = std::max(bc, std::abs(kernel_right_caputo(k, x, x, valpha)));
        bc = std::max(bc, std::abs(kernel_shifted_integral(k, x, x, valpha)));
        bc = std::max(bc, std::abs(kernel_eval(k, x, x)));
        bc = std::max(bc, std::abs(kernel_eval(k, x, 0.0) - std::pow(x, k.power())));
      }
      std::printf("kernel equation residual %.3e\nboundary residual        %.3e\n", pde, bc);
    } else if (*track) {
      return run_scenario(gl, RunMode::track, controller);
    } else if (*observe) {
      return run_scenario(gl, RunMode::observe, "");
    } else if (*closed) {
      return run_scenario(gl, RunMode::closed_loop, controller);
    } else if (*plots) {
      for (const auto& d : plot_dirs) {
        write_plot_script(d);
        std::printf("wrote %s\n", (fs::path(d) / "plot.py").string().c_str());
      }
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigExit;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return kConfigExit;
  } catch (const SizeError& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return kConfigExit;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumericExit;
  }
  return 0;
}
