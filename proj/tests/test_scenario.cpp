#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fracctl/errors.hpp"
#include "fracctl/scenario.hpp"

using namespace fracctl;
namespace fs = std::filesystem;

namespace {

Scenario small(double sigma = 0.0) {
  Scenario sc = default_scenario();
  sc.grid = Grid(41, 201, 1.0, 1.0);
  sc.noise_sigma = sigma;
  return sc;
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(r);
  }
  return rows;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FRACCTL_CLI) + " " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("fracctl_test_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST(Config, RoundTripIsIdentity) {
  const std::string s1 = serialize_scenario(default_scenario());
  std::istringstream in(s1);
  const Scenario sc = parse_scenario(in);
  EXPECT_EQ(serialize_scenario(sc), s1);
  EXPECT_EQ(sc.exo.S, default_scenario().exo.S);
}

TEST(Config, ShippedConfigParses) {
  const Scenario sc = load_scenario(fs::path(FRACCTL_CONFIG_DIR) / "paper_sec9.cfg");
  EXPECT_EQ(sc.params.k0, 5.0);
  EXPECT_EQ(sc.params.rho, 1.0726);
  EXPECT_EQ(sc.grid.nx, 201);
  EXPECT_EQ(sc.noise_sigma, 0.01);
  EXPECT_EQ(sc.exo.S.rows(), 3);
  std::istringstream in(serialize_scenario(sc));
  EXPECT_EQ(serialize_scenario(parse_scenario(in)), serialize_scenario(sc));
}

TEST(Config, Errors) {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return parse_scenario(in);
  };
  EXPECT_THROW(parse("[params]\nk0 = five\n"), ConfigError);
  EXPECT_THROW(parse("[params]\nbogus = 1\n"), ConfigError);
  EXPECT_THROW(parse("[nowhere]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse("k0 = 1\n"), ConfigError);
  EXPECT_THROW(parse("[params]\nk0 = -1\n"), ConfigError);
  EXPECT_THROW(parse("[params]\nalpha = 1.5\n"), ConfigError);
  EXPECT_THROW(parse("[exosystem]\nS = 1, 2, 3\n"), ConfigError);
  EXPECT_THROW(parse("[exosystem]\nS = 1\nV0 = 1\na = 1\nb = 1\nc = 1\nq = 0\n"), ConfigError);
  EXPECT_THROW(parse("[noise]\nseed = -3\n"), ConfigError);
  EXPECT_THROW(parse("[params]\nk0 = 1\nk0 = 2\n"), ConfigError);
  EXPECT_NO_THROW(parse("# comment only\n[grid] ; trailing\nnx = 21\n"));
}

TEST(Run, NoControllerNoSignalsIsSilent) {
  Scenario sc = small();
  sc.controller = ControllerKind::none;
  sc.exo.V0.setZero();
  sc.p0_amplitude = 0.0;
  const RunReport r = run_closed_loop(sc, RunMode::track);
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    ASSERT_EQ(r.u[i], 0.0);
    ASSERT_EQ(r.e[i], 0.0);
  }
  EXPECT_EQ(r.field.data.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Run, ObserverModesNeedObserver) {
  Scenario sc = small();
  sc.observer = ObserverKind::none;
  EXPECT_THROW(run_closed_loop(sc, RunMode::observe), ConfigError);
  EXPECT_NO_THROW(run_closed_loop(sc, RunMode::track));
}

TEST(Run, DeterministicForFixedSeed) {
  auto csvs = [](const Scenario& sc) {
    const RunReport r = run_closed_loop(sc, RunMode::closed_loop);
    std::ostringstream a, b, c;
    write_field_csv(r.field, a);
    write_tracking_csv(r, b);
    write_observer_csv(r, c);
    return a.str() + b.str() + c.str();
  };
  Scenario sc = small(0.05);
  const std::string one = csvs(sc), two = csvs(sc);
  EXPECT_EQ(one, two);
  sc.seed = 99;
  EXPECT_NE(csvs(sc), one);
}

TEST(Run, MetricsRecomputeFromCsv) {
  Scenario sc = small(0.01);
  const RunReport r = run_closed_loop(sc, RunMode::closed_loop);
  const fs::path dir = temp_dir("metrics");
  write_run(r, dir);
  for (const char* f : {"field.csv", "tracking.csv", "observer.csv", "report.json", "plot.py"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const auto tr = read_csv(dir / "tracking.csv");
  const auto ob = read_csv(dir / "observer.csv");
  RunReport back;
  for (const auto& row : tr) {
    back.t.push_back(row[0]);
    back.u.push_back(row[1]);
    back.y.push_back(row[2]);
    back.yd.push_back(row[3]);
    back.e.push_back(row[4]);
  }
  for (const auto& row : ob) {
    back.ptilde.push_back(row[1]);
    back.V1.push_back(row[7]);
    back.eps.push_back(row[8]);
    back.theta_err.push_back(row[9]);
  }
  back.field = r.field;
  const auto m = compute_metrics(back, sc.grid);
  for (const auto& [k, v] : m) {
    ASSERT_TRUE(r.metrics.count(k)) << k;
    EXPECT_NEAR(v, r.metrics.at(k), 1e-12 * std::max(1.0, std::abs(v))) << k;
  }
  fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli(""), 2);
  const fs::path dir = temp_dir("cli");
  fs::create_directories(dir);
  {
    std::ofstream bad(dir / "bad.cfg");
    bad << "[params]\nk0 = nope\n";
  }
  EXPECT_EQ(run_cli("track --config " + (dir / "bad.cfg").string()), 2);
  EXPECT_EQ(run_cli("bound --q 0"), 0);
  EXPECT_EQ(run_cli("green --t 0 --out " + dir.string()), 2);
  EXPECT_EQ(run_cli("plots " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "plot.py"));
  fs::remove_all(dir);
}
