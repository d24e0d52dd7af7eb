#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fracctl/errors.hpp"
#include "fracctl/scenario.hpp"

namespace fracctl {

namespace {

using Section = std::map<std::string, std::string>;
using Document = std::map<std::string, Section>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Document read_document(std::istream& is) {
  Document doc;
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      doc[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || section.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value inside a section");
    }
    const std::string key = trim(line.substr(0, eq));
    if (doc[section].count(key)) throw ConfigError("duplicate key " + section + "." + key);
    doc[section][key] = trim(line.substr(eq + 1));
  }
  return doc;
}

double to_number(const std::string& where, const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(where + ": not a number: '" + v + "'");
  }
  if (trim(v.substr(used)) != "" || !std::isfinite(d)) throw ConfigError(where + ": not a number: '" + v + "'");
  return d;
}

std::vector<double> to_array(const std::string& where, const std::string& v) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(v);
  while (std::getline(ss, item, ',')) out.push_back(to_number(where, trim(item)));
  return out;
}

Eigen::VectorXd to_vector(const std::string& where, const std::string& v) {
  const auto a = to_array(where, v);
  return Eigen::Map<const Eigen::VectorXd>(a.data(), Eigen::Index(a.size()));
}

bool to_bool(const std::string& where, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(where + ": expected true or false");
}

int to_int(const std::string& where, const std::string& v) {
  const double d = to_number(where, v);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError(where + ": expected an integer");
  return int(d);
}

// Pulls recognised keys out of a section so leftovers can be reported.
class Reader {
 public:
  Reader(Document& doc, const std::string& name) : name_(name) {
    auto it = doc.find(name);
    if (it != doc.end()) {
      sec_ = std::move(it->second);
      doc.erase(it);
    }
  }
  void done() const {
    if (!sec_.empty()) throw ConfigError("unknown key " + name_ + "." + sec_.begin()->first);
  }
  bool take(const std::string& key, std::string& out) {
    auto it = sec_.find(key);
    if (it == sec_.end()) return false;
    out = it->second;
    sec_.erase(it);
    return true;
  }
  std::string where(const std::string& key) const { return name_ + "." + key; }

  void num(const std::string& key, double& out) {
    std::string v;
    if (take(key, v)) out = to_number(where(key), v);
  }
  void integer(const std::string& key, int& out) {
    std::string v;
    if (take(key, v)) out = to_int(where(key), v);
  }
  void flag(const std::string& key, bool& out) {
    std::string v;
    if (take(key, v)) out = to_bool(where(key), v);
  }
  void vec(const std::string& key, Eigen::VectorXd& out) {
    std::string v;
    if (take(key, v)) out = to_vector(where(key), v);
  }

 private:
  std::string name_;
  Section sec_;
};

std::string join(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt17(v(i));
  }
  return s;
}

}  // namespace

Scenario parse_scenario(std::istream& is) {
  Document doc = read_document(is);
  Scenario sc = default_scenario();
  {
    Reader r(doc, "params");
    r.num("k0", sc.params.k0);
    r.num("mu", sc.params.mu);
    r.num("C", sc.params.C);
    r.num("rho", sc.params.rho);
    r.num("L", sc.params.L);
    r.num("alpha", sc.alpha);
    r.num("p0_amplitude", sc.p0_amplitude);
    std::string v;
    if (r.take("scheme", v)) {
      if (v == "l1") sc.scheme = CaputoScheme::l1;
      else if (v == "grunwald") sc.scheme = CaputoScheme::grunwald;
      else throw ConfigError("params.scheme: expected l1 or grunwald");
    }
    r.done();
  }
  {
    Reader r(doc, "grid");
    r.integer("nx", sc.grid.nx);
    r.integer("nt", sc.grid.nt);
    r.num("T", sc.grid.T);
    r.done();
  }
  sc.grid.L = sc.params.L;
  {
    Reader r(doc, "exosystem");
    std::string v;
    if (r.take("S", v)) {
      const auto flat = to_array(r.where("S"), v);
      const auto n = Eigen::Index(std::llround(std::sqrt(double(flat.size()))));
      if (n * n != Eigen::Index(flat.size()) || n == 0) throw ConfigError("exosystem.S must be a square matrix");
      sc.exo.S = Eigen::Map<const Eigen::Matrix<double, -1, -1, Eigen::RowMajor>>(flat.data(), n, n);
    }
    r.vec("V0", sc.exo.V0);
    r.vec("a", sc.exo.a);
    r.vec("b", sc.exo.b);
    r.vec("c", sc.exo.c);
    r.vec("q", sc.exo.q);
    r.done();
  }
  {
    Reader r(doc, "controller");
    std::string v;
    if (r.take("kind", v)) {
      if (v == "volterra") sc.controller = ControllerKind::volterra;
      else if (v == "convolution") sc.controller = ControllerKind::convolution;
      else if (v == "none") sc.controller = ControllerKind::none;
      else throw ConfigError("controller.kind: expected volterra, convolution or none");
    }
    r.integer("m", sc.kernel.m);
    r.num("coeff", sc.kernel.coeff);
    r.num("gamma", sc.gamma);
    r.flag("sampled_design", sc.sampled_design);
    r.done();
  }
  {
    Reader r(doc, "observer");
    std::string v;
    if (r.take("kind", v)) {
      if (v == "adaptive") sc.observer = ObserverKind::adaptive;
      else if (v == "none") sc.observer = ObserverKind::none;
      else throw ConfigError("observer.kind: expected adaptive or none");
    }
    r.flag("adapt", sc.adapt);
    r.done();
  }
  {
    Reader r(doc, "noise");
    r.num("sigma", sc.noise_sigma);
    std::string v;
    if (r.take("seed", v)) {
      std::size_t used = 0;
      try {
        if (v.empty() || v[0] == '-') throw std::invalid_argument("sign");
        sc.seed = std::stoull(v, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != v.size()) throw ConfigError("noise.seed: expected a non-negative integer");
    }
    r.done();
  }
  if (!doc.empty()) throw ConfigError("unknown section [" + doc.begin()->first + "]");
  try {
    sc.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ConfigError(ex.what());
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_scenario(in);
}

std::string serialize_scenario(const Scenario& sc) {
  std::ostringstream os;
  os << "[params]\n"
     << "k0 = " << fmt17(sc.params.k0) << '\n'
     << "mu = " << fmt17(sc.params.mu) << '\n'
     << "C = " << fmt17(sc.params.C) << '\n'
     << "rho = " << fmt17(sc.params.rho) << '\n'
     << "L = " << fmt17(sc.params.L) << '\n'
     << "alpha = " << fmt17(sc.alpha) << '\n'
     << "scheme = " << (sc.scheme == CaputoScheme::l1 ? "l1" : "grunwald") << '\n'
     << "p0_amplitude = " << fmt17(sc.p0_amplitude) << "\n\n";
  os << "[grid]\n"
     << "nx = " << sc.grid.nx << '\n'
     << "nt = " << sc.grid.nt << '\n'
     << "T = " << fmt17(sc.grid.T) << "\n\n";
  Eigen::VectorXd flat(sc.exo.S.size());
  for (Eigen::Index i = 0, k = 0; i < sc.exo.S.rows(); ++i)
    for (Eigen::Index j = 0; j < sc.exo.S.cols(); ++j) flat(k++) = sc.exo.S(i, j);
  os << "[exosystem]\n"
     << "S = " << join(flat) << '\n'
     << "V0 = " << join(sc.exo.V0) << '\n'
     << "a = " << join(sc.exo.a) << '\n'
     << "b = " << join(sc.exo.b) << '\n'
     << "c = " << join(sc.exo.c) << '\n'
     << "q = " << join(sc.exo.q) << "\n\n";
  os << "[controller]\n"
     << "kind = " << to_string(sc.controller) << '\n'
     << "m = " << sc.kernel.m << '\n'
     << "coeff = " << fmt17(sc.kernel.coeff) << '\n'
     << "gamma = " << fmt17(sc.gamma) << '\n'
     << "sampled_design = " << (sc.sampled_design ? "true" : "false") << "\n\n";
  os << "[observer]\n"
     << "kind = " << (sc.observer == ObserverKind::adaptive ? "adaptive" : "none") << '\n'
     << "adapt = " << (sc.adapt ? "true" : "false") << "\n\n";
  os << "[noise]\n"
     << "sigma = " << fmt17(sc.noise_sigma) << '\n'
     << "seed = " << sc.seed << '\n';
  return os.str();
}

}  // namespace fracctl
