#include "fracctl/green_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fracctl/quadrature.hpp"

namespace fracctl {

namespace {

constexpr double kPi = std::numbers::pi;

struct NodeSet {
  Eigen::VectorXd s, w;
};

void append_gauss(std::vector<double>& s, std::vector<double>& w, double a, double b) {
  const auto& g = gauss16();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (Eigen::Index i = 0; i < g.nodes.size(); ++i) {
    s.push_back(c + h * g.nodes(i));
    w.push_back(h * g.weights(i));
  }
}

// Half-line nodes on [0, s_max] able to resolve phase rates up to `rate`.
NodeSet half_line_nodes(double s_max, double rate, const GreenQuadrature& quad, double alpha) {
  const double osc = rate * s_max / (2.0 * kPi);
  std::vector<double> s, w;
  if (quad.rule == QuadRule::trapezoid) {
    const long n = std::max<long>(quad.n_nodes, long(std::ceil(24.0 * osc)) + 16);
    if (n > quad.max_nodes) throw AccuracyError("green quadrature exceeds node budget");
    const double h = s_max / double(n - 1);
    for (long i = 0; i < n; ++i) {
      s.push_back(h * double(i));
      w.push_back(i == 0 || i == n - 1 ? 0.5 * h : h);
    }
  } else {
    const long panels = std::max<long>(quad.n_nodes / 16, long(std::ceil(3.0 * osc)) + 4);
    if (panels * 16 > quad.max_nodes) throw AccuracyError("green quadrature exceeds node budget");
    const double h = s_max / double(panels);
    // |s|^(alpha+1) is not smooth at the origin unless alpha = 1; grade the
    // first panel geometrically.
    const int grade = alpha < 1.0 ? 12 : 0;
    double lo = h / std::pow(2.0, grade);
    append_gauss(s, w, 0.0, lo);
    for (int k = grade; k >= 1; --k) {
      append_gauss(s, w, lo, 2.0 * lo);
      lo *= 2.0;
    }
    for (long p = 1; p < panels; ++p) append_gauss(s, w, h * double(p), h * double(p + 1));
  }
  NodeSet out;
  out.s = Eigen::Map<Eigen::VectorXd>(s.data(), Eigen::Index(s.size()));
  out.w = Eigen::Map<Eigen::VectorXd>(w.data(), Eigen::Index(w.size()));
  return out;
}

double kernel_phase_rate(double t, double alpha, const PhysicalParams& p, double s_max) {
  // d/ds of a t s^(alpha+1) cos(pi alpha/2).
  return p.a(t) * t * (alpha + 1.0) * std::pow(s_max, alpha) * std::cos(kPi * alpha / 2.0);
}

}  // namespace

ComplexSymbol green_tilde(double s, double t, double alpha, const PhysicalParams& p) {
  if (t < 0.0) throw DomainError("green_tilde requires t >= 0");
  return std::exp(p.a(t) * phi_symbol(s, alpha) * t);
}

double green_truncation(double t, double alpha, const PhysicalParams& p, double tol) {
  const double damp = p.a0() * std::sin(kPi * alpha / 2.0) * t;
  if (!(damp > 0.0)) throw DomainError("green truncation needs t > 0 and alpha > 0");
  return std::pow(std::log(1.0 / tol) / damp, 1.0 / (alpha + 1.0));
}

GreenKernel::GreenKernel(double t, double alpha, const PhysicalParams& p, double x_max,
                         const GreenQuadrature& quad)
    : t_(t) {
  if (!(t > 0.0)) throw DomainError("green kernel requires t > 0");
  FractionalOrder check(alpha);
  (void)check;
  s_max_ = quad.s_max > 0.0 ? quad.s_max : green_truncation(t, alpha, p, quad.tail_tol);
  const double rate = std::abs(x_max) + kernel_phase_rate(t, alpha, p, s_max_) + 1.0;
  auto nodes = half_line_nodes(s_max_, rate, quad, alpha);
  s_ = std::move(nodes.s);
  w_ = std::move(nodes.w);
  symbol_.resize(s_.size());
  for (Eigen::Index i = 0; i < s_.size(); ++i) symbol_(i) = green_tilde(s_(i), t, alpha, p);
}

double GreenKernel::operator()(double x) const {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s_.size(); ++i) {
    const double c = std::cos(s_(i) * x), sn = std::sin(s_(i) * x);
    // Re[(c - i sn) * symbol]
    acc += w_(i) * (c * symbol_(i).real() + sn * symbol_(i).imag());
  }
  return acc / kPi;
}

GreenValue GreenKernel::detail(double x) const {
  GreenValue v;
  v.value = (*this)(x);
  double im = 0.0;
  for (Eigen::Index i = 0; i < s_.size(); ++i) {
    const std::complex<double> e(std::cos(s_(i) * x), -std::sin(s_(i) * x));
    // negative-s partner evaluated from its own symbol branch
    const std::complex<double> partner = std::conj(e) * std::conj(symbol_(i));
    im += w_(i) * ((e * symbol_(i)).imag() + partner.imag());
  }
  v.imag_residual = im / (2.0 * kPi);
  v.s_max = s_max_;
  v.nodes = nodes();
  return v;
}

GreenValue green_eval_detail(double x, double t, double alpha, const PhysicalParams& p,
                             const GreenQuadrature& quad) {
  if (!(t > 0.0)) throw DomainError("green_eval requires t > 0 (t = 0 is a delta)");
  GreenKernel k(t, alpha, p, std::abs(x), quad);
  return k.detail(x);
}

double green_eval(double x, double t, double alpha, const PhysicalParams& p,
                  const GreenQuadrature& quad) {
  return green_eval_detail(x, t, alpha, p, quad).value;
}

double green_mass(double t, double alpha, const PhysicalParams& p, double left, double right,
                  const GreenQuadrature& quad) {
  if (!(t > 0.0)) throw DomainError("green_mass requires t > 0");
  const double s_max = quad.s_max > 0.0 ? quad.s_max : green_truncation(t, alpha, p, quad.tail_tol);
  const double rate = std::max(left, right) + kernel_phase_rate(t, alpha, p, s_max) + 1.0;
  const auto nodes = half_line_nodes(s_max, rate, quad, alpha);
  // int_{-left}^{right} e^{-isx} dx = (e^{is left} - e^{-is right}) / (is)
  auto window = [&](double s) -> std::complex<double> {
    if (s * std::max(left, right) < 1e-8) return {left + right, 0.0};
    const std::complex<double> i(0.0, 1.0);
    return (std::exp(i * s * left) - std::exp(-i * s * right)) / (i * s);
  };
  double acc = 0.0;
  for (Eigen::Index k = 0; k < nodes.s.size(); ++k) {
    acc += nodes.w(k) * (green_tilde(nodes.s(k), t, alpha, p) * window(nodes.s(k))).real();
  }
  return acc / kPi;
}

namespace {

// int_0^L G(x - y, t) h(y) dy with the kernel peak isolated.
double spatial_convolution(const GreenKernel& G, const std::function<double(double)>& h, double x,
                           double L, double tol) {
  auto f = [&](double y) { return G(x - y) * h(y); };
  if (x <= 0.0 || x >= L) return integrate_adaptive(f, 0.0, L, tol);
  return integrate_adaptive(f, 0.0, x, tol) + integrate_adaptive(f, x, L, tol);
}

double time_convolution(const AnalyticInputs& in, double x, double t, double alpha,
                        const PhysicalParams& p, const GreenQuadrature& quad,
                        const AnalyticOptions& opt) {
  const double L = p.L;
  const double beta = alpha + 1.0;
  const double a = p.a0();
  auto qbar = [&](double y, double tau) {
    double v = in.Q ? in.Q(y, tau) / (p.C * p.rho) : 0.0;
    if (in.du) v -= in.du(tau);
    return v;
  };
  // s = t - tau = sigma^(beta/alpha), which flattens the s -> 0 behaviour.
  const double e = beta / alpha;
  const double sig_max = std::pow(t, alpha / beta);
  auto inner = [&](double s) {
    const double width = std::pow(a * s, 1.0 / beta);
    const double tau = t - s;
    if (width < 1e-4 * L) {
      // Kernel narrower than any feature of the data: collapse to the
      // local value, halved at the edges of the support.
      const double edge = (x <= 0.0 || x >= L) ? 0.5 : 1.0;
      return edge * qbar(std::clamp(x, 0.0, L), tau);
    }
    GreenKernel G(s, alpha, p, std::max(std::abs(x), std::abs(x - L)), quad);
    return spatial_convolution(G, [&](double y) { return qbar(y, tau); }, x, L, opt.inner_tol);
  };
  auto integrate = [&](int panels) {
    const auto& g = gauss16();
    const double h = sig_max / panels;
    double acc = 0.0;
    for (int k = 0; k < panels; ++k) {
      for (Eigen::Index i = 0; i < g.nodes.size(); ++i) {
        const double sig = h * (k + 0.5 * (1.0 + g.nodes(i)));
        const double s = std::pow(sig, e);
        const double jac = e * std::pow(sig, e - 1.0);
        acc += 0.5 * h * g.weights(i) * jac * inner(s);
      }
    }
    return acc;
  };
  double prev = integrate(1);
  for (int panels = 2; panels <= opt.max_time_panels; panels *= 2) {
    const double cur = integrate(panels);
    if (std::abs(cur - prev) <= opt.time_tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw AccuracyError("time convolution did not settle within the panel budget");
}

}  // namespace

Eigen::VectorXd analytic_profile(const AnalyticInputs& in, const Eigen::VectorXd& xs, double t,
                                 double alpha, const PhysicalParams& p,
                                 const GreenQuadrature& quad, const AnalyticOptions& opt) {
  if (!p.constant_k()) {
    throw DomainError("analytic_solution supports constant k only; use the finite-difference engine");
  }
  if (!(t > 0.0)) throw DomainError("analytic_solution requires t > 0");
  const double u_t = in.u ? in.u(t) : 0.0;
  const double u_0 = in.u ? in.u(0.0) : 0.0;
  Eigen::VectorXd out = Eigen::VectorXd::Constant(xs.size(), u_t);

  const bool has_initial = bool(in.g0) || u_0 != 0.0;
  if (has_initial) {
    double x_max = 0.0;
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
      x_max = std::max({x_max, std::abs(xs(i)), std::abs(xs(i) - p.L)});
    }
    GreenKernel G(t, alpha, p, x_max, quad);
    auto gbar = [&](double y) { return (in.g0 ? in.g0(y) : 0.0) - u_0; };
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
      out(i) += spatial_convolution(G, gbar, xs(i), p.L, opt.inner_tol);
    }
  }
  if (in.Q || in.du) {
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
      out(i) += time_convolution(in, xs(i), t, alpha, p, quad, opt);
    }
  }
  return out;
}

double analytic_solution(const AnalyticInputs& in, double x, double t, double alpha,
                         const PhysicalParams& p, const GreenQuadrature& quad,
                         const AnalyticOptions& opt) {
  Eigen::VectorXd xs(1);
  xs(0) = x;
  return analytic_profile(in, xs, t, alpha, p, quad, opt)(0);
}

double stability_bound(const Sampled& q, double r, double u_max, double alpha,
                       const PhysicalParams& p) {
  FractionalOrder check(alpha);
  (void)check;
  const double sn = std::sin(kPi * alpha / 2.0);
  if (sn < 1e-12) return std::numeric_limits<double>::infinity();
  const Eigen::VectorXd w = trapezoid_weights(q.size(), q.dx);
  const double q1 = w.dot(q.values.cwiseAbs());
  const auto jq = rl_integral(q, alpha + 1.0);
  const double j1 = w.dot(jq.values.cwiseAbs());
  return std::abs(r) / (2.0 * kPi) * (p.C * p.mu / (p.k0 * sn)) * (2.0 * j1 + q1) + std::abs(u_max);
}

}  // namespace fracctl
