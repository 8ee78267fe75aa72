#pragma once

// Named numerical checks grouped into suites, and convergence studies, shared by the
// command-line front end.

#include <chk/dpp.hpp>
#include <chk/hierarchy.hpp>
#include <chk/kernel.hpp>
#include <chk/opuc.hpp>
#include <chk/special_fn.hpp>
#include <chk/transform.hpp>
#include <chk/wiener_hopf.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace chk {

struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

inline Check check_le(std::string name, double value, double bound) {
  return {std::move(name), value, bound, std::isfinite(value) && value <= bound};
}

enum class Level { fast, full };

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

/// max_i |a_i / c_i / (a_0 / c_0) - 1| between the adjoint and closed-form basis routes.
inline double route_ratio_deviation(const SpectralParameter& s, int n, std::span<const double> xs) {
  const auto a = basis_L_adjoint_route(s, n, xs);
  const auto c = basis_L_closed_form(s, n, xs);
  const cplx r0 = a.values[0] / c.values[0];
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) worst = std::max(worst, std::abs(a.values[i] / c.values[i] / r0 - 1.0));
  return worst;
}

/// Largest off-diagonal modulus divided by the smallest diagonal.
inline double gram_offdiag_ratio(const Eigen::MatrixXcd& g) {
  double off = 0.0, diag = 1e300;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    diag = std::min(diag, std::abs(g(i, i)));
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      if (i != j) off = std::max(off, std::abs(g(i, j)));
  }
  return off / diag;
}

inline double identity_deviation(const Eigen::MatrixXcd& g) {
  return (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

namespace suites {

inline std::string pair_name(const char* what, double x, double y) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s x=%g y=%g", what, x, y);
  return buf;
}

inline std::vector<Check> cd_identity(const SpectralParameter& s, Level level) {
  const std::vector<double> pts = level == Level::fast ? std::vector<double>{-6.5, 0.1, 3.7}
                                                       : std::vector<double>{-20.0, -6.5, 0.1, 3.7, 20.0};
  const QuadratureRule rule = gauss_jacobi(level == Level::fast ? 128 : 256, 2.0 * s.re(), 0.0, {0.0, 1.0});
  const ChKernel k(s);
  std::vector<Check> out;
  for (double x : pts)
    for (double y : pts) out.push_back(check_le(pair_name("cd-identity", x, y), verify_cd_identity(k, x, y, rule), 1e-8));
  return out;
}

inline SupportedFunction unit_gaussian() {
  return {[](double x) { return cplx(std::exp(-0.5 * x * x)); }, {-7.0, 7.0}};
}

inline std::vector<Check> pw(const SpectralParameter& s, Level level) {
  std::vector<Check> out;
  const double R = level == Level::fast ? 50.0 : 200.0;
  const int pts = level == Level::fast ? 512 : 2048;
  const auto coarse = pw_projector_residual(s, unit_gaussian(), WindowGrid(R / 2, pts / 2), R / 2);
  const auto fine = pw_projector_residual(s, unit_gaussian(), WindowGrid(R, pts), R);
  out.push_back(check_le("pw-residual R=" + std::to_string(static_cast<int>(R)), fine.residual, 5e-2));
  out.push_back(check_le("pw-refinement-ratio", fine.residual / std::max(coarse.residual, 1e-300), 1.0));
  const double HR = level == Level::fast ? 100.0 : 400.0;
  const WindowGrid hw(HR, level == Level::fast ? 1024 : 4096);
  out.push_back(check_le("hardy-negative-fraction R=" + std::to_string(static_cast<int>(HR)),
                         hardy_membership(hardy_probe(s, hw), hw), level == Level::fast ? 5e-2 : 1e-2));
  return out;
}

inline std::vector<Check> opuc(const SpectralParameter& s, Level level) {
  std::vector<Check> out;
  const int N = level == Level::fast ? 10 : 30;
  const int nodes = level == Level::fast ? 256 : 512;
  out.push_back(check_le("opuc-gram N=" + std::to_string(N), identity_deviation(orthogonality_gram(s, N, circle_rule(s, nodes))),
                         1e-10));
  double worst = 0.0;
  for (auto [tau, theta] : {std::pair{0.3, -1.2}, std::pair{2.5, 0.01}, std::pair{-3.0, 1.7}}) {
    const cplx a = cd_kernel(s, 200, tau, theta, CdForm::sum), b = cd_kernel(s, 200, tau, theta, CdForm::ratio);
    worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(a)));
  }
  out.push_back(check_le("cd-sum-vs-ratio n=200", worst, 1e-9));
  if (level == Level::full) {
    const auto grid = linspace(-5.0, 5.0, 21);
    out.push_back(check_le("bnr-sup-error n=1024", scaled_cd_sup_error(s, 1024, grid), 1e-2));
  }
  return out;
}

inline std::vector<Check> hierarchy(const SpectralParameter& s, Level level) {
  std::vector<Check> out;
  const std::vector<double> xs{-9.0, -4.3, -1.1, 0.2, 0.7, 2.5, 6.0, 15.0};
  double dev = 0.0;
  for (int n = 0; n <= 3; ++n) dev = std::max(dev, route_ratio_deviation(s, n, xs));
  out.push_back(check_le("route-ratio-deviation n<=3", dev, 1e-6));
  double ann = 0.0;
  for (int n = 1; n <= 12; ++n)
    for (int k = 1; k <= n; ++k) ann = std::max(ann, moment_annihilation(s, n, k));
  out.push_back(check_le("moment-annihilation n<=12", ann, 1e-10));
  const double R = level == Level::fast ? 100.0 : 400.0;
  out.push_back(check_le("gram-offdiag-extrapolated R=" + std::to_string(static_cast<int>(R)),
                         gram_offdiag_ratio(gram_of_basis_extrapolated(s, 4, WindowGrid::with_spacing(R, 0.2))), 1e-3));
  if (level == Level::full) {
    double fit = 0.0;
    for (int n = 0; n <= 4; ++n) fit = std::max(fit, std::abs(vanishing_order(s, n) - n));
    out.push_back(check_le("vanishing-order n<=4", fit, 0.05));
  }
  out.push_back(check_le("minus-t-counterexample |value-2|", std::abs(minus_t_argument_counterexample() - 2.0), 1e-14));
  return out;
}

inline std::vector<Check> trace(const SpectralParameter& s, Level level) {
  std::vector<Check> out;
  const auto f = SymbolFunction::gaussian();
  const cplx wh = commutator_trace(f, HalfLineGrid::midpoint(30.0, 600), Maker::wh());
  out.push_back(check_le("gaussian-quarter, 0.250", std::abs(wh - 0.25), 1e-3));
  const double L = level == Level::fast ? 30.0 : 60.0;
  const cplx g = commutator_trace(f, HalfLineGrid::gauss(L, static_cast<int>(2 * L)), Maker::g_for(s, L));
  out.push_back(check_le("g-maker-vs-wh L=" + std::to_string(static_cast<int>(L)), std::abs(g - wh), 5e-3));
  const auto hs = hilbert_schmidt_identity(f, HalfLineGrid::gauss(30.0, 60));
  out.push_back(check_le("hilbert-schmidt-identity", std::abs(hs.discrete - hs.exact), 1e-4));
  const auto sob = sobolev_half(f);
  out.push_back(check_le("gaussian-seminorm-sq |v-1/2|", std::abs(sob.seminorm * sob.seminorm - 0.5), 1e-12));
  return out;
}

inline std::vector<Check> asymptotics(const SpectralParameter& s, Level level) {
  std::vector<Check> out;
  // |Z rho psi - 1| <= C |x|^{Re s}/(1 + |x|^{1+Re s}) with a grid-stable C.
  const int n = level == Level::fast ? 121 : 481;
  std::vector<double> grid(n), finer(4 * n);
  for (int i = 0; i < n; ++i) grid[i] = std::pow(10.0, -2.0 + 6.0 * i / (n - 1));
  for (int i = 0; i < 4 * n; ++i) finer[i] = std::pow(10.0, -2.0 + 6.0 * i / (4 * n - 1));
  const double c1 = z_deviation_bound_check(s, grid), c2 = z_deviation_bound_check(s, finer);
  out.push_back(check_le("z-deviation-constant-stability", std::abs(c2 - c1) / std::max(c2, 1e-300), 0.05));
  // Leading asymptotic term against the full evaluator: relative gap ~ 1/R.
  const Hyp1F1 h(std::conj(s.value()), cplx(1.0 + 2.0 * s.re()));
  double rs[4] = {50, 100, 200, 400}, gaps[4];
  for (int i = 0; i < 4; ++i) {
    const cplx z(0.0, rs[i]);
    const cplx ref = h(z);
    gaps[i] = std::abs(h.asymptotic(z, 0).value - ref) / std::abs(ref);
  }
  double mx = 0, my = 0, sxy = 0, sxx = 0;
  for (int i = 0; i < 4; ++i) {
    mx += std::log(rs[i]) / 4;
    my += std::log(gaps[i]) / 4;
  }
  for (int i = 0; i < 4; ++i) {
    sxy += (std::log(rs[i]) - mx) * (std::log(gaps[i]) - my);
    sxx += (std::log(rs[i]) - mx) * (std::log(rs[i]) - mx);
  }
  if (s.is_zero()) {
    // 1F1(0; 1; z) = 1 and the leading term is exact.
    out.push_back(check_le("asymptotic-leading-gap", gaps[3], 1e-14));
  } else {
    out.push_back(check_le("asymptotic-gap-slope |slope+1|", std::abs(sxy / sxx + 1.0), 0.15));
  }
  return out;
}

}  // namespace suites

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"cd-identity", "pw", "opuc", "hierarchy", "trace", "asymptotics"};
  return names;
}

inline std::vector<Check> run_suite(const std::string& name, const SpectralParameter& s, Level level) {
  if (name == "cd-identity") return suites::cd_identity(s, level);
  if (name == "pw") return suites::pw(s, level);
  if (name == "opuc") return suites::opuc(s, level);
  if (name == "hierarchy") return suites::hierarchy(s, level);
  if (name == "trace") return suites::trace(s, level);
  if (name == "asymptotics") return suites::asymptotics(s, level);
  throw DomainError("unknown suite: " + name);
}

enum class ConvergeTarget { bnr, ker_conv, unit_norm };

/// Error of the chosen study at parameter n.
inline double convergence_error(ConvergeTarget target, const SpectralParameter& s, int n) {
  switch (target) {
    case ConvergeTarget::bnr:
      return scaled_cd_sup_error(s, n, linspace(-5.0, 5.0, 21));
    case ConvergeTarget::ker_conv:
      return discrete_transform_sup_error(s, n, linspace(0.5, 2.0, 7), linspace(-5.0, 5.0, 21));
    case ConvergeTarget::unit_norm:
      return std::abs(unit_interval_norm(s, n, WindowGrid::with_spacing(400.0, 0.2)) - 1.0);
  }
  throw DomainError("unknown convergence target");
}

inline double default_ceiling(ConvergeTarget target) {
  switch (target) {
    case ConvergeTarget::bnr:
      return 1e-2;
    case ConvergeTarget::ker_conv:
      return 1e-2;
    case ConvergeTarget::unit_norm:
      return 0.1;
  }
  return 0.0;
}

}  // namespace chk
