#pragma once

// Discretized generalized transform
//   (T_s f)(w) = int T_s(w x) f(x) dx,   (T_s^* g)(x) = int_0^1 conj T_s(x t) g(t) dt
// and the numerical checks built on it. Fourier convention: fhat(w) =
// (1/2pi) int e^{-iwx} f(x) dx and F = sqrt(2pi) fhat, so T_0 = F.

#include <chk/errors.hpp>
#include <chk/kernel.hpp>
#include <chk/quadrature.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace chk {

/// Midpoint grid on [-R, R] with an even number of cells, so 0 is never a node.
struct WindowGrid {
  double half_width = 1.0;
  int n_points = 2;
  double spacing = 1.0;
  std::vector<double> nodes;

  WindowGrid() = default;
  WindowGrid(double R, int n) : half_width(R), n_points(n) {
    if (!(R > 0.0)) throw DomainError("WindowGrid: half width must be > 0");
    if (n < 2 || n % 2 != 0) throw DomainError("WindowGrid: n_points must be even and >= 2");
    spacing = 2.0 * R / n;
    nodes.resize(n);
    for (int i = 0; i < n; ++i) nodes[i] = -R + (i + 0.5) * spacing;
  }

  /// Grid with spacing close to h.
  static WindowGrid with_spacing(double R, double h) {
    int n = static_cast<int>(std::ceil(2.0 * R / h));
    if (n % 2) ++n;
    return WindowGrid(R, std::max(n, 2));
  }

  QuadratureRule rule() const { return uniform_midpoint(n_points, {-half_width, half_width}); }
};

struct DiscreteOperator {
  Eigen::MatrixXcd matrix;
  QuadratureRule row_grid;
  QuadratureRule col_grid;
};

/// A function together with an interval outside which it vanishes.
struct SupportedFunction {
  std::function<cplx(double)> f;
  Interval support;
};

enum class HalfLine { plus, minus };

/// Matrix [T_s(w_k x_j)].
inline Eigen::MatrixXcd tcal_matrix(const ChKernel& k, std::span<const double> omegas,
                                    std::span<const double> xs) {
  Eigen::MatrixXcd m(omegas.size(), xs.size());
  for (std::size_t a = 0; a < omegas.size(); ++a)
    for (std::size_t b = 0; b < xs.size(); ++b) m(a, b) = k.tcal(omegas[a] * xs[b]);
  return m;
}

/// T_s f at the given frequencies, f sampled on the window (midpoint rule).
inline std::vector<cplx> forward(const SpectralParameter& s, std::span<const cplx> f_samples,
                                 const WindowGrid& window, std::span<const double> omegas) {
  if (f_samples.size() != window.nodes.size())
    throw DomainError("forward: sample count does not match the window");
  const ChKernel k(s);
  std::vector<cplx> out(omegas.size());
  for (std::size_t a = 0; a < omegas.size(); ++a) {
    if (omegas[a] == 0.0 && s.re() <= 0.0) throw SingularityError("forward: w = 0 needs Re s > 0");
    cplx acc = 0.0;
    for (std::size_t j = 0; j < f_samples.size(); ++j) {
      if (f_samples[j] != cplx(0.0)) acc += k.tcal(omegas[a] * window.nodes[j]) * f_samples[j];
    }
    out[a] = window.spacing * acc;
  }
  return out;
}

/**
 * (T_s^* g)(x) = int_0^1 conj T_s(x t) g(t) dt with the rule's plain weights.
 * For a Gauss-Jacobi rule the integrand is assumed to carry the endpoint factor.
 */
inline std::vector<cplx> adjoint(const SpectralParameter& s, std::span<const cplx> g_samples,
                                 const QuadratureRule& rule, std::span<const double> xs) {
  if (g_samples.size() != rule.size()) throw DomainError("adjoint: sample count mismatch");
  const ChKernel k(s);
  std::vector<cplx> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] == 0.0 && s.re() <= 0.0) throw SingularityError("adjoint: x = 0 needs Re s > 0");
    cplx acc = 0.0;
    for (std::size_t t = 0; t < rule.size(); ++t)
      acc += rule.plain_weights[t] * std::conj(k.tcal(xs[i] * rule.nodes[t])) * g_samples[t];
    out[i] = acc;
  }
  return out;
}

/// The same adjoint computed as (T_{conj s} g)(-x).
inline std::vector<cplx> adjoint_via_reflection(const SpectralParameter& s,
                                                std::span<const cplx> g_samples,
                                                const QuadratureRule& rule,
                                                std::span<const double> xs) {
  if (g_samples.size() != rule.size()) throw DomainError("adjoint: sample count mismatch");
  const ChKernel k(s.conj());
  std::vector<cplx> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] == 0.0 && s.re() <= 0.0) throw SingularityError("adjoint: x = 0 needs Re s > 0");
    cplx acc = 0.0;
    for (std::size_t t = 0; t < rule.size(); ++t)
      acc += rule.plain_weights[t] * k.tcal(-xs[i] * rule.nodes[t]) * g_samples[t];
    out[i] = acc;
  }
  return out;
}

namespace detail {

inline void require_cd_rule(const SpectralParameter& s, const QuadratureRule& rule) {
  if (rule.domain.lo != 0.0 || rule.domain.hi != 1.0)
    throw DomainError("rule must live on [0, 1]");
  if (std::abs(rule.left_exponent - 2.0 * s.re()) > 1e-12 || rule.right_exponent != 0.0)
    throw DomainError("rule must be Gauss-Jacobi with exponent 2 Re s at t = 0");
}

// Row factor of conj T(x t) with t^{Re s} pulled out:
//   conj T(x t) = t^{Re s} t^{-i Im s} * e^{ixt} rho(x) psi(x) conj Z(x t) / sqrt(2pi).
// The t^{-i Im s} phases cancel in every product conj T(xt) T(yt).
inline Eigen::MatrixXcd cd_factor(const ChKernel& k, std::span<const double> xs,
                                  const QuadratureRule& rule) {
  const SpectralParameter& s = k.parameter();
  Eigen::MatrixXcd a(xs.size(), rule.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    if (x == 0.0) {
      if (s.re() <= 0.0) throw SingularityError("x = 0 needs Re s > 0");
      a.row(i).setZero();
      continue;
    }
    const cplx pre = rho(s, x) * psi(s, x) * kInvSqrtTwoPi;
    for (std::size_t t = 0; t < rule.size(); ++t) {
      const double u = x * rule.nodes[t];
      a(i, t) = pre * std::exp(cplx(0.0, u)) * std::conj(k.z()(u));
    }
  }
  return a;
}

}  // namespace detail

/// |int_0^1 conj T(xt) T(yt) dt - psi(x) K(x,y) conj psi(y)|.
inline double verify_cd_identity(const ChKernel& k, double x, double y, const QuadratureRule& rule) {
  const SpectralParameter& s = k.parameter();
  detail::require_cd_rule(s, rule);
  const double xy[2] = {x, y};
  const Eigen::MatrixXcd a = detail::cd_factor(k, xy, rule);
  cplx lhs = 0.0;
  for (std::size_t t = 0; t < rule.size(); ++t) lhs += rule.weights[t] * a(0, t) * std::conj(a(1, t));
  cplx rhs = 0.0;
  if (x != 0.0 && y != 0.0) rhs = psi(s, x) * k(x, y) * std::conj(psi(s, y));
  return std::abs(lhs - rhs);
}

inline double verify_cd_identity(const SpectralParameter& s, double x, double y,
                                 const QuadratureRule& rule) {
  return verify_cd_identity(ChKernel(s), x, y, rule);
}

/// Matrix of T_s^* 1_[0,1] T_s on the window nodes, by Gauss-Jacobi in t.
inline DiscreteOperator projector_unit_interval(const SpectralParameter& s,
                                                const WindowGrid& window, int t_nodes = 128) {
  const ChKernel k(s);
  const QuadratureRule rule = gauss_jacobi(t_nodes, 2.0 * s.re(), 0.0, {0.0, 1.0});
  const Eigen::MatrixXcd a = detail::cd_factor(k, window.nodes, rule);
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), rule.size());
  DiscreteOperator op;
  op.matrix = a * w.asDiagonal() * a.adjoint();
  op.row_grid = window.rule();
  op.col_grid = op.row_grid;
  return op;
}

/// [psi(x_i) K(x_i, x_j) conj psi(x_j)] on the window.
inline Eigen::MatrixXcd gauged_kernel_matrix(const SpectralParameter& s, const WindowGrid& window) {
  const ChKernel k(s);
  const int n = window.n_points;
  std::vector<KernelPoint> p(n);
  std::vector<cplx> ph(n);
  for (int i = 0; i < n; ++i) {
    p[i] = k.point(window.nodes[i]);
    ph[i] = psi(s, window.nodes[i]);
  }
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = ph[i] * k(p[i], p[j]) * std::conj(ph[j]);
  return m;
}

/// Catmull-Rom interpolation of window samples; zero outside the window.
inline SupportedFunction interpolate_samples(std::span<const cplx> samples, const WindowGrid& window) {
  if (samples.size() != window.nodes.size()) throw DomainError("sample count mismatch");
  auto data = std::make_shared<std::vector<cplx>>(samples.begin(), samples.end());
  const double x0 = window.nodes.front(), h = window.spacing;
  const int n = window.n_points;
  auto f = [data, x0, h, n](double u) -> cplx {
    const double r = (u - x0) / h;
    const int i = static_cast<int>(std::floor(r));
    if (i < -1 || i >= n) return 0.0;
    const double t = r - i;
    auto at = [&](int j) { return (j < 0 || j >= n) ? cplx(0.0) : (*data)[j]; };
    const cplx p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
    return 0.5 * (2.0 * p1 + (p2 - p0) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t * t +
                  (3.0 * p1 - p0 - 3.0 * p2 + p3) * t * t * t);
  };
  return {f, {window.nodes.front() - h, window.nodes.back() + h}};
}

struct ProjectorOptions {
  double panel_width = 1.0;
  int nodes_per_panel = 6;
};

/**
 * (T_s^* 1_{[0,L]} T_s f)(x) at the given points (1_{[-L,0]} for HalfLine::minus).
 *
 * Uses int_0^L conj T(wx) T(wu) dw = L k1(Lx, Lu) with k1(X,U) = psi(X)K(X,U)conj psi(U),
 * so the result is int k1(Lx, U) f(U/L) dU, integrated with Gauss panels of unit
 * width in U. Panels next to U = 0 are Gauss-Jacobi with exponent Re s.
 */
inline std::vector<cplx> halfline_projector_apply(const ChKernel& k, const SupportedFunction& f,
                                                  std::span<const double> xs, double L,
                                                  HalfLine side = HalfLine::plus,
                                                  const ProjectorOptions& opt = {}) {
  if (!(L > 0.0)) throw DomainError("halfline projector: cutoff must be > 0");
  const SpectralParameter& s = k.parameter();
  const double sg = side == HalfLine::plus ? 1.0 : -1.0;
  const double lo = L * f.support.lo, hi = L * f.support.hi;

  std::vector<QuadratureRule> panels;
  auto add_span = [&](double a, double b, bool left_sing, bool right_sing) {
    const int np = std::max(1, static_cast<int>(std::ceil((b - a) / opt.panel_width)));
    const double w = (b - a) / np;
    for (int p = 0; p < np; ++p) {
      const double pa = a + p * w, pb = (p + 1 == np) ? b : a + (p + 1) * w;
      const double le = (left_sing && p == 0) ? s.re() : 0.0;
      const double re = (right_sing && p + 1 == np) ? s.re() : 0.0;
      panels.push_back(gauss_jacobi(opt.nodes_per_panel + 2 * (le != 0.0 || re != 0.0), le, re,
                                    {pa, pb}));
    }
  };
  if (lo < 0.0 && hi > 0.0) {
    add_span(lo, 0.0, false, true);
    add_span(0.0, hi, true, false);
  } else {
    add_span(lo, hi, lo == 0.0, hi == 0.0);
  }

  std::vector<KernelPoint> up;
  std::vector<cplx> fw;  // plain weight * f(U/L) * conj psi(sg U)
  for (const auto& p : panels) {
    for (std::size_t t = 0; t < p.size(); ++t) {
      const double u = p.nodes[t];
      const cplx fv = f.f(u / L);
      if (fv == cplx(0.0)) continue;
      up.push_back(k.point(sg * u));
      fw.push_back(p.plain_weights[t] * fv * std::conj(psi(s, sg * u)));
    }
  }
  std::vector<cplx> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double X = sg * L * xs[i];
    const KernelPoint px = k.point(X);
    cplx acc = 0.0;
    for (std::size_t j = 0; j < up.size(); ++j) acc += k(px, up[j]) * fw[j];
    out[i] = psi(s, X) * acc;
  }
  return out;
}

/// Same operator through explicit forward and adjoint transforms; only for small L and R.
inline std::vector<cplx> halfline_projector_apply_dense(const ChKernel& k,
                                                        std::span<const cplx> f_samples,
                                                        const WindowGrid& window, double L,
                                                        int omega_panels, int nodes_per_panel = 8) {
  const QuadratureRule om = panel_gauss_legendre({0.0, L}, omega_panels, nodes_per_panel);
  const Eigen::MatrixXcd t = tcal_matrix(k, om.nodes, window.nodes);
  const Eigen::VectorXcd fv = Eigen::Map<const Eigen::VectorXcd>(f_samples.data(), f_samples.size());
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(om.weights.data(), om.size());
  const Eigen::VectorXcd tf = window.spacing * (t * fv);
  const Eigen::VectorXcd back = t.adjoint() * (w.asDiagonal() * tf);
  return {back.data(), back.data() + back.size()};
}

struct PwResidual {
  double residual = 0.0;      // ||(T_s^* 1 T_s - F^* 1 F) f||_2 on the window
  double reference_norm = 0.0;  // ||F^* 1 F f||_2 on the window
  double cutoff = 0.0;
};

inline PwResidual pw_projector_residual(const SpectralParameter& s, const SupportedFunction& f,
                                        const WindowGrid& window, double L,
                                        HalfLine side = HalfLine::plus,
                                        const ProjectorOptions& opt = {}) {
  const auto a = halfline_projector_apply(ChKernel(s), f, window.nodes, L, side, opt);
  const auto b = halfline_projector_apply(ChKernel(0.0), f, window.nodes, L, side, opt);
  double r2 = 0.0, n2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    r2 += std::norm(a[i] - b[i]);
    n2 += std::norm(b[i]);
  }
  return {std::sqrt(window.spacing * r2), std::sqrt(window.spacing * n2), L};
}

/// Sampled input: the samples are interpolated between window nodes.
inline PwResidual pw_projector_residual(const SpectralParameter& s, std::span<const cplx> f_samples,
                                        const WindowGrid& window, double L,
                                        HalfLine side = HalfLine::plus) {
  return pw_projector_residual(s, interpolate_samples(f_samples, window), window, L, side);
}

/// Gauss panels on [a, b] fine enough for e^{ixt} with |x| <= R.
inline QuadratureRule oscillatory_rule(Interval d, double R, int min_panels = 1) {
  const int panels = std::max(min_panels, static_cast<int>(std::ceil(d.length() * R / 6.0)));
  return panel_gauss_legendre(d, panels, 10);
}

/// q(x) = int_{1/2}^1 conj T_s(x t) dt on the window.
inline std::vector<cplx> hardy_probe(const SpectralParameter& s, const WindowGrid& window) {
  const QuadratureRule rule = oscillatory_rule({0.5, 1.0}, window.half_width, 4);
  const std::vector<cplx> ones(rule.size(), 1.0);
  return adjoint(s, ones, rule, window.nodes);
}

/**
 * Fraction of discrete-Fourier energy of the samples at negative frequency,
 * where positive frequency means e^{+iwx}. The zero and Nyquist bins count half.
 */
inline double hardy_membership(std::span<const cplx> samples, const WindowGrid& window,
                               double max_tail_fraction = 0.1) {
  const int n = window.n_points;
  if (static_cast<int>(samples.size()) != n) throw DomainError("hardy_membership: size mismatch");
  double total = 0.0, tail = 0.0;
  for (int j = 0; j < n; ++j) {
    const double e = std::norm(samples[j]);
    total += e;
    if (std::abs(window.nodes[j]) > 0.9 * window.half_width) tail += e;
  }
  if (total == 0.0) throw DomainError("hardy_membership: zero samples");
  if (tail > max_tail_fraction * total)
    throw TailMassError("hardy_membership: more than 10% of the mass sits near the window edge");
  std::vector<cplx> roots(n);
  for (int m = 0; m < n; ++m) roots[m] = std::polar(1.0, 2.0 * std::numbers::pi * m / n);
  // Coefficient of e^{+i w_k x}: sum_j q_j e^{-2 pi i jk/n}; bins k < n/2 are positive.
  double pos = 0.0, neg = 0.0;
  for (int kk = 0; kk < n; ++kk) {
    cplx acc = 0.0;
    long long idx = 0;
    for (int j = 0; j < n; ++j) {
      acc += samples[j] * std::conj(roots[idx]);
      idx += kk;
      if (idx >= n) idx -= n;
    }
    const double e = std::norm(acc);
    if (kk == 0 || kk == n / 2) {
      pos += 0.5 * e;
      neg += 0.5 * e;
    } else if (kk < n / 2) {
      pos += e;
    } else {
      neg += e;
    }
  }
  return neg / (pos + neg);
}

/**
 * Antiderivative G(u) = int_0^u T_s, tabulated at a fixed step on [-umax, umax]
 * and completed between table points with a short Gauss rule. The panels
 * touching 0 use a Jacobi rule for the |u|^{Re s} behaviour.
 */
class TcalAntiderivative {
 public:
  TcalAntiderivative(const ChKernel& k, double umax, double step = 0.05)
      : k_(k), step_(step), fine_(gauss_legendre(8, {0.0, 1.0})),
        origin_(gauss_jacobi(12, k.parameter().re(), 0.0, {0.0, 1.0})) {
    const int m = static_cast<int>(std::ceil(umax / step)) + 1;
    plus_.assign(m + 1, 0.0);
    minus_.assign(m + 1, 0.0);
    for (int j = 0; j < m; ++j) {
      plus_[j + 1] = plus_[j] + piece(j, 1.0, 1.0);
      minus_[j + 1] = minus_[j] + piece(j, 1.0, -1.0);
    }
  }

  cplx operator()(double u) const {
    const double sg = u < 0.0 ? -1.0 : 1.0;
    const double au = std::abs(u);
    const int j = static_cast<int>(au / step_);
    const auto& tab = sg > 0.0 ? plus_ : minus_;
    if (j + 1 >= static_cast<int>(tab.size())) throw DomainError("TcalAntiderivative: out of table");
    const double frac = au / step_ - j;
    return sg * (tab[j] + piece(j, frac, sg));
  }

 private:
  // int over |u| in [j step, (j + frac) step] on the side sg, as a positive-orientation integral.
  cplx piece(int j, double frac, double sg) const {
    if (frac <= 0.0) return 0.0;
    const double a = j * step_, len = frac * step_;
    if (j == 0) return from_origin(len, sg);
    cplx acc = 0.0;
    for (std::size_t t = 0; t < fine_.size(); ++t)
      acc += fine_.weights[t] * k_.tcal(sg * (a + len * fine_.nodes[t]));
    return len * acc;
  }

  // |u|^{i Im s} is not polynomial near 0: grade geometrically, Jacobi on the last cell.
  cplx from_origin(double len, double sg) const {
    constexpr int kLevels = 40;
    cplx acc = 0.0;
    double hi = len;
    for (int l = 0; l < kLevels; ++l) {
      const double lo = 0.5 * hi;
      for (std::size_t t = 0; t < fine_.size(); ++t)
        acc += (hi - lo) * fine_.weights[t] * k_.tcal(sg * (lo + (hi - lo) * fine_.nodes[t]));
      hi = lo;
    }
    for (std::size_t t = 0; t < origin_.size(); ++t)
      acc += hi * origin_.plain_weights[t] * k_.tcal(sg * hi * origin_.nodes[t]);
    return acc;
  }

  const ChKernel& k_;
  double step_;
  QuadratureRule fine_, origin_;
  std::vector<cplx> plus_, minus_;
};

/**
 * ||T_s 1_[n, n+1]|| restricted to the window [-R, R]. With G the antiderivative of
 * T_s, (T_s 1_[n,n+1])(w) = (G(w(n+1)) - G(wn)) / w. Each window cell is split into
 * Gauss nodes fine enough for the 1/(n+1) scale of the integrand in w.
 */
inline double unit_interval_norm(const SpectralParameter& s, int n, const WindowGrid& window) {
  if (n < 0) throw DomainError("unit_interval_norm: n must be >= 0");
  const ChKernel k(s);
  const double a = n, b = n + 1.0;
  const TcalAntiderivative g(k, window.half_width * b);
  const int q = 4 + static_cast<int>(std::ceil(2.0 * window.spacing * b));
  const QuadratureRule cell = gauss_legendre(q, {-0.5, 0.5});
  double acc = 0.0;
  for (double c : window.nodes) {
    for (std::size_t t = 0; t < cell.size(); ++t) {
      const double w = c + window.spacing * cell.nodes[t];
      const cplx v = (g(w * b) - g(w * a)) / w;
      acc += cell.weights[t] * std::norm(v);
    }
  }
  return std::sqrt(window.spacing * acc);
}

struct RoundtripResult {
  double relative_error = 0.0;
  double half_width = 0.0;
};

/**
 * ||T_s T_s^* g - g|| / ||g|| on [0,1] with the adjoint sampled on the window
 * [-R, R] at spacing h. g is integrated and evaluated on Gauss panels whose
 * edges include the breakpoints of g.
 */
inline RoundtripResult roundtrip_error(const SpectralParameter& s,
                                       const std::function<cplx(double)>& g,
                                       std::vector<double> breakpoints, double R, double h = 0.1,
                                       int panels_per_segment = 4, int nodes_per_panel = 8) {
  std::vector<double> bp;
  std::sort(breakpoints.begin(), breakpoints.end());
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double len = breakpoints[i + 1] - breakpoints[i];
    // Panels must resolve e^{ixt} for |x| <= R.
    const int np = std::max(panels_per_segment, static_cast<int>(std::ceil(len * R / 4.0)));
    for (int p = 0; p < np; ++p) bp.push_back(breakpoints[i] + len * p / np);
  }
  bp.push_back(breakpoints.back());
  const QuadratureRule rule = composite_gauss_legendre(bp, nodes_per_panel);
  const WindowGrid window = WindowGrid::with_spacing(R, h);
  const ChKernel k(s);
  const Eigen::MatrixXcd p = tcal_matrix(k, rule.nodes, window.nodes);
  Eigen::VectorXcd gv(rule.size());
  for (std::size_t t = 0; t < rule.size(); ++t) gv(t) = g(rule.nodes[t]);
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), rule.size());
  const Eigen::VectorXcd adj = p.adjoint() * (w.asDiagonal() * gv);
  const Eigen::VectorXcd back = window.spacing * (p * adj);
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < rule.size(); ++t) {
    num += w(t) * std::norm(back(t) - gv(t));
    den += w(t) * std::norm(gv(t));
  }
  return {std::sqrt(num / den), R};
}

}  // namespace chk
