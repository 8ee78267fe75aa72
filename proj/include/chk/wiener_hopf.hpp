#pragma once

// Wiener-Hopf operators W_f = 1_+ F f F^* 1_+ and their deformed versions
// G_f = 1_+ T_s f T_s^* 1_+, discretized on [0, L]; factorization and the
// commutator trace formula.
//
// Normalization: f(t) = int fhat(w) e^{iwt} dw, so that F f F^* is convolution
// with fhat and T_0 = F.

#include <chk/errors.hpp>
#include <chk/kernel.hpp>
#include <chk/quadrature.hpp>
#include <chk/transform.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace chk {

/// How fast fhat dies off; `support` is exact for compact, a cutoff below 1e-20 for rapid.
enum class SymbolDecay { compact, rapid };

/// A symbol given by its Fourier side fhat. `support` bounds where fhat is not
/// negligible; `breakpoints` lists interior points where fhat is not smooth.
struct SymbolFunction {
  std::function<cplx(double)> fhat;
  Interval support{-8.0, 8.0};
  std::vector<double> breakpoints;
  SymbolDecay decay = SymbolDecay::compact;

  cplx operator()(double w) const { return fhat(w); }

  static SymbolFunction zero() { return {[](double) { return cplx(0.0); }, {-1.0, 1.0}, {}}; }

  /// fhat(w) = exp(-(w/width)^2).
  static SymbolFunction gaussian(double width = 1.0) {
    const double r = 7.0 * width;
    return {[width](double w) { return cplx(std::exp(-(w / width) * (w / width))); }, {-r, r}, {0.0},
            SymbolDecay::rapid};
  }

  /// Piecewise-linear interpolation of samples on increasing nodes, zero outside.
  static SymbolFunction sampled(std::vector<double> nodes, std::vector<cplx> values) {
    if (nodes.size() < 2 || nodes.size() != values.size())
      throw DomainError("SymbolFunction::sampled: need matching node/value arrays of length >= 2");
    if (!std::is_sorted(nodes.begin(), nodes.end()) ||
        std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
      throw DomainError("SymbolFunction::sampled: nodes must be strictly increasing");
    const Interval sup{nodes.front(), nodes.back()};
    std::vector<double> bps(nodes.begin() + 1, nodes.end() - 1);
    return {[nodes = std::move(nodes), values = std::move(values)](double w) {
              if (w <= nodes.front() || w >= nodes.back()) return cplx(0.0);
              const auto it = std::upper_bound(nodes.begin(), nodes.end(), w);
              const std::size_t j = static_cast<std::size_t>(it - nodes.begin());
              const double u = (w - nodes[j - 1]) / (nodes[j] - nodes[j - 1]);
              return (1.0 - u) * values[j - 1] + u * values[j];
            },
            sup, std::move(bps)};
  }

  /// sin^2 bump on [a, b], scaled by `height`.
  static SymbolFunction bump(double a, double b, cplx height = 1.0) {
    if (!(b > a)) throw DomainError("SymbolFunction::bump: empty support");
    return {[a, b, height](double w) {
              if (w <= a || w >= b) return cplx(0.0);
              const double u = std::sin(std::numbers::pi * (w - a) / (b - a));
              return height * u * u;
            },
            {a, b},
            {}};
  }
};

/// fhat_+ = fhat on w > 0, fhat_- = fhat on w < 0; each half gets fhat(0)/2 at w = 0.
inline std::pair<SymbolFunction, SymbolFunction> split_frequencies(const SymbolFunction& f) {
  const auto g = f.fhat;
  SymbolFunction plus{[g](double w) { return w > 0.0 ? g(w) : (w == 0.0 ? 0.5 * g(0.0) : cplx(0.0)); },
                      {std::max(0.0, f.support.lo), std::max(f.support.hi, 1e-300)},
                      {},
                      f.decay};
  SymbolFunction minus{[g](double w) { return w < 0.0 ? g(w) : (w == 0.0 ? 0.5 * g(0.0) : cplx(0.0)); },
                       {std::min(f.support.lo, -1e-300), std::min(0.0, f.support.hi)},
                       {},
                       f.decay};
  for (double b : f.breakpoints) {
    if (b > 0.0) plus.breakpoints.push_back(b);
    if (b < 0.0) minus.breakpoints.push_back(b);
  }
  return {plus, minus};
}

namespace detail {

// Gauss panels over the support, split at 0 and the breakpoints, fine enough for e^{iwt}, |t| <= tmax.
inline QuadratureRule symbol_rule(const SymbolFunction& f, double tmax, int npp = 12) {
  std::vector<double> cuts{f.support.lo, f.support.hi};
  if (f.support.lo < 0.0 && f.support.hi > 0.0) cuts.push_back(0.0);
  for (double b : f.breakpoints)
    if (b > f.support.lo && b < f.support.hi) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<double> bp;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    const int p = std::max(2, static_cast<int>(std::ceil(len * (1.0 + tmax) / 6.0)));
    for (int k = 0; k < p; ++k) bp.push_back(cuts[i] + len * k / p);
  }
  bp.push_back(cuts.back());
  return composite_gauss_legendre(bp, npp);
}

inline double spectral_norm(const Eigen::MatrixXcd& m) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.adjoint() * m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw EigFailure("spectral_norm: eigensolver failed");
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace detail

/// f(t) = int fhat(w) e^{iwt} dw at each t.
inline std::vector<cplx> symbol_space_values(const SymbolFunction& f, std::span<const double> ts) {
  double tmax = 0.0;
  for (double t : ts) tmax = std::max(tmax, std::abs(t));
  const QuadratureRule r = detail::symbol_rule(f, tmax);
  std::vector<cplx> fw(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) fw[k] = r.weights[k] * f(r.nodes[k]);
  std::vector<cplx> out(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) acc += fw[k] * std::polar(1.0, r.nodes[k] * ts[i]);
    out[i] = acc;
  }
  return out;
}

/// Quadrature nodes on [0, L] (or the mirrored [-L, 0]).
struct HalfLineGrid {
  double cutoff = 1.0;
  std::vector<double> nodes, weights;

  static HalfLineGrid midpoint(double L, int n) {
    if (!(L > 0.0) || n < 1) throw DomainError("HalfLineGrid: need L > 0 and n >= 1");
    HalfLineGrid g;
    g.cutoff = L;
    const QuadratureRule r = uniform_midpoint(n, {0.0, L});
    g.nodes = r.nodes;
    g.weights = r.weights;
    return g;
  }

  static HalfLineGrid gauss(double L, int panels, int nodes_per_panel = 10) {
    if (!(L > 0.0) || panels < 1) throw DomainError("HalfLineGrid: need L > 0 and panels >= 1");
    HalfLineGrid g;
    g.cutoff = L;
    const QuadratureRule r = panel_gauss_legendre({0.0, L}, panels, nodes_per_panel);
    g.nodes = r.nodes;
    g.weights = r.weights;
    return g;
  }

  HalfLineGrid mirrored() const {
    HalfLineGrid g = *this;
    for (auto& x : g.nodes) x = -x;
    return g;
  }

  std::size_t size() const { return nodes.size(); }

  QuadratureRule rule() const {
    QuadratureRule r;
    r.nodes = nodes;
    r.weights = weights;
    r.plain_weights = weights;
    r.kind = RuleKind::composite;
    r.domain = nodes.empty() || nodes.front() >= 0.0 ? Interval{0.0, cutoff} : Interval{-cutoff, 0.0};
    return r;
  }
};

/// How a symbol becomes an operator: the convolution kernel fhat(x-y) (wh), or
/// T_s (multiply by f on a t-window) T_s^* (g).
struct Maker {
  enum class Kind { wh, g };
  Kind kind = Kind::wh;
  SpectralParameter s{0.0};
  WindowGrid window;

  static Maker wh() { return {}; }
  static Maker g(const SpectralParameter& s, const WindowGrid& window) { return {Kind::g, s, window}; }

  /// Window for kernels on [-L, L]: T_s(xt) conj T_s(yt) carries frequencies up to |x| + |y|,
  /// so the t-spacing stays below pi / (2L) with some margin.
  static Maker g_for(const SpectralParameter& s, double L, double t_half_width = 50.0) {
    if (!(L > 0.0)) throw DomainError("Maker::g_for: L must be > 0");
    return g(s, WindowGrid::with_spacing(t_half_width, std::numbers::pi / (2.4 * L)));
  }
};

/// Kernel matrix K(x_i, y_j) (unweighted) of the maker's operator between two node sets.
inline Eigen::MatrixXcd symbol_kernel_block(const SymbolFunction& f, std::span<const double> xs,
                                            std::span<const double> ys, const Maker& maker) {
  Eigen::MatrixXcd k(xs.size(), ys.size());
  if (maker.kind == Maker::Kind::wh) {
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = 0; j < ys.size(); ++j) k(i, j) = f(xs[i] - ys[j]);
    return k;
  }
  const WindowGrid& w = maker.window;
  if (w.nodes.empty()) throw DomainError("g maker: empty window");
  const ChKernel tk(maker.s);
  const auto fv = symbol_space_values(f, w.nodes);
  const Eigen::MatrixXcd a = tcal_matrix(tk, xs, w.nodes);
  const Eigen::MatrixXcd b = tcal_matrix(tk, ys, w.nodes);
  Eigen::VectorXcd d(w.nodes.size());
  for (std::size_t t = 0; t < w.nodes.size(); ++t) d(t) = w.spacing * fv[t];
  return a * d.asDiagonal() * b.adjoint();
}

/// Nystrom matrix fhat(x_i - x_j) w_j on the half-line grid.
inline DiscreteOperator wiener_hopf_matrix(const SymbolFunction& f, const HalfLineGrid& grid) {
  Eigen::MatrixXcd k = symbol_kernel_block(f, grid.nodes, grid.nodes, Maker::wh());
  for (std::size_t j = 0; j < grid.size(); ++j) k.col(j) *= grid.weights[j];
  return {k, grid.rule(), grid.rule()};
}

/// 1_[0,L] T_s f T_s^* 1_[0,L] composed through the window, weighted like wiener_hopf_matrix.
inline DiscreteOperator g_matrix(const SymbolFunction& f, const SpectralParameter& s, const HalfLineGrid& grid,
                                 const WindowGrid& window) {
  Eigen::MatrixXcd k = symbol_kernel_block(f, grid.nodes, grid.nodes, Maker::g(s, window));
  for (std::size_t j = 0; j < grid.size(); ++j) k.col(j) *= grid.weights[j];
  return {k, grid.rule(), grid.rule()};
}

inline DiscreteOperator make_operator(const SymbolFunction& f, const HalfLineGrid& grid, const Maker& maker) {
  return maker.kind == Maker::Kind::wh ? wiener_hopf_matrix(f, grid) : g_matrix(f, maker.s, grid, maker.window);
}

/// The product symbol f g on the Fourier side: (fhat * ghat)(w) by quadrature.
inline SymbolFunction product_symbol(const SymbolFunction& f, const SymbolFunction& g) {
  const QuadratureRule r = detail::symbol_rule(f, 0.0, 16);
  std::vector<double> nodes = r.nodes;
  std::vector<cplx> fw(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) fw[k] = r.weights[k] * f(r.nodes[k]);
  const auto gh = g.fhat;
  std::vector<double> bps;
  for (double a : {f.support.lo, f.support.hi})
    for (double b : {g.support.lo, g.support.hi}) bps.push_back(a + b);
  return {[nodes, fw, gh](double w) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < nodes.size(); ++k) acc += fw[k] * gh(w - nodes[k]);
            return acc;
          },
          {f.support.lo + g.support.lo, f.support.hi + g.support.hi},
          bps};
}

struct FactorizationResidual {
  double residual = 0.0;   // spectral norm of the weight-symmetrized difference, interior block
  double reference = 0.0;  // same norm of M_{f+ f-}
  double interior = 0.0;   // block [0, interior] used
};

/**
 * || M_{f+ f-} - M_{f-} M_{f+} || on the discretization. Truncating the half-line at L
 * drops the part of the inner integral beyond L, which is O(1) in a band of width
 * (support extent) below L; the norm is taken on [0, L - 2 * extent].
 */
inline FactorizationResidual factorization_residual(const SymbolFunction& f_plus, const SymbolFunction& f_minus,
                                                    const HalfLineGrid& grid, const Maker& maker) {
  const double extent = std::max({std::abs(f_plus.support.lo), std::abs(f_plus.support.hi),
                                  std::abs(f_minus.support.lo), std::abs(f_minus.support.hi)});
  const double interior = grid.cutoff - 2.0 * extent;
  if (!(interior > 0.0)) throw DomainError("factorization_residual: L too small for the symbol supports");
  const SymbolFunction prod = product_symbol(f_plus, f_minus);
  const Eigen::MatrixXcd mp = make_operator(prod, grid, maker).matrix;
  const Eigen::MatrixXcd mm = make_operator(f_minus, grid, maker).matrix;
  const Eigen::MatrixXcd mpl = make_operator(f_plus, grid, maker).matrix;
  const Eigen::MatrixXcd diff = mp - mm * mpl;
  std::vector<int> keep;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid.nodes[i] <= interior) keep.push_back(static_cast<int>(i));
  const int n = static_cast<int>(keep.size());
  Eigen::MatrixXcd d(n, n), r(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      // Matrices carry w_j; symmetrize to sqrt(w_i) K sqrt(w_j).
      const double sc = std::sqrt(grid.weights[keep[a]] / grid.weights[keep[b]]);
      d(a, b) = sc * diff(keep[a], keep[b]);
      r(a, b) = sc * mp(keep[a], keep[b]);
    }
  return {detail::spectral_norm(d), detail::spectral_norm(r), interior};
}

/// int_0^inf w fhat(w) fhat(-w) dw by Gauss panels.
inline cplx trace_formula_value(const SymbolFunction& f) {
  const double hi = std::max(std::abs(f.support.lo), std::abs(f.support.hi));
  std::vector<double> bp{0.0};
  for (double b : f.breakpoints)
    if (b > 0.0 && b < hi) bp.push_back(b);
  for (double b : f.breakpoints)
    if (b < 0.0 && -b < hi) bp.push_back(-b);
  bp.push_back(hi);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  std::vector<double> fine;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i)
    for (int k = 0; k < 8; ++k) fine.push_back(bp[i] + (bp[i + 1] - bp[i]) * k / 8.0);
  fine.push_back(bp.back());
  const QuadratureRule r = composite_gauss_legendre(fine, 16);
  cplx acc = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) acc += r.weights[k] * r.nodes[k] * f(r.nodes[k]) * f(-r.nodes[k]);
  return acc;
}

/**
 * Tr [M_{f-}, M_{f+}] = Tr (1_+ M f_+ M^* 1_-)(1_- M f_- M^* 1_+), a double sum of the two
 * Hilbert-Schmidt kernels over [0,L] x [-L,0].
 */
inline cplx commutator_trace(const SymbolFunction& f, const HalfLineGrid& grid, const Maker& maker) {
  const auto [fp, fm] = split_frequencies(f);
  const HalfLineGrid neg = grid.mirrored();
  const Eigen::MatrixXcd hp = symbol_kernel_block(fp, grid.nodes, neg.nodes, maker);
  const Eigen::MatrixXcd hm = symbol_kernel_block(fm, neg.nodes, grid.nodes, maker);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < neg.size(); ++j) acc += hp(i, j) * neg.weights[j] * hm(j, i) * grid.weights[i];
  return acc;
}

/**
 * For the g maker the trace on [0, L] falls short of the half-line value by about c/L
 * (the deformed kernels decay slowly off the diagonal). 2 tr(L) - tr(L/2) removes that
 * term. The grid is rebuilt with the same panel density on [0, L/2].
 */
inline cplx commutator_trace_extrapolated(const SymbolFunction& f, double L, int panels, int nodes_per_panel,
                                          const Maker& maker) {
  if (panels < 2 || panels % 2) throw DomainError("commutator_trace_extrapolated: panels must be even");
  const cplx full = commutator_trace(f, HalfLineGrid::gauss(L, panels, nodes_per_panel), maker);
  const cplx half = commutator_trace(f, HalfLineGrid::gauss(0.5 * L, panels / 2, nodes_per_panel), maker);
  return 2.0 * full - half;
}

struct SobolevHalf {
  double l2 = 0.0;
  double seminorm = 0.0;
  double norm() const { return l2 + seminorm; }
};

/// ||f||_2 + (int |w| |fhat|^2 dw)^{1/2}, with ||f||_2^2 = 2 pi int |fhat|^2 in this normalization.
inline SobolevHalf sobolev_half(const SymbolFunction& f) {
  const auto integrate = [&](double scale) {
    const double lo = scale * f.support.lo, hi = scale * f.support.hi;
    std::vector<double> bp{lo};
    for (double b : f.breakpoints)
      if (b > lo && b < hi) bp.push_back(b);
    if (lo < 0.0 && hi > 0.0) bp.push_back(0.0);
    bp.push_back(hi);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    std::vector<double> fine;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i)
      for (int k = 0; k < 16; ++k) fine.push_back(bp[i] + (bp[i + 1] - bp[i]) * k / 16.0);
    fine.push_back(bp.back());
    const QuadratureRule r = composite_gauss_legendre(fine, 16);
    double l2 = 0.0, semi = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      const double a = std::norm(f(r.nodes[k]));
      l2 += r.weights[k] * a;
      semi += r.weights[k] * std::abs(r.nodes[k]) * a;
    }
    return std::pair{l2, semi};
  };
  const auto [l1, s1] = integrate(1.0);
  const auto [l2, s2] = integrate(2.0);
  const bool ok = std::isfinite(s2) && std::abs(s2 - s1) <= 1e-8 * std::max(s2, 1e-300) + 1e-300 &&
                  std::abs(l2 - l1) <= 1e-8 * std::max(l2, 1e-300) + 1e-300;
  if (!ok) throw DivergenceError("sobolev_half: integral does not settle within the support");
  return {std::sqrt(2.0 * std::numbers::pi * l1), std::sqrt(s1)};
}

struct HilbertSchmidtCheck {
  double discrete = 0.0;  // sum |fhat_+(x_i - y_j)|^2 w_i w_j over [0,L] x [-L,0]
  double exact = 0.0;     // int_0^inf y |fhat(y)|^2 dy
};

inline HilbertSchmidtCheck hilbert_schmidt_identity(const SymbolFunction& f, const HalfLineGrid& grid) {
  const auto fp = split_frequencies(f).first;
  const HalfLineGrid neg = grid.mirrored();
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < neg.size(); ++j)
      acc += std::norm(fp(grid.nodes[i] - neg.nodes[j])) * grid.weights[i] * neg.weights[j];
  // int_0^inf w |fhat|^2 = trace formula value of a symbol whose product fhat(w) fhat(-w) is |fhat(w)|^2.
  const SymbolFunction half{[f](double w) { return w >= 0.0 ? f(w) : std::conj(f(-w)); }, f.support, f.breakpoints};
  return {acc, trace_formula_value(half).real()};
}

}  // namespace chk
