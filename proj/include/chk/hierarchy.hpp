#pragma once

// One-dimensional pieces L^{(s,n)} of the Paley-Wiener space: polynomials
// orthonormal for t^{2Re s} on [0,1], the basis functions built from them, and
// the checks that they are orthogonal and vanish to order n at the origin.

#include <chk/errors.hpp>
#include <chk/kernel.hpp>
#include <chk/quadrature.hpp>
#include <chk/special_fn.hpp>
#include <chk/transform.hpp>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace chk {

inline constexpr int kJacobiMaxDegree = 64;

/**
 * Orthonormal polynomials for t^alpha dt on [0,1], positive leading coefficient.
 * Built by Gram-Schmidt on monomials (applied twice) in 128-digit arithmetic with
 * exact moments 1/(alpha+k+1); the monomial Gram matrix is Hilbert-like, so the
 * digits are needed. The result is stored as recurrence coefficients
 *   t p_n = b_{n+1} p_{n+1} + a_n p_n + b_n p_{n-1},
 * which evaluate stably in double.
 */
class JacobiFamily {
 public:
  explicit JacobiFamily(double alpha, int max_degree = kJacobiMaxDegree) : alpha_(alpha), nmax_(max_degree) {
    if (!(alpha > -1.0)) throw DomainError("JacobiFamily: alpha must exceed -1");
    if (max_degree < 0) throw DegreeError("JacobiFamily: negative degree");
    build();
  }

  double alpha() const { return alpha_; }
  int max_degree() const { return nmax_; }

  /// p_0(t), ..., p_n(t).
  std::vector<double> values(int n, double t) const {
    check(n);
    std::vector<double> p(n + 1);
    p[0] = p0_;
    if (n > 0) p[1] = (t - a_[0]) * p[0] / b_[1];
    for (int k = 1; k < n; ++k) p[k + 1] = ((t - a_[k]) * p[k] - b_[k] * p[k - 1]) / b_[k + 1];
    return p;
  }

  double operator()(int n, double t) const { return values(n, t)[n]; }

  /// int_0^1 t^{k+alpha} p_n(t) dt from the 128-digit coefficients; zero to ~1e-100 for k < n.
  double weighted_moment(int n, int k) const {
    check(n);
    if (k < 0 || k >= static_cast<int>(moments_[n].size())) throw DomainError("JacobiFamily: moment index out of range");
    return moments_[n][k];
  }
  int moment_count() const { return static_cast<int>(moments_[0].size()); }

  /// Monomial coefficients of p_n, low degree first (rounded to double).
  std::vector<double> coefficients(int n) const {
    check(n);
    return coef_[n];
  }

 private:
  using mp = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<128>>;

  void check(int n) const {
    if (n < 0 || n > nmax_) throw DegreeError("JacobiFamily: degree outside [0, " + std::to_string(nmax_) + "]");
  }

  void build() {
    const int N = nmax_ + 1;  // polynomials p_0..p_nmax, plus one more for b_{nmax+1}
    const int deg = N + 1;
    const mp alpha(alpha_);
    std::vector<mp> m(2 * deg + kExtraMoments + 2);
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = mp(1) / (alpha + mp(k + 1));
    // (M v)_i = sum_j v_j m_{i+j}, for i = 0..deg
    const auto apply = [&](const std::vector<mp>& v) {
      std::vector<mp> out(deg + 1, mp(0));
      for (int i = 0; i <= deg; ++i)
        for (std::size_t j = 0; j < v.size(); ++j)
          if (v[j] != 0) out[i] += v[j] * m[i + j];
      return out;
    };
    const auto dot = [](const std::vector<mp>& u, const std::vector<mp>& mv) {
      mp acc = 0;
      for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * mv[i];
      return acc;
    };
    std::vector<std::vector<mp>> p, mp_;
    for (int n = 0; n <= N; ++n) {
      std::vector<mp> q(deg, mp(0));
      q[n] = 1;
      for (int pass = 0; pass < 2; ++pass)
        for (int k = 0; k < n; ++k) {
          const mp c = dot(q, mp_[k]);
          for (int i = 0; i <= k; ++i) q[i] -= c * p[k][i];
        }
      const auto mq = apply(q);
      const mp nrm = sqrt(dot(q, mq));
      for (auto& v : q) v /= nrm;
      p.push_back(q);
      mp_.push_back(apply(q));
    }
    a_.resize(N);
    b_.assign(N + 1, 0.0);
    coef_.resize(N);
    p0_ = static_cast<double>(p[0][0]);
    for (int n = 0; n < N; ++n) {
      // a_n = <t p_n, p_n> = sum_i p_{n,i} (M p_n)_{i+1}
      mp an = 0;
      for (int i = 0; i <= n; ++i) an += p[n][i] * mp_[n][i + 1];
      a_[n] = static_cast<double>(an);
      b_[n + 1] = static_cast<double>(p[n][n] / p[n + 1][n + 1]);
      coef_[n].resize(n + 1);
      for (int i = 0; i <= n; ++i) coef_[n][i] = static_cast<double>(p[n][i]);
    }
    moments_.assign(N, std::vector<double>(N + kExtraMoments));
    for (int n = 0; n < N; ++n)
      for (int k = 0; k < N + kExtraMoments; ++k) {
        mp acc = 0;
        for (int j = 0; j <= n; ++j) acc += p[n][j] * m[k + j];
        moments_[n][k] = static_cast<double>(acc);
      }
  }

  static constexpr int kExtraMoments = 64;

  double alpha_;
  int nmax_;
  double p0_ = 1.0;
  std::vector<double> a_, b_;
  std::vector<std::vector<double>> coef_;
  std::vector<std::vector<double>> moments_;
};

/// Shared family for t^alpha, built once per alpha.
inline const JacobiFamily& jacobi_family(double alpha) {
  static std::mutex mu;
  static std::map<double, std::unique_ptr<JacobiFamily>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[alpha];
  if (!slot) slot = std::make_unique<JacobiFamily>(alpha);
  return *slot;
}

/// Degree-n orthonormal polynomial for t^{2Re s} on [0,1].
inline double jacobi_orthonormal(const SpectralParameter& s, int n, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("jacobi_orthonormal: t must lie in [0,1]");
  return jacobi_family(2.0 * s.re())(n, t);
}

/// The hypergeometric form 2F1(-n, n+1+2Re s; 1; u) of the same polynomial up to a
/// constant; u = 1 - t is the orthogonal choice, u = -t is not.
inline double jacobi_hypergeometric(const SpectralParameter& s, int n, double u) {
  if (n < 0) throw DegreeError("jacobi_hypergeometric: degree must be >= 0");
  return hyp2f1_terminating(n, cplx(n + 1.0 + 2.0 * s.re()), 1.0, u).real();
}

/// int_0^1 2F1(-1, 2; 1; -t) dt at Re s = 0, i.e. int (1 + 2t) dt = 2: the -t argument
/// does not give a polynomial orthogonal to constants.
inline double minus_t_argument_counterexample() {
  const QuadratureRule r = gauss_legendre(4, {0.0, 1.0});
  double acc = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) acc += r.weights[i] * jacobi_hypergeometric(0.0, 1, -r.nodes[i]);
  return acc;
}

/// |int_0^1 t^{k-1} t^{2Re s} p_n(t) dt|; vanishes for 1 <= k <= n.
inline double moment_annihilation(const SpectralParameter& s, int n, int k) {
  if (k < 1) throw DomainError("moment_annihilation: k must be >= 1");
  const double alpha = 2.0 * s.re();
  const auto& fam = jacobi_family(alpha);
  const QuadratureRule r = gauss_jacobi((n + k) / 2 + 4, alpha, 0.0, {0.0, 1.0});
  double acc = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) acc += r.weights[i] * std::pow(r.nodes[i], k - 1) * fam(n, r.nodes[i]);
  return std::abs(acc);
}

enum class BasisRoute { adjoint_route, closed_form };

/// Which power of t multiplies p_n in the input of the adjoint. t^s makes the
/// moments int t^k t^{conj s} g vanish, which is what the vanishing order needs;
/// t^{conj s} only agrees with it for real s.
enum class InputPower { s, conj_s };

struct BasisFunction {
  int n = 0;
  BasisRoute route = BasisRoute::adjoint_route;
  std::vector<double> x;
  std::vector<cplx> values;
};

/// Rule on [0,1] for integrands t^{2Re s} * smooth * e^{ixt}, |x| <= xmax: a Jacobi
/// panel at 0 and Legendre panels that resolve the oscillation.
inline QuadratureRule basis_t_rule(const SpectralParameter& s, double xmax, int nodes_per_panel = 16) {
  const int panels = std::max(2, static_cast<int>(std::ceil(std::abs(xmax) / 8.0)));
  const double w = 1.0 / panels;
  std::vector<QuadratureRule> parts;
  parts.push_back(gauss_jacobi(nodes_per_panel, 2.0 * s.re(), 0.0, {0.0, w}));
  std::vector<double> bp;
  for (int p = 1; p <= panels; ++p) bp.push_back(p * w);
  bp.back() = 1.0;
  parts.push_back(composite_gauss_legendre(bp, nodes_per_panel));
  QuadratureRule r = concatenate(parts);
  r.domain = {0.0, 1.0};
  r.left_exponent = 2.0 * s.re();
  return r;
}

namespace detail {

inline double max_abs(std::span<const double> xs) {
  double m = 0.0;
  for (double x : xs) {
    if (x == 0.0) throw DomainError("basis: x = 0 is excluded");
    m = std::max(m, std::abs(x));
  }
  return m;
}

// Samples of t^{power} p_n at the rule nodes, for n = 0..nmax.
inline std::vector<std::vector<cplx>> basis_inputs(const SpectralParameter& s, int nmax, const QuadratureRule& r,
                                                   InputPower power) {
  const auto& fam = jacobi_family(2.0 * s.re());
  const cplx e = power == InputPower::s ? s.value() : std::conj(s.value());
  std::vector<std::vector<cplx>> g(nmax + 1, std::vector<cplx>(r.size()));
  for (std::size_t t = 0; t < r.size(); ++t) {
    const auto p = fam.values(nmax, r.nodes[t]);
    const cplx tp = std::exp(e * std::log(r.nodes[t]));
    for (int n = 0; n <= nmax; ++n) g[n][t] = tp * p[n];
  }
  return g;
}

}  // namespace detail

/// L_n(x) = conj psi(x) (T_s^* g_n)(x) for n = 0..nmax, g_n = t^{s} p_n on [0,1]. One pass
/// over the (x, t) grid serves every n.
inline std::vector<BasisFunction> basis_L_family(const SpectralParameter& s, int nmax, std::span<const double> xs,
                                                 InputPower power = InputPower::s) {
  const QuadratureRule r = basis_t_rule(s, detail::max_abs(xs));
  const auto g = detail::basis_inputs(s, nmax, r, power);
  const ChKernel k(s);
  std::vector<BasisFunction> out(nmax + 1);
  for (int n = 0; n <= nmax; ++n) {
    out[n].n = n;
    out[n].x.assign(xs.begin(), xs.end());
    out[n].values.assign(xs.size(), 0.0);
  }
  std::vector<cplx> col(r.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const cplx gauge = std::conj(psi(s, xs[i]));
    for (std::size_t t = 0; t < r.size(); ++t) col[t] = r.plain_weights[t] * std::conj(k.tcal(xs[i] * r.nodes[t]));
    for (int n = 0; n <= nmax; ++n) {
      cplx acc = 0.0;
      for (std::size_t t = 0; t < r.size(); ++t) acc += col[t] * g[n][t];
      out[n].values[i] = gauge * acc;
    }
  }
  return out;
}

inline BasisFunction basis_L_adjoint_route(const SpectralParameter& s, int n, std::span<const double> xs,
                                           InputPower power = InputPower::s) {
  if (n < 0) throw DegreeError("basis_L_adjoint_route: degree must be >= 0");
  auto fam = basis_L_family(s, n, xs, power);
  return std::move(fam[n]);
}

/**
 * |x|^{Re s} e^{-pi/2 Im s sign x} int_0^1 e^{ixt} 1F1(s; 1+2Re s; -ixt) t^{2Re s} P_n(t) dt
 * with P_n = 2F1(-n, n+1+2Re s; 1; 1-t). Proportional to the adjoint route.
 */
inline BasisFunction basis_L_closed_form(const SpectralParameter& s, int n, std::span<const double> xs) {
  if (n < 0) throw DegreeError("basis_L_closed_form: degree must be >= 0");
  const QuadratureRule r = basis_t_rule(s, detail::max_abs(xs));
  const Hyp1F1 f(s.value(), cplx(1.0 + 2.0 * s.re()));
  std::vector<double> poly(r.size());
  for (std::size_t t = 0; t < r.size(); ++t) poly[t] = jacobi_hypergeometric(s, n, 1.0 - r.nodes[t]);
  BasisFunction out{n, BasisRoute::closed_form, {xs.begin(), xs.end()}, std::vector<cplx>(xs.size())};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    cplx acc = 0.0;
    for (std::size_t t = 0; t < r.size(); ++t) {
      const double xt = x * r.nodes[t];
      const cplx hyp = s.is_zero() ? cplx(1.0) : f(cplx(0.0, -xt));
      acc += r.plain_weights[t] * std::polar(1.0, xt) * hyp * std::pow(r.nodes[t], 2.0 * s.re()) * poly[t];
    }
    out.values[i] = rho(s, x) * acc;
  }
  return out;
}

/// Windowed Gram matrix of L_0..L_{N-1} on the window's midpoint grid.
inline Eigen::MatrixXcd gram_of_basis(const SpectralParameter& s, int N, const WindowGrid& window,
                                      InputPower power = InputPower::s) {
  if (N < 1) throw DegreeError("gram_of_basis: N must be >= 1");
  const auto fam = basis_L_family(s, N - 1, window.nodes, power);
  Eigen::MatrixXcd v(N, window.nodes.size());
  for (int n = 0; n < N; ++n)
    for (std::size_t i = 0; i < window.nodes.size(); ++i) v(n, i) = fam[n].values[i];
  return window.spacing * v * v.adjoint();
}

/**
 * The windowed Gram converges like 1/R: the jump of g_n at t = 1 gives
 * L_n(x) ~ p_n(1) e^{ix}/(ix sqrt(2 pi)), so entries miss about p_m(1) p_n(1)/(pi R).
 * 2 G(R) - G(R/2) removes that term; both windows share the spacing.
 */
inline Eigen::MatrixXcd gram_of_basis_extrapolated(const SpectralParameter& s, int N, const WindowGrid& window,
                                                   InputPower power = InputPower::s) {
  const WindowGrid half = WindowGrid::with_spacing(0.5 * window.half_width, window.spacing);
  return 2.0 * gram_of_basis(s, N, window, power) - gram_of_basis(s, N, half, power);
}

/**
 * L_n(x) / rho(x) from the power series. With e^{iu} 1F1(s; b; -iu) = 1F1(1+conj s; b; iu),
 *   h_n(x) = Gamma(1+conj s)/Gamma(b)/sqrt(2 pi) sum_k (1+conj s)_k/((b)_k k!) (ix)^k mu_k,
 * mu_k = int t^{k+2Re s} p_n. The quadrature route cancels n orders of magnitude in
 * double; here the k < n moments come out at the 1e-100 level instead. |x| <= 2.
 */
struct SeriesValue {
  cplx value = 0.0;
  double floor = 0.0;  // sum of |terms| carried by the k < n moments, which vanish exactly
};

inline SeriesValue basis_h_series_detail(const SpectralParameter& s, int n, double x) {
  if (!(std::abs(x) <= 2.0)) throw DomainError("basis_h_series: |x| must be <= 2");
  const auto& fam = jacobi_family(2.0 * s.re());
  const cplx a = 1.0 + std::conj(s.value());
  const double b = 1.0 + 2.0 * s.re();
  cplx coef = gamma_ratio({a}, {cplx(b)}) * kInvSqrtTwoPi;
  SeriesValue out;
  const int kmax = fam.moment_count() - 1;
  for (int k = 0; k <= kmax; ++k) {
    const cplx term = coef * fam.weighted_moment(n, k);
    out.value += term;
    if (k < n) out.floor += std::abs(term);
    if (k > n + 4 && std::abs(term) < 1e-18 * std::abs(out.value)) return out;
    coef *= (a + double(k)) / ((b + k) * (k + 1.0)) * cplx(0.0, x);
  }
  throw NonConvergence("basis_h_series: series did not converge");
}

inline cplx basis_h_series(const SpectralParameter& s, int n, double x) {
  return basis_h_series_detail(s, n, x).value;
}

inline cplx basis_L_series(const SpectralParameter& s, int n, double x) {
  if (x == 0.0) throw DomainError("basis_L_series: x = 0 is excluded");
  return rho(s, x) * basis_h_series(s, n, x);
}

struct VanishingFit {
  double exponent = 0.0;
  double residual = 0.0;  // rms of the log-log fit
};

/// Slope of log|L_n(x)/rho(x)| against log x on `points` log-spaced x in fit_window.
inline VanishingFit vanishing_order_fit(const SpectralParameter& s, int n, Interval fit_window = {1e-3, 1e-1},
                                        int points = 40) {
  if (!(fit_window.lo > 0.0 && fit_window.hi <= 0.5 && fit_window.hi > fit_window.lo))
    throw DomainError("vanishing_order: fit window must lie in (0, 0.5]");
  if (points < 3) throw DomainError("vanishing_order: need at least 3 points");
  std::vector<double> lx(points), ly(points);
  for (int i = 0; i < points; ++i) {
    const double x = fit_window.lo * std::pow(fit_window.hi / fit_window.lo, double(i) / (points - 1));
    const SeriesValue v = basis_h_series_detail(s, n, x);
    const double h = std::abs(v.value);
    if (!(h > 0.0) || !std::isfinite(h) || !(v.floor < 1e-8 * h))
      throw FitError("vanishing_order: values underflow the moment precision");
    lx[i] = std::log(x);
    ly[i] = std::log(h);
  }
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < points; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= points;
  my /= points;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < points; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  VanishingFit fit;
  fit.exponent = sxy / sxx;
  double ss = 0.0;
  for (int i = 0; i < points; ++i) {
    const double e = ly[i] - (my + fit.exponent * (lx[i] - mx));
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / points);
  return fit;
}

inline double vanishing_order(const SpectralParameter& s, int n, Interval fit_window = {1e-3, 1e-1}) {
  return vanishing_order_fit(s, n, fit_window).exponent;
}

}  // namespace chk
