#pragma once

// Circular Jacobi ensemble: weight w_s on the unit circle, its monic and
// orthonormal polynomials, the Christoffel-Darboux kernel and its scaling limit.

#include <chk/errors.hpp>
#include <chk/kernel.hpp>
#include <chk/quadrature.hpp>
#include <chk/special_fn.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace chk {

namespace detail {
inline void require_degree(int n, const char* who) {
  if (n < 0) throw DegreeError(std::string(who) + ": degree must be >= 0");
}

inline void require_angle(const SpectralParameter& s, double theta, const char* who) {
  if (!std::isfinite(theta) || !(std::abs(theta) < std::numbers::pi))
    throw DomainError(std::string(who) + ": angle must lie in (-pi, pi)");
  if (theta == 0.0 && s.re() < 0.0) throw SingularityError(std::string(who) + ": theta = 0 with Re s < 0");
}

// |Gamma(1+s)|^2 / Gamma(1+2Re s) / (2 pi)
inline double weight_constant(const SpectralParameter& s) {
  const cplx g = gamma_ratio({1.0 + s.value(), 1.0 + std::conj(s.value())}, {cplx(1.0 + 2.0 * s.re())});
  return g.real() / kTwoPi;
}
}  // namespace detail

/// w_s(e^{i theta}) with the two conjugate factors combined in closed form:
/// |2 sin(theta/2)|^{2Re s} exp(Im s (theta - pi sign theta)).
inline double weight(const SpectralParameter& s, double theta) {
  detail::require_angle(s, theta, "weight");
  if (theta == 0.0) return s.re() > 0.0 ? 0.0 : detail::weight_constant(s);
  const double chord = std::abs(2.0 * std::sin(0.5 * theta));
  return detail::weight_constant(s) *
         std::exp(2.0 * s.re() * std::log(chord) + s.im() * (theta - std::numbers::pi * sign(theta)));
}

/// Same weight through exp(conj s Log(1 - e^{i theta}) + s Log(1 - e^{-i theta}))
/// with the principal Log; the imaginary part should vanish.
inline cplx weight_principal_log(const SpectralParameter& s, double theta) {
  detail::require_angle(s, theta, "weight_principal_log");
  if (theta == 0.0) throw SingularityError("weight_principal_log: Log(0)");
  const cplx e = std::polar(1.0, theta);
  const cplx l = std::conj(s.value()) * std::log(1.0 - e) + s.value() * std::log(1.0 - std::conj(e));
  return detail::weight_constant(s) * std::exp(l);
}

/// ||Phi_n||^2 = Gamma(2Re s+1+n) Gamma(n+1) Gamma(s+1) Gamma(conj s+1)
///             / (Gamma(conj s+n+1) Gamma(s+n+1) Gamma(2Re s+1)).
inline double phi_norm_sq(const SpectralParameter& s, int n) {
  detail::require_degree(n, "phi_norm_sq");
  const cplx sv = s.value(), sc = std::conj(sv);
  const double c = 1.0 + 2.0 * s.re();
  const cplx v = gamma_ratio({cplx(c + n), cplx(n + 1.0), sv + 1.0, sc + 1.0},
                             {sc + (n + 1.0), sv + (n + 1.0), cplx(c)});
  if (!(v.real() > 0.0) || std::abs(v.imag()) > 1e-10 * v.real())
    throw NonConvergence("phi_norm_sq: norm is not real positive");
  return v.real();
}

/**
 * Phi_n from its coefficients. With a_j = (s)_j/j! and b_j = (conj s + 1)_j/j!,
 * Phi_n(z) = sum_k a_{n-k} b_k / b_n z^k; all coefficients stay O(n^|s|), unlike
 * the alternating terms of the 2F1 in 1 - z.
 */
inline cplx monic_phi(const SpectralParameter& s, int n, cplx z) {
  detail::require_degree(n, "monic_phi");
  const cplx sv = s.value(), b1 = std::conj(sv) + 1.0;
  std::vector<cplx> a(n + 1), b(n + 1);
  a[0] = 1.0;
  for (int j = 0; j < n; ++j) a[j + 1] = a[j] * (sv + double(j)) / double(j + 1);
  // b_k / b_n accumulated from the top keeps the ratio O(1).
  b[n] = 1.0;
  for (int j = n; j > 0; --j) b[j - 1] = b[j] * double(j) / (b1 + double(j - 1));
  cplx acc = 0.0;
  for (int k = n; k >= 0; --k) acc = acc * z + a[n - k] * b[k];
  return acc;
}

/// The closed form Gamma-ratio * 2F1(-n, conj s + 1; 2Re s + 1; 1 - z), evaluated
/// literally. Loses digits to cancellation once n is in the tens.
inline cplx monic_phi_closed_form(const SpectralParameter& s, int n, cplx z) {
  detail::require_degree(n, "monic_phi_closed_form");
  const cplx sc = std::conj(s.value());
  const double c = 1.0 + 2.0 * s.re();
  const cplx pre = gamma_ratio({cplx(c + n), sc + 1.0}, {sc + (n + 1.0), cplx(c)});
  return pre * hyp2f1_terminating(n, sc + 1.0, cplx(c), 1.0 - z);
}

inline cplx orthonormal_phi(const SpectralParameter& s, int n, cplx z) {
  return monic_phi(s, n, z) / std::sqrt(phi_norm_sq(s, n));
}

/// phi*_n(z) = z^n conj(phi_n(1/conj z)).
inline cplx reversed_phi(const SpectralParameter& s, int n, cplx z) {
  if (z == cplx(0.0)) throw DomainError("reversed_phi: z = 0");
  return std::pow(z, n) * std::conj(orthonormal_phi(s, n, 1.0 / std::conj(z)));
}

/**
 * Orthonormal phi_0..phi_n at one point. Phi_{j+1} follows from the three-term
 * recurrence of the generating function (1-w)^{-s} (1-zw)^{-conj s-1}:
 *   (j+1+conj s) Phi_{j+1} = (j(1+z) + s + (conj s+1) z) Phi_j
 *                            - z j (j+s+conj s)/(j+conj s) Phi_{j-1},
 * and ||Phi_{j+1}||^2/||Phi_j||^2 = (2Re s+1+j)(j+1)/|conj s+j+1|^2.
 */
inline std::vector<cplx> phi_table(const SpectralParameter& s, int n, cplx z) {
  detail::require_degree(n, "phi_table");
  const cplx sv = s.value(), sc = std::conj(sv);
  const double c = 2.0 * s.re();
  std::vector<cplx> out(n + 1);
  cplx prev = 0.0, cur = 1.0;
  double norm_sq = 1.0;
  out[0] = 1.0;
  for (int j = 0; j < n; ++j) {
    const double jd = j;
    cplx next = (jd * (1.0 + z) + sv + (sc + 1.0) * z) * cur;
    if (j > 0) next -= z * jd * (jd + c) / (jd + sc) * prev;
    next /= (jd + 1.0 + sc);
    norm_sq *= (c + 1.0 + jd) * (jd + 1.0) / std::norm(sc + jd + 1.0);
    prev = cur;
    cur = next;
    out[j + 1] = next / std::sqrt(norm_sq);
  }
  return out;
}

enum class CdForm { sum, ratio };

/// K_n(e^{i tau}, e^{i theta}) = sqrt(w(theta) w(tau)) sum_{j<n} phi_j(e^{i tau}) conj phi_j(e^{i theta}),
/// or the reversed-polynomial ratio form of the same quantity.
inline cplx cd_kernel(const SpectralParameter& s, int n, double tau, double theta, CdForm form = CdForm::sum) {
  if (n < 1) throw DegreeError("cd_kernel: n must be >= 1");
  const double sw = std::sqrt(weight(s, theta) * weight(s, tau));
  const cplx zt = std::polar(1.0, tau), zh = std::polar(1.0, theta);
  if (form == CdForm::sum) {
    const auto pt = phi_table(s, n - 1, zt);
    const auto ph = phi_table(s, n - 1, zh);
    cplx acc = 0.0;
    for (int j = 0; j < n; ++j) acc += pt[j] * std::conj(ph[j]);
    return sw * acc;
  }
  if (tau == theta) throw SingularityError("cd_kernel: ratio form needs tau != theta");
  const auto pt = phi_table(s, n, zt);
  const auto ph = phi_table(s, n, zh);
  // On the circle phi*_n(z) = z^n conj phi_n(z).
  const cplx rt = std::pow(zt, n) * std::conj(pt[n]);
  const cplx rh = std::pow(zh, n) * std::conj(ph[n]);
  const cplx num = std::conj(rh) * rt - std::conj(ph[n]) * pt[n];
  return sw * num / (1.0 - std::polar(1.0, tau - theta));
}

/// (1/n) K_n(e^{ix/n}, e^{iy/n}).
inline cplx scaled_cd(const SpectralParameter& s, int n, double x, double y) {
  if (n < 1) throw DegreeError("scaled_cd: n must be >= 1");
  const double lim = std::numbers::pi * n;
  if (!(std::abs(x) < lim && std::abs(y) < lim)) throw DomainError("scaled_cd: need |x|,|y| < pi n");
  return cd_kernel(s, n, x / n, y / n) / double(n);
}

/// [nx]^{-i Im s} sqrt(w(e^{iy/n})) phi_{[nx]}(e^{iy/n}); tends to
/// e^{ixy} rho(xy) conj Z(xy) / sqrt(2 pi).
inline cplx discrete_transform_kernel(const SpectralParameter& s, int n, double x, double y) {
  if (n < 1) throw DegreeError("discrete_transform_kernel: n must be >= 1");
  if (!(x > 0.0)) throw DomainError("discrete_transform_kernel: x must be > 0");
  const int m = static_cast<int>(std::floor(n * x));
  if (m < 1) throw DomainError("discrete_transform_kernel: [nx] must be >= 1");
  const double th = y / n;
  const cplx gauge = std::exp(cplx(0.0, -s.im() * std::log(double(m))));
  return gauge * std::sqrt(weight(s, th)) * phi_table(s, m, std::polar(1.0, th))[m];
}

/// Pointwise limit of discrete_transform_kernel.
inline cplx discrete_transform_limit(const ChKernel& k, double x, double y) {
  const double u = x * y;
  const SpectralParameter& s = k.parameter();
  if (u == 0.0) return s.re() > 0.0 ? cplx(0.0) : kInvSqrtTwoPi * std::conj(k.z().at_zero());
  return std::polar(1.0, u) * rho(s, u) * std::conj(k.z()(u)) * kInvSqrtTwoPi;
}

/// Split Gauss-Jacobi rule on (-pi, pi) with |theta|^{2Re s} at 0.
inline QuadratureRule circle_rule(const SpectralParameter& s, int n_total) {
  return split_gauss_jacobi(n_total, 2.0 * s.re(), {-std::numbers::pi, std::numbers::pi}, 0.0);
}

/// G_jk = int phi_j conj phi_k w dtheta, j, k < N. The rule's plain weights are used,
/// so a Jacobi rule absorbs the |theta|^{2Re s} factor of w.
inline Eigen::MatrixXcd orthogonality_gram(const SpectralParameter& s, int N, const QuadratureRule& rule) {
  if (N < 1) throw DegreeError("orthogonality_gram: N must be >= 1");
  Eigen::MatrixXcd v(N, rule.size());
  for (std::size_t t = 0; t < rule.size(); ++t) {
    const double th = rule.nodes[t];
    const auto p = phi_table(s, N - 1, std::polar(1.0, th));
    const double sw = std::sqrt(rule.plain_weights[t] * weight(s, th));
    for (int j = 0; j < N; ++j) v(j, t) = sw * p[j];
  }
  return v * v.adjoint();
}

/// Sup of |scaled_cd - K^s| over grid x grid, with one phi table per grid point.
inline double scaled_cd_sup_error(const SpectralParameter& s, int n, std::span<const double> grid) {
  const ChKernel k(s);
  const std::size_t m = grid.size();
  std::vector<std::vector<cplx>> tab(m);
  std::vector<double> sw(m);
  std::vector<KernelPoint> pts(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double th = grid[i] / n;
    if (!(std::abs(th) < std::numbers::pi)) throw DomainError("scaled_cd_sup_error: grid outside (-pi n, pi n)");
    tab[i] = phi_table(s, n - 1, std::polar(1.0, th));
    sw[i] = std::sqrt(weight(s, th));
    pts[i] = k.point(grid[i]);
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      cplx acc = 0.0;
      for (int j = 0; j < n; ++j) acc += tab[a][j] * std::conj(tab[b][j]);
      const cplx approx = sw[a] * sw[b] * acc / double(n);
      worst = std::max(worst, std::abs(approx - k(pts[a], pts[b])));
    }
  return worst;
}

/// Sup over xs x ys of |discrete_transform_kernel - limit|; xs > 0.
inline double discrete_transform_sup_error(const SpectralParameter& s, int n, std::span<const double> xs,
                                           std::span<const double> ys) {
  const ChKernel k(s);
  int mmax = 0;
  for (double x : xs) {
    if (!(x > 0.0)) throw DomainError("discrete_transform_sup_error: xs must be > 0");
    mmax = std::max(mmax, static_cast<int>(std::floor(n * x)));
  }
  double worst = 0.0;
  for (double y : ys) {
    const double th = y / n;
    const auto p = phi_table(s, mmax, std::polar(1.0, th));
    const double sw = std::sqrt(weight(s, th));
    for (double x : xs) {
      const int m = static_cast<int>(std::floor(n * x));
      if (m < 1) throw DomainError("discrete_transform_sup_error: [nx] must be >= 1");
      const cplx v = std::exp(cplx(0.0, -s.im() * std::log(double(m)))) * sw * p[m];
      worst = std::max(worst, std::abs(v - discrete_transform_limit(k, x, y)));
    }
  }
  return worst;
}

}  // namespace chk
