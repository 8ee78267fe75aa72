#pragma once

// Complex gamma and hypergeometric functions.
//
// 1F1 is summed as a power series for |z| below the switch radius and by the
// two-family asymptotic expansion beyond it. The power series is run in double
// first; when the ratio of the largest term to the sum says that cancellation
// has eaten the digits, it is rerun in long double and then in __float128.

#include <chk/errors.hpp>
#include <chk/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace chk {

using cplx = std::complex<double>;

struct EvalConfig {
  double series_tol = 1e-14;
  int max_terms = 10'000;
  double asymptotic_switch_radius = 40.0;

  void validate() const {
    if (!(series_tol > 0.0)) throw DomainError("EvalConfig: series_tol must be > 0");
    if (max_terms < 1) throw DomainError("EvalConfig: max_terms must be >= 1");
    if (!(asymptotic_switch_radius > 0.0))
      throw DomainError("EvalConfig: asymptotic_switch_radius must be > 0");
  }
};

inline bool is_finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline bool is_nonpositive_integer(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

namespace detail {

inline constexpr double kLanczosG = 7.0;
inline constexpr double kLanczosCoef[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// sin(pi z), with the real part reduced mod 2 first.
inline cplx sin_pi(cplx z) {
  const double shift = 2.0 * std::round(0.5 * z.real());
  return std::sin(std::numbers::pi * cplx(z.real() - shift, z.imag()));
}

// log sin(pi z) that stays finite for large |Im z|; the branch is irrelevant to
// callers, which only exponentiate.
inline cplx log_sin_pi(cplx z) {
  const double shift = 2.0 * std::round(0.5 * z.real());
  const cplx w = std::numbers::pi * cplx(z.real() - shift, z.imag());
  const cplx i(0.0, 1.0);
  if (std::abs(w.imag()) < 20.0) return std::log(std::sin(w));
  if (w.imag() > 0.0) return -i * w + std::log(0.5 * i) + std::log(1.0 - std::exp(2.0 * i * w));
  return i * w + std::log(-0.5 * i) + std::log(1.0 - std::exp(-2.0 * i * w));
}

inline cplx lanczos_sum(cplx zm1) {
  cplx x = kLanczosCoef[0];
  for (int k = 1; k < 9; ++k) x += kLanczosCoef[k] / (zm1 + static_cast<double>(k));
  return x;
}

}  // namespace detail

/// log Gamma(z); the imaginary part is only defined modulo 2 pi.
inline cplx log_gamma(cplx z) {
  if (is_nonpositive_integer(z)) throw PoleError("log_gamma: pole at non-positive integer");
  if (z.real() < 0.5) {
    return std::log(std::numbers::pi) - detail::log_sin_pi(z) - log_gamma(1.0 - z);
  }
  const cplx zm1 = z - 1.0;
  const cplx t = zm1 + detail::kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (zm1 + 0.5) * std::log(t) - t +
         std::log(detail::lanczos_sum(zm1));
}

/// Lanczos approximation with reflection for Re z < 1/2.
inline cplx gamma_complex(cplx z) {
  if (is_nonpositive_integer(z)) throw PoleError("gamma_complex: pole at non-positive integer");
  if (z.real() < 0.5) {
    return std::numbers::pi / (detail::sin_pi(z) * gamma_complex(1.0 - z));
  }
  const cplx zm1 = z - 1.0;
  const cplx t = zm1 + detail::kLanczosG + 0.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::exp((zm1 + 0.5) * std::log(t) - t) *
         detail::lanczos_sum(zm1);
}

/// 1/Gamma(z), zero at the poles.
inline cplx rgamma(cplx z) {
  if (is_nonpositive_integer(z)) return 0.0;
  return std::exp(-log_gamma(z));
}

/// Rising factorial (a)_k = a (a+1) ... (a+k-1).
inline cplx pochhammer(cplx a, int k) {
  if (k < 0) throw DomainError("pochhammer: k must be >= 0");
  cplx p = 1.0;
  for (int j = 0; j < k; ++j) p *= a + static_cast<double>(j);
  return p;
}

/**
 * prod Gamma(num) / prod Gamma(den), summed in log space. Numerator/denominator
 * pairs that differ by a small integer are cancelled exactly into a rising
 * factorial first, which keeps the ratio accurate when both arguments are large.
 */
inline cplx gamma_ratio(std::span<const cplx> numerators, std::span<const cplx> denominators) {
  for (cplx z : numerators)
    if (is_nonpositive_integer(z)) throw PoleError("gamma_ratio: numerator at a pole");
  for (cplx z : denominators)
    if (is_nonpositive_integer(z)) throw PoleError("gamma_ratio: denominator at a pole");
  std::vector<bool> den_used(denominators.size(), false);
  cplx factor = 1.0;
  cplx acc = 0.0;
  for (cplx num : numerators) {
    bool paired = false;
    for (std::size_t j = 0; j < denominators.size() && !paired; ++j) {
      if (den_used[j]) continue;
      const cplx den = denominators[j];
      const cplx d = num - den;
      const double k = std::round(d.real());
      const double slack = 8.0 * std::numeric_limits<double>::epsilon() *
                           std::max({1.0, std::abs(num), std::abs(den)});
      if (std::abs(d.imag()) > slack || std::abs(d.real() - k) > slack || std::abs(k) > 64.0)
        continue;
      factor *= k >= 0 ? pochhammer(den, static_cast<int>(k))
                       : 1.0 / pochhammer(num, static_cast<int>(-k));
      den_used[j] = true;
      paired = true;
    }
    if (!paired) acc += log_gamma(num);
  }
  for (std::size_t j = 0; j < denominators.size(); ++j)
    if (!den_used[j]) acc -= log_gamma(denominators[j]);
  return factor * std::exp(acc);
}

inline cplx gamma_ratio(std::initializer_list<cplx> numerators,
                        std::initializer_list<cplx> denominators) {
  return gamma_ratio(std::span<const cplx>(numerators.begin(), numerators.size()),
                     std::span<const cplx>(denominators.begin(), denominators.size()));
}

/// 2F1(-n, b; c; z) as the exact (n+1)-term sum.
inline cplx hyp2f1_terminating(int n, cplx b, cplx c, cplx z) {
  if (n < 0) throw DomainError("hyp2f1_terminating: n must be >= 0");
  for (int j = 0; j < n; ++j) {
    if (c == cplx(-static_cast<double>(j), 0.0))
      throw PoleError("hyp2f1_terminating: c hits a pole of the terminating series");
  }
  cplx term = 1.0;
  cplx sum = 1.0;
  for (int k = 0; k < n; ++k) {
    const double kd = static_cast<double>(k);
    term *= (kd - n) * (b + kd) / ((c + kd) * (kd + 1.0)) * z;
    sum += term;
  }
  return sum;
}

namespace detail {

// Minimal complex arithmetic over a generic real type (used for __float128,
// which std::complex does not officially support).
template <class R>
struct Cx {
  R re{};
  R im{};

  Cx() = default;
  Cx(R r, R i) : re(r), im(i) {}
  explicit Cx(cplx z) : re(static_cast<R>(z.real())), im(static_cast<R>(z.imag())) {}

  friend Cx operator+(Cx a, Cx b) { return {a.re + b.re, a.im + b.im}; }
  friend Cx operator+(Cx a, R b) { return {a.re + b, a.im}; }
  friend Cx operator*(Cx a, Cx b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
  friend Cx operator*(Cx a, R b) { return {a.re * b, a.im * b}; }
  friend Cx operator/(Cx a, Cx b) {
    // Smith's algorithm.
    const R abr = b.re < 0 ? -b.re : b.re;
    const R abi = b.im < 0 ? -b.im : b.im;
    if (abr >= abi) {
      const R r = b.im / b.re;
      const R d = b.re + b.im * r;
      return {(a.re + a.im * r) / d, (a.im - a.re * r) / d};
    }
    const R r = b.re / b.im;
    const R d = b.re * r + b.im;
    return {(a.re * r + a.im) / d, (a.im * r - a.re) / d};
  }
  R l1() const { return (re < 0 ? -re : re) + (im < 0 ? -im : im); }
  cplx to_cplx() const { return {static_cast<double>(re), static_cast<double>(im)}; }
};

struct SeriesOutcome {
  cplx value;
  double cancellation = 1.0;  // max |term| / |sum|
};

template <class R>
SeriesOutcome hyp1f1_series_in(cplx a, cplx b, cplx z, double tol, int max_terms) {
  using C = Cx<R>;
  const C ca(a), cb(b), cz(z);
  C term(R(1), R(0));
  C sum(R(1), R(0));
  R max_term = R(1);
  const double zabs = std::abs(z);
  bool converged = false;
  for (int k = 0; k < max_terms; ++k) {
    const R kr = static_cast<R>(k);
    term = term * (ca + kr) / ((cb + kr) * (kr + R(1))) * cz;
    sum = sum + term;
    const R t = term.l1();
    if (t > max_term) max_term = t;
    if (t == R(0)) {
      converged = true;
      break;
    }
    if (k + 1 > zabs && static_cast<double>(t) <= tol * static_cast<double>(sum.l1())) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NonConvergence("hyp1f1: power series exhausted max_terms");
  const double s = static_cast<double>(sum.l1());
  return {sum.to_cplx(), s > 0.0 ? static_cast<double>(max_term) / s
                                 : std::numeric_limits<double>::infinity()};
}

inline constexpr double kQuadEps = 1.9259299443872359e-34;

}  // namespace detail

struct AsymptoticOutcome {
  cplx value;
  double rel_error = std::numeric_limits<double>::infinity();
};

/// Evaluator of 1F1(a; b; z) for fixed (a, b); caches the gamma prefactors.
class Hyp1F1 {
 public:
  Hyp1F1(cplx a, cplx b, EvalConfig cfg = {}) : a_(a), b_(b), cfg_(cfg) {
    cfg_.validate();
    if (!is_finite(a) || !is_finite(b)) throw DomainError("hyp1f1: non-finite parameter");
    if (is_nonpositive_integer(b)) throw PoleError("hyp1f1: b is a non-positive integer");
    terminating_ = is_nonpositive_integer(a);
    const cplx lgb = log_gamma(b);
    has_algebraic_ = !is_nonpositive_integer(b - a);
    has_exponential_ = !terminating_;
    if (has_algebraic_) log_pref_algebraic_ = lgb - log_gamma(b - a);
    if (has_exponential_) log_pref_exponential_ = lgb - log_gamma(a);
  }

  cplx a() const { return a_; }
  cplx b() const { return b_; }

  cplx operator()(cplx z) const {
    if (!is_finite(z)) throw DomainError("hyp1f1: non-finite argument");
    if (z == cplx(0.0, 0.0)) return 1.0;
    if (terminating_) return series(z);
    if (std::abs(z) >= cfg_.asymptotic_switch_radius) {
      const AsymptoticOutcome asym = asymptotic(z, -1);
      if (asym.rel_error <= 1e-12) return asym.value;
      // Parameters too large for the expansion at this radius.
      const detail::SeriesOutcome ser = series_outcome(z);
      const double ser_err = ser.cancellation * detail::kQuadEps;
      if (std::min(ser_err, asym.rel_error) > 1e-8)
        throw NonConvergence("hyp1f1: neither series nor asymptotic expansion is accurate here");
      return ser_err <= asym.rel_error ? ser.value : asym.value;
    }
    return series(z);
  }

  /// Power series with Kummer's transformation applied for Re z < 0.
  cplx series(cplx z) const { return series_outcome(z).value; }

  /**
   * Two-family asymptotic expansion. max_order < 0 sums each family up to its
   * smallest term; max_order = 0 keeps only the leading terms.
   */
  AsymptoticOutcome asymptotic(cplx z, int max_order) const {
    if (z == cplx(0.0, 0.0)) throw DomainError("hyp1f1 asymptotic: z = 0");
    const cplx i(0.0, 1.0);
    const double arg = std::arg(z);
    const double sigma = arg > -std::numbers::pi / 2 ? 1.0 : -1.0;
    const cplx logz = std::log(z);
    cplx value = 0.0;
    double err = 0.0;
    double scale = 0.0;
    if (has_algebraic_) {
      const cplx pref =
          std::exp(log_pref_algebraic_ + sigma * i * std::numbers::pi * a_ - a_ * logz);
      const auto [sum, tail] = asymptotic_sum(a_, 1.0 + a_ - b_, -z, max_order);
      value += pref * sum;
      err += std::abs(pref) * tail;
      scale += std::abs(pref * sum);
    }
    if (has_exponential_) {
      const cplx pref = std::exp(log_pref_exponential_ + z + (a_ - b_) * logz);
      const auto [sum, tail] = asymptotic_sum(b_ - a_, 1.0 - a_, z, max_order);
      value += pref * sum;
      err += std::abs(pref) * tail;
      scale += std::abs(pref * sum);
    }
    const double denom = std::max(std::abs(value), 1e-300);
    return {value, err / denom + 4.0 * std::numeric_limits<double>::epsilon() * scale / denom};
  }

 private:
  detail::SeriesOutcome series_outcome(cplx z) const {
    if (!terminating_ && z.real() < 0.0) {
      detail::SeriesOutcome s = escalated_series(b_ - a_, b_, -z);
      s.value *= std::exp(z);
      return s;
    }
    return escalated_series(a_, b_, z);
  }

  detail::SeriesOutcome escalated_series(cplx a, cplx b, cplx z) const {
    constexpr double accept = 1e-13;
    const double tol = cfg_.series_tol;
    auto s = detail::hyp1f1_series_in<double>(a, b, z, tol, cfg_.max_terms);
    if (s.cancellation * std::numeric_limits<double>::epsilon() <= accept) return s;
    s = detail::hyp1f1_series_in<long double>(a, b, z, tol, cfg_.max_terms);
    if (s.cancellation * std::numeric_limits<long double>::epsilon() <= accept) return s;
    return detail::hyp1f1_series_in<__float128>(a, b, z, tol, cfg_.max_terms);
  }

  // sum_k (p)_k (q)_k / k! w^{-k}; returns the truncated sum and the size of the
  // first omitted term.
  std::pair<cplx, double> asymptotic_sum(cplx p, cplx q, cplx w, int max_order) const {
    cplx term = 1.0;
    cplx sum = 1.0;
    double prev = 1.0;
    const double eps = std::numeric_limits<double>::epsilon();
    const int limit = max_order < 0 ? cfg_.max_terms : max_order;
    for (int k = 0; k < limit; ++k) {
      const double kd = static_cast<double>(k);
      const cplx next = term * (p + kd) * (q + kd) / ((kd + 1.0) * w);
      const double mag = std::abs(next);
      if (mag == 0.0) return {sum, 0.0};
      if (max_order < 0 && mag > prev) return {sum, prev};
      term = next;
      sum += term;
      prev = mag;
      if (max_order < 0 && mag <= 0.1 * eps * std::abs(sum)) return {sum, mag};
    }
    const double kd = static_cast<double>(limit);
    return {sum, std::abs(term * (p + kd) * (q + kd) / ((kd + 1.0) * w))};
  }

  cplx a_, b_;
  EvalConfig cfg_;
  bool terminating_ = false;
  bool has_algebraic_ = true;
  bool has_exponential_ = true;
  cplx log_pref_algebraic_ = 0.0;
  cplx log_pref_exponential_ = 0.0;
};

inline cplx hyp1f1(cplx a, cplx b, cplx z, const EvalConfig& cfg = {}) {
  return Hyp1F1(a, b, cfg)(z);
}

/**
 * Independent check of hyp1f1 through the Euler integral
 *   Gamma(b)/(Gamma(a)Gamma(b-a)) int_0^1 t^{a-1}(1-t)^{b-a-1} e^{tz} dt.
 * The rule must be Gauss-Jacobi on [0,1] with exponents Re a - 1 at 0 and
 * Re(b-a) - 1 at 1; the imaginary parts of the exponents stay in the integrand.
 */
inline cplx hyp1f1_integral_oracle(cplx a, cplx b, cplx z, const QuadratureRule& rule) {
  if (!(a.real() > 0.0) || !((b - a).real() > 0.0))
    throw DomainError("hyp1f1_integral_oracle: needs Re a > 0 and Re(b-a) > 0");
  constexpr double kExpTol = 1e-12;
  if (rule.domain.lo != 0.0 || rule.domain.hi != 1.0 ||
      std::abs(rule.left_exponent - (a.real() - 1.0)) > kExpTol ||
      std::abs(rule.right_exponent - ((b - a).real() - 1.0)) > kExpTol)
    throw DomainError("hyp1f1_integral_oracle: rule exponents do not match (a, b)");
  const double ia = a.imag();
  const double iba = (b - a).imag();
  const cplx integral = rule.integrate_weighted([&](double t) -> cplx {
    cplx v = std::exp(t * z);
    if (ia != 0.0) v *= std::exp(cplx(0.0, ia * std::log(t)));
    if (iba != 0.0) v *= std::exp(cplx(0.0, iba * std::log1p(-t)));
    return v;
  });
  return gamma_ratio({b}, {a, b - a}) * integral;
}

inline cplx hyp1f1_integral_oracle(cplx a, cplx b, cplx z, int n_nodes = 96) {
  if (!(a.real() > 0.0) || !((b - a).real() > 0.0))
    throw DomainError("hyp1f1_integral_oracle: needs Re a > 0 and Re(b-a) > 0");
  return hyp1f1_integral_oracle(
      a, b, z, gauss_jacobi(n_nodes, a.real() - 1.0, (b - a).real() - 1.0, {0.0, 1.0}));
}

}  // namespace chk
