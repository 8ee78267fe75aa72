#pragma once

// The confluent hypergeometric kernel and the functions it is built from:
//   rho(x)  = |x|^{Re s} exp(-pi/2 Im s sign x)
//   psi(x)  = exp(-i pi/2 Re s sign x) |x|^{-i Im s}
//   Z_s(x)  = Gamma(1+s)/Gamma(1+2Re s) 1F1(conj s; 1+2Re s; ix)
//   K(x,y)  = rho(x)rho(y) [Z(x) conj Z(y) - e^{i(x-y)} conj Z(x) Z(y)] / (2 pi i (y-x))
//   T_s(x)  = e^{-ix}/sqrt(2pi) rho(x) conj psi(x) Z_s(x)

#include <chk/errors.hpp>
#include <chk/special_fn.hpp>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

namespace chk {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline const double kInvSqrtTwoPi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

class SpectralParameter {
 public:
  SpectralParameter() = default;
  SpectralParameter(cplx s) : s_(s) {  // NOLINT(google-explicit-constructor)
    if (!is_finite(s)) throw DomainError("spectral parameter must be finite");
    if (!(s.real() > -0.5)) throw DomainError("spectral parameter needs Re s > -1/2");
  }
  SpectralParameter(double re) : SpectralParameter(cplx(re, 0.0)) {}  // NOLINT
  SpectralParameter(double re, double im) : SpectralParameter(cplx(re, im)) {}

  cplx value() const { return s_; }
  double re() const { return s_.real(); }
  double im() const { return s_.imag(); }
  SpectralParameter conj() const { return SpectralParameter(std::conj(s_)); }
  bool is_zero() const { return s_ == cplx(0.0, 0.0); }

 private:
  cplx s_ = 0.0;
};

inline double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

inline double rho(const SpectralParameter& s, double x) {
  if (x == 0.0) {
    if (s.re() < 0.0) throw SingularityError("rho: x = 0 with Re s < 0");
    return s.re() > 0.0 ? 0.0 : 1.0;
  }
  return std::exp(s.re() * std::log(std::abs(x)) - 0.5 * std::numbers::pi * s.im() * sign(x));
}

inline cplx psi(const SpectralParameter& s, double x) {
  if (x == 0.0) throw SingularityError("psi: x = 0");
  return std::exp(cplx(0.0, -0.5 * std::numbers::pi * s.re() * sign(x) -
                                s.im() * std::log(std::abs(x))));
}

/**
 * Z_s and its first two derivatives in x.
 *
 * On the band kTaylorLo <= |x| < switch radius the power series needs extended
 * precision, so there 1F1(conj s; b; ix) is instead re-expanded in a Taylor
 * series about the nearest integer anchor, with coefficients generated by
 * Kummer's differential equation. Anchor values are computed lazily, once.
 */
class ZFunction {
 public:
  static constexpr double kTaylorLo = 8.0;

  explicit ZFunction(const SpectralParameter& s, const EvalConfig& cfg = {})
      : s_(s),
        a_(std::conj(s.value())),
        b_(1.0 + 2.0 * s.re()),
        radius_(cfg.asymptotic_switch_radius),
        f0_(a_, b_, cfg),
        f1_(a_ + 1.0, b_ + 1.0, cfg),
        f2_(a_ + 2.0, b_ + 2.0, cfg) {
    gamma_factor_ = gamma_ratio({1.0 + s.value()}, {cplx(b_)});
    const int kmax = static_cast<int>(std::ceil(radius_));
    anchors_ = std::make_shared<AnchorTable>(kmax);
  }

  const SpectralParameter& parameter() const { return s_; }
  cplx at_zero() const { return gamma_factor_; }

  cplx operator()(double x) const {
    if (s_.is_zero()) return 1.0;
    return gamma_factor_ * hyp(x, 0);
  }

  // dz/dx = i for z = ix.
  cplx derivative(double x) const {
    if (s_.is_zero()) return 0.0;
    return gamma_factor_ * cplx(0.0, 1.0) * hyp(x, 1);
  }

  cplx second_derivative(double x) const {
    if (s_.is_zero()) return 0.0;
    return -gamma_factor_ * hyp(x, 2);
  }

 private:
  struct Anchor {
    std::once_flag once;
    cplx w, dw;
  };
  struct AnchorTable {
    explicit AnchorTable(int kmax) : kmax(kmax), slots(new Anchor[2 * kmax + 1]) {}
    int kmax;
    std::unique_ptr<Anchor[]> slots;
  };

  // d^order/dz^order 1F1(a; b; z) at z = ix, via d/dz 1F1(a;b;z) = (a/b) 1F1(a+1;b+1;z).
  cplx direct(double x, int order) const {
    const cplx z(0.0, x);
    if (order == 0) return f0_(z);
    if (order == 1) return a_ / b_ * f1_(z);
    return a_ * (a_ + 1.0) / (b_ * (b_ + 1.0)) * f2_(z);
  }

  cplx hyp(double x, int order) const {
    const double ax = std::abs(x);
    if (ax < kTaylorLo || ax >= radius_) return direct(x, order);
    const int k = static_cast<int>(std::lround(x));
    Anchor& an = anchors_->slots[k + anchors_->kmax];
    std::call_once(an.once, [&] {
      an.w = direct(k, 0);
      an.dw = direct(k, 1);
    });
    const cplx z0(0.0, static_cast<double>(k));
    const cplx t(0.0, x - k);
    cplx c_prev = an.w, c = an.dw;  // c_0, c_1
    cplx s0 = c_prev + c * t;
    cplx s1 = c;
    cplx s2 = 0.0;
    cplx tj = 1.0;  // t^j
    for (int j = 0; j < 80; ++j) {
      const double jd = j;
      // c_{j+2} from Kummer's equation z w'' + (b - z) w' - a w = 0 about z0.
      const cplx c_next =
          ((jd + a_) * c_prev - (jd + 1.0) * (jd + b_ - z0) * c) / (z0 * (jd + 1.0) * (jd + 2.0));
      const cplx d2 = (jd + 2.0) * (jd + 1.0) * c_next * tj;
      const cplx d1 = (jd + 2.0) * c_next * tj * t;
      const cplx d0 = c_next * tj * t * t;
      tj *= t;
      s0 += d0;
      s1 += d1;
      s2 += d2;
      c_prev = c;
      c = c_next;
      const double tiny = 1e-17 * (std::abs(s0) + std::abs(s1) + std::abs(s2));
      if (j > 3 && std::abs(d2) <= tiny && std::abs(d1) <= tiny) break;
    }
    if (order == 0) return s0;
    if (order == 1) return s1;
    return s2;
  }

  SpectralParameter s_;
  cplx a_;
  double b_;
  double radius_;
  Hyp1F1 f0_, f1_, f2_;
  cplx gamma_factor_;
  std::shared_ptr<AnchorTable> anchors_;
};

inline cplx z_fun(const SpectralParameter& s, double x) { return ZFunction(s)(x); }

/// rho, psi and Z sampled once at a point; kernel entries between cached points
/// are then cheap.
struct KernelPoint {
  double x = 0.0;
  double rho = 0.0;
  cplx z = 0.0;
};

/// Evaluator of K^s and T_s for one parameter.
class ChKernel {
 public:
  explicit ChKernel(const SpectralParameter& s, const EvalConfig& cfg = {}) : s_(s), z_(s, cfg) {}

  const SpectralParameter& parameter() const { return s_; }
  const ZFunction& z() const { return z_; }

  KernelPoint point(double x) const {
    check_point(x);
    return {x, rho(s_, x), z_(x)};
  }

  static double near_diagonal_threshold(double x) { return 1e-6 * (1.0 + std::abs(x)); }

  cplx operator()(double x, double y) const {
    check_point(x);
    check_point(y);
    if (std::abs(x - y) < near_diagonal_threshold(x)) return near_diagonal(x, y);
    return off_diagonal(point(x), point(y));
  }

  /// Kernel between cached points; falls back to the near-diagonal expansion.
  cplx operator()(const KernelPoint& p, const KernelPoint& q) const {
    if (std::abs(p.x - q.x) < near_diagonal_threshold(p.x)) return near_diagonal(p.x, q.x);
    return off_diagonal(p, q);
  }

  double diagonal(double x) const {
    check_point(x);
    const double r = rho(s_, x);
    if (r == 0.0) return 0.0;
    const cplx zv = z_(x);
    const cplx zp = z_.derivative(x);
    return r * r / kTwoPi * (std::norm(zv) + 2.0 * std::imag(zv * std::conj(zp)));
  }

  cplx tcal(double x) const {
    if (x == 0.0) {
      if (s_.re() > 0.0) return 0.0;
      throw SingularityError("tcal: x = 0 needs Re s > 0");
    }
    return std::exp(cplx(0.0, -x)) * kInvSqrtTwoPi * rho(s_, x) * std::conj(psi(s_, x)) * z_(x);
  }

  /// T_s at a cached point (x != 0).
  cplx tcal(const KernelPoint& p) const {
    if (p.x == 0.0) return tcal(0.0);
    return std::exp(cplx(0.0, -p.x)) * kInvSqrtTwoPi * p.rho * std::conj(psi(s_, p.x)) * p.z;
  }

 private:
  void check_point(double x) const {
    if (x == 0.0 && s_.re() < 0.0) throw SingularityError("kernel: x = 0 with Re s < 0");
    if (!std::isfinite(x)) throw DomainError("kernel: non-finite argument");
  }

  cplx off_diagonal(const KernelPoint& p, const KernelPoint& q) const {
    const cplx num = p.z * std::conj(q.z) -
                     std::exp(cplx(0.0, p.x - q.x)) * std::conj(p.z) * q.z;
    return p.rho * q.rho * num / (cplx(0.0, kTwoPi) * (q.x - p.x));
  }

  // Second-order Taylor expansion in h = y - x of the numerator about y = x.
  cplx near_diagonal(double x, double y) const {
    const double rr = rho(s_, x) * rho(s_, y);
    if (rr == 0.0) return 0.0;
    const cplx zv = z_(x);
    const double h = y - x;
    if (s_.is_zero()) {
      // N' = i, N'' = 1 exactly.
      return rr / cplx(0.0, kTwoPi) * (cplx(0.0, 1.0) + 0.5 * h);
    }
    const cplx zp = z_.derivative(x);
    const cplx zpp = z_.second_derivative(x);
    const cplx i(0.0, 1.0);
    const double n2 = std::norm(zv);
    const cplx dn = i * n2 + 2.0 * i * std::imag(zv * std::conj(zp));
    const cplx ddn = n2 + 2.0 * i * std::conj(zv) * zp + 2.0 * i * std::imag(zv * std::conj(zpp));
    return rr / cplx(0.0, kTwoPi) * (dn + 0.5 * h * ddn);
  }

  SpectralParameter s_;
  ZFunction z_;
};

inline cplx kernel(const SpectralParameter& s, double x, double y) { return ChKernel(s)(x, y); }

inline cplx tcal(const SpectralParameter& s, double x) { return ChKernel(s).tcal(x); }

/// max over the grid of |Z rho psi - 1| (1 + |x|^{1+Re s}) / |x|^{Re s}.
inline double z_deviation_bound_check(const SpectralParameter& s, std::span<const double> x_grid) {
  const ZFunction z(s);
  double worst = 0.0;
  for (double x : x_grid) {
    if (x == 0.0) throw DomainError("z_deviation_bound_check: grid must exclude 0");
    const double ax = std::abs(x);
    const double dev = std::abs(z(x) * rho(s, x) * psi(s, x) - 1.0);
    worst = std::max(worst, dev * (1.0 + std::pow(ax, 1.0 + s.re())) / std::pow(ax, s.re()));
  }
  return worst;
}

}  // namespace chk
