#pragma once

// Extended-precision reference evaluations used only by the tests.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <complex>

namespace chk::oracle {

using mp_real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<260>>;

struct MpCx {
  mp_real re, im;
};

inline MpCx mul(const MpCx& a, const MpCx& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

inline MpCx div(const MpCx& a, const MpCx& b) {
  const mp_real d = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}

// Plain power series of 1F1 at 260 decimal digits; fine for |z| up to ~500.
inline std::complex<double> hyp1f1_series_mp(std::complex<double> a, std::complex<double> b,
                                            std::complex<double> z) {
  const MpCx ma{a.real(), a.imag()}, mb{b.real(), b.imag()}, mz{z.real(), z.imag()};
  MpCx term{1, 0}, sum{1, 0};
  const mp_real tiny("1e-40");
  for (int k = 0; k < 20000; ++k) {
    const MpCx num = mul(MpCx{ma.re + k, ma.im}, mz);
    const MpCx den{(mb.re + k) * (k + 1), mb.im * (k + 1)};
    term = mul(term, div(num, den));
    sum.re += term.re;
    sum.im += term.im;
    const mp_real t = abs(term.re) + abs(term.im);
    const mp_real s = abs(sum.re) + abs(sum.im);
    if (k > 2 * std::abs(z) + 10 && t < tiny * s) break;
  }
  return {static_cast<double>(sum.re), static_cast<double>(sum.im)};
}

}  // namespace chk::oracle
