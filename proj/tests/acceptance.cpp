// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chk/dpp.hpp>
#include <chk/hierarchy.hpp>
#include <chk/kernel.hpp>
#include <chk/opuc.hpp>
#include <chk/special_fn.hpp>
#include <chk/transform.hpp>
#include <chk/verify.hpp>
#include <chk/wiener_hopf.hpp>

#include "oracle/mp_oracle.hpp"
#include "test_util.hpp"

#include <chrono>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace chk;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  return test::loglog_slope(x.data(), y.data(), static_cast<int>(x.size()));
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

const std::vector<SpectralParameter> kDeformed{SpectralParameter(0.5), SpectralParameter(0.3, 0.7)};

Outcome c1_cd_identity() {
  const std::vector<double> pts{-19.3, -4.1, -0.1, 0.6, 13.8};
  double worst = 0.0;
  for (const SpectralParameter s : {SpectralParameter(0.0), SpectralParameter(0.5), SpectralParameter(-0.3),
                                    SpectralParameter(0.3, 0.7)}) {
    const QuadratureRule rule = gauss_jacobi(256, 2.0 * s.re(), 0.0, {0.0, 1.0});
    const ChKernel k(s);
    for (double x : pts)
      for (double y : pts) worst = std::max(worst, verify_cd_identity(k, x, y, rule));
  }
  return {worst <= 1e-8, fmt("worst residual %.3e over 4 parameters x 25 pairs (bound 1e-8)", worst)};
}

Outcome c2_zero_reductions() {
  const ChKernel k(0.0);
  double tc = 0.0, dg = 0.0;
  for (double x : linspace(-50.0, 50.0, 401)) {
    if (x == 0.0) continue;
    tc = std::max(tc, std::abs(k.tcal(x) - std::polar(1.0, -x) * kInvSqrtTwoPi));
    dg = std::max(dg, std::abs(k.diagonal(x) - 1.0 / (2.0 * kPi)));
  }
  const SupportedFunction g{[](double x) { return cplx(std::exp(-0.5 * x * x)); }, {-7.0, 7.0}};
  const auto pw = pw_projector_residual(0.0, g, WindowGrid(50.0, 512), 50.0);
  const bool ok = tc <= 1e-14 && dg <= 1e-12 && pw.residual <= 1e-15 * pw.reference_norm;
  return {ok, fmt("tcal %.2e (1e-14), diagonal %.2e (1e-12), pw residual %.2e", tc, dg, pw.residual)};
}

Outcome c3_opuc() {
  double gram = 0.0, cd = 0.0;
  for (const auto& s : kDeformed) {
    gram = std::max(gram, identity_deviation(orthogonality_gram(s, 30, circle_rule(s, 512))));
    for (auto [tau, theta] : {std::pair{0.3, -1.2}, std::pair{2.5, 0.01}, std::pair{-3.0, 1.7}, std::pair{1.0, 1.1}}) {
      const cplx a = cd_kernel(s, 200, tau, theta, CdForm::sum), b = cd_kernel(s, 200, tau, theta, CdForm::ratio);
      cd = std::max(cd, std::abs(a - b) / (1.0 + std::abs(a)));
    }
  }
  return {gram <= 1e-10 && cd <= 1e-9, fmt("Gram deviation %.2e (1e-10), sum-vs-ratio %.2e (1e-9)", gram, cd)};
}

Outcome c4_bnr() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto grid = linspace(-5.0, 5.0, 21);
  const std::vector<double> ns{64, 256, 1024};
  std::vector<double> err;
  for (double n : ns) err.push_back(scaled_cd_sup_error(0.5, static_cast<int>(n), grid));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double sl = slope(ns, err);
  const bool ok = strictly_decreasing(err) && sl >= -1.4 && sl <= -0.6 && err.back() <= 1e-2 && secs < 60.0;
  return {ok, fmt("errors %.3e %.3e %.3e, slope %.3f, %.1fs", err[0], err[1], err[2], sl, secs)};
}

Outcome c5_roundtrip() {
  const auto g = [](double t) { return cplx(t >= 0.25 && t <= 0.75 ? 1.0 : 0.0); };
  const std::vector<double> rs{50, 100, 200, 400};
  std::vector<double> err;
  for (double R : rs) err.push_back(roundtrip_error(0.5, g, {0.0, 0.25, 0.75, 1.0}, R).relative_error);
  const double sl = slope(rs, err);
  const bool ok = strictly_decreasing(err) && std::abs(sl + 0.5) <= 0.2;
  return {ok, fmt("s=0.5 errors %.3e %.3e %.3e %.3e, slope %.3f (-0.5 +- 0.2)", err[0], err[1], err[2], err[3], sl)};
}

Outcome c6_paley_wiener() {
  const SupportedFunction g{[](double x) { return cplx(std::exp(-0.5 * x * x)); }, {-7.0, 7.0}};
  const auto coarse = pw_projector_residual(0.5, g, WindowGrid(100.0, 1024), 100.0);
  const auto fine = pw_projector_residual(0.5, g, WindowGrid(200.0, 2048), 200.0);
  const WindowGrid hw(400.0, 4096);
  const double hardy = hardy_membership(hardy_probe(0.5, hw), hw);
  const bool ok = fine.residual <= 5e-2 && fine.residual < coarse.residual && hardy <= 1e-2;
  return {ok, fmt("pw residual %.3e at 200 (5e-2; %.3e at 100), Hardy negative fraction %.2e (1e-2)", fine.residual,
                  coarse.residual, hardy)};
}

Outcome c7_unit_norm() {
  const WindowGrid w = WindowGrid::with_spacing(400.0, 0.2);
  std::vector<double> dev;
  for (int n = 1; n <= 8; ++n) dev.push_back(std::abs(unit_interval_norm(0.5, n, w) - 1.0));
  const bool ok = strictly_decreasing(dev) && dev.back() <= 0.1;
  return {ok, fmt("|N_n - 1|: n=1 %.4e ... n=8 %.4e, monotone %s", dev.front(), dev.back(),
                  strictly_decreasing(dev) ? "yes" : "no")};
}

Outcome c8_hierarchy() {
  const std::vector<double> xs{-9.0, -4.3, -1.1, 0.2, 0.7, 2.5, 6.0, 15.0};
  double route = 0.0, raw = 0.0, extr = 0.0, fit = 0.0, ann = 0.0;
  const WindowGrid w = WindowGrid::with_spacing(400.0, 0.2);
  for (const auto& s : kDeformed) {
    for (int n = 0; n <= 3; ++n) route = std::max(route, route_ratio_deviation(s, n, xs));
    raw = std::max(raw, gram_offdiag_ratio(gram_of_basis(s, 4, w)));
    extr = std::max(extr, gram_offdiag_ratio(gram_of_basis_extrapolated(s, 4, w)));
    for (int n = 0; n <= 4; ++n) fit = std::max(fit, std::abs(vanishing_order(s, n) - n));
    for (int n = 1; n <= 12; ++n)
      for (int k = 1; k <= n; ++k) ann = std::max(ann, moment_annihilation(s, n, k));
  }
  const double cex = minus_t_argument_counterexample();
  // The raw window misses p_m(1) p_n(1)/(pi R) from the jump of t^s p_n at t = 1; the
  // R -> 2R extrapolation estimates the full-line Gram, which is what the bound is about.
  const bool ok = route <= 1e-6 && extr <= 1e-3 && fit <= 0.05 && ann <= 1e-10 && std::abs(cex - 2.0) <= 1e-12;
  return {ok, fmt("route %.2e (1e-6), Gram offdiag/diag extrapolated %.2e (1e-3; raw window %.2e), "
                  "order fit %.2e (0.05), annihilation %.2e (1e-10), -t argument value %.17g",
                  route, extr, raw, fit, ann, cex)};
}

Outcome c9_trace() {
  const auto f = SymbolFunction::gaussian();
  const cplx wh = commutator_trace(f, HalfLineGrid::midpoint(30.0, 600), Maker::wh());
  const HalfLineGrid big = HalfLineGrid::gauss(60.0, 120);
  const cplx g0 = commutator_trace(f, big, Maker::g_for(0.0, 60.0));
  const cplx g5 = commutator_trace(f, big, Maker::g_for(0.5, 60.0));
  const auto hs = hilbert_schmidt_identity(f, HalfLineGrid::gauss(30.0, 60));
  const double e0 = std::abs(g0 - wh), e5 = std::abs(g5 - wh), eh = std::abs(hs.discrete - hs.exact);
  const bool ok = std::abs(wh - 0.25) <= 1e-3 && e0 <= 5e-3 && e5 <= 5e-3 && eh <= 1e-4;
  return {ok, fmt("wh trace %.6f (0.25 +- 1e-3), g-maker gap s=0 %.2e s=0.5 %.2e (5e-3), HS %.2e (1e-4)", wh.real(), e0,
                  e5, eh)};
}

Outcome c10_dpp() {
  const auto d = nystrom_eig(0.0, -10.0, 10.0, 400);
  const auto draws = sample_many(d, 20251016, 2000);
  const auto st = count_statistics(draws, {-10.0, 10.0});
  const double se = std::sqrt(st.variance / 2000.0);
  const double target = 20.0 / (2.0 * kPi);
  const auto h = empirical_intensity(draws, 20);
  int used = 0, bad = 0;
  for (std::size_t b = 0; b < h.density.size(); ++b) {
    const double width = h.edges[b + 1] - h.edges[b];
    if (2000.0 * width / (2.0 * kPi) < 50.0) continue;
    ++used;
    if (std::abs(h.density[b] - 1.0 / (2.0 * kPi)) > 3.0 * h.stderr_[b]) ++bad;
  }
  std::string a, b;
  for (int i = 0; i < 50; ++i) {
    a += to_jsonl(sample(d, 77 + i)) + "\n";
    b += to_jsonl(sample(d, 77 + i)) + "\n";
  }
  const bool ok = std::abs(st.mean - target) < 3.0 * se && used > 0 && bad == 0 && a == b;
  return {ok, fmt("mean count %.4f vs %.4f (3 se = %.4f), bins outside 3 sigma %d of %d, replay identical %s", st.mean,
                  target, 3.0 * se, bad, used, a == b ? "yes" : "no")};
}

Outcome c11_special() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double kummer = 0.0;
  for (int i = 0; i < 200; ++i) {
    const cplx a(3.0 * u(rng), 3.0 * u(rng));
    const cplx b(2.2 + 1.8 * u(rng), 3.0 * u(rng));
    const cplx z = std::polar(10.0 + 10.0 * u(rng), 3.14159 * u(rng));
    const cplx f = hyp1f1(a, b, z);
    kummer = std::max(kummer, std::abs(f - std::exp(z) * hyp1f1(b - a, b, -z)) / (1.0 + std::abs(f)));
  }
  double oracle = 0.0;
  const cplx zs[] = {{1.0, 0.0}, {-4.0, 2.0}, {0.0, 15.0}, {3.0, -7.0}, {0.0, -33.0}, {-18.0, 0.0}};
  for (auto [a, b] : {std::pair{0.7, 1.7}, std::pair{0.3, 1.6}, std::pair{1.5, 2.2}, std::pair{0.5, 3.0}})
    for (cplx z : zs) oracle = std::max(oracle, test::rel_err(hyp1f1(a, b, z), hyp1f1_integral_oracle(a, b, z, 128)));
  const Hyp1F1 h(cplx(0.3, -0.7), 1.6);
  const std::vector<double> rs{50, 100, 200, 400};
  std::vector<double> gaps;
  for (double r : rs) {
    const cplx z(0.0, r);
    gaps.push_back(test::rel_err(h.asymptotic(z, 0).value, oracle::hyp1f1_series_mp(h.a(), h.b(), z)));
  }
  const double sl = slope(rs, gaps);
  const bool ok = kummer <= 1e-11 && oracle <= 1e-9 && strictly_decreasing(gaps) && std::abs(sl + 1.0) <= 0.1;
  return {ok, fmt("Kummer %.2e (1e-11), series vs integral %.2e (1e-9), asymptotic gap slope %.3f (-1 +- 0.1)", kummer,
                  oracle, sl)};
}

}  // namespace

int main() {
  using Fn = Outcome (*)();
  const std::pair<const char*, Fn> criteria[] = {
      {"cd-identity", c1_cd_identity}, {"zero-parameter", c2_zero_reductions}, {"opuc", c3_opuc},
      {"bnr-limit", c4_bnr},           {"roundtrip", c5_roundtrip},            {"paley-wiener", c6_paley_wiener},
      {"unit-norm", c7_unit_norm},     {"hierarchy", c8_hierarchy},            {"trace", c9_trace},
      {"dpp", c10_dpp},                {"special-functions", c11_special}};
  int failures = 0, idx = 0;
  for (const auto& [name, fn] : criteria) {
    ++idx;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %-18s %s  %s [%.1fs]\n", idx, name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d of %d criteria passed\n", idx - failures, idx);
  return failures == 0 ? 0 : 1;
}
