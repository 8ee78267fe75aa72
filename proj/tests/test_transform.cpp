#include <chk/transform.hpp>

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using chk::cplx;
using chk::SpectralParameter;
using chk::WindowGrid;

namespace {

chk::SupportedFunction gaussian() {
  return {[](double x) { return cplx(std::exp(-0.5 * x * x)); }, {-7.0, 7.0}};
}

std::vector<cplx> sample(const WindowGrid& w, const std::function<cplx(double)>& f) {
  std::vector<cplx> v(w.n_points);
  for (int i = 0; i < w.n_points; ++i) v[i] = f(w.nodes[i]);
  return v;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(WindowGrid, SymmetricAndAvoidsOrigin) {
  const WindowGrid w(3.0, 10);
  EXPECT_DOUBLE_EQ(w.spacing, 0.6);
  for (int i = 0; i < w.n_points; ++i) {
    EXPECT_NE(w.nodes[i], 0.0);
    EXPECT_NEAR(w.nodes[i], -w.nodes[w.n_points - 1 - i], 1e-15);
  }
  EXPECT_THROW(WindowGrid(3.0, 7), chk::DomainError);
  EXPECT_THROW(WindowGrid(-1.0, 8), chk::DomainError);
}

TEST(Forward, IndicatorAtZeroParameter) {
  const WindowGrid w(2.0, 4000);
  const auto f = sample(w, [](double x) { return cplx(std::abs(x) <= 1.0 ? 1.0 : 0.0); });
  const std::vector<double> om = {0.5, 1.3, 4.0, -2.2};
  const auto got = chk::forward(0.0, f, w, om);
  for (std::size_t i = 0; i < om.size(); ++i) {
    const double want = std::sqrt(2.0 / M_PI) * std::sin(om[i]) / om[i];
    EXPECT_LT(std::abs(got[i] - want), 1e-5) << om[i];
  }
  EXPECT_THROW(chk::forward(0.0, f, w, std::vector<double>{0.0}), chk::SingularityError);
}

TEST(Forward, ZeroAndLinearity) {
  const WindowGrid w(5.0, 200);
  const SpectralParameter s(0.3, 0.7);
  const std::vector<double> om = {-3.0, 0.7, 2.5};
  const auto z = chk::forward(s, std::vector<cplx>(200, 0.0), w, om);
  for (auto v : z) EXPECT_EQ(v, cplx(0.0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  std::vector<cplx> f(200), g(200), h(200);
  const cplx al(0.3, -1.2), be(2.0, 0.5);
  for (int i = 0; i < 200; ++i) {
    f[i] = {n(rng), n(rng)};
    g[i] = {n(rng), n(rng)};
    h[i] = al * f[i] + be * g[i];
  }
  const auto tf = chk::forward(s, f, w, om), tg = chk::forward(s, g, w, om),
             th = chk::forward(s, h, w, om);
  for (std::size_t i = 0; i < om.size(); ++i)
    EXPECT_LT(std::abs(th[i] - al * tf[i] - be * tg[i]), 1e-12 * (1.0 + std::abs(th[i])));
}

TEST(Adjoint, IndicatorAtZeroParameter) {
  const auto rule = chk::gauss_legendre(40);
  const std::vector<cplx> ones(rule.size(), 1.0);
  const std::vector<double> xs = {-7.0, -0.3, 1.0, 12.5};
  const auto got = chk::adjoint(0.0, ones, rule, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const cplx want = (std::exp(cplx(0, xs[i])) - 1.0) / (std::sqrt(2 * M_PI) * cplx(0, xs[i]));
    EXPECT_LT(std::abs(got[i] - want), 1e-14);
  }
  const auto z = chk::adjoint(0.5, std::vector<cplx>(rule.size(), 0.0), rule, xs);
  for (auto v : z) EXPECT_EQ(v, cplx(0.0));
  EXPECT_THROW(chk::adjoint(0.0, ones, rule, std::vector<double>{0.0}), chk::SingularityError);
}

TEST(Adjoint, ReflectionRouteAgrees) {
  for (const SpectralParameter s : {SpectralParameter(0.4, 0.2), SpectralParameter(0.5),
                                    SpectralParameter(-0.3), SpectralParameter(0.0, -1.1)}) {
    const auto rule = chk::gauss_legendre(48);
    std::vector<cplx> g(rule.size());
    for (std::size_t t = 0; t < rule.size(); ++t) g[t] = {std::cos(3 * rule.nodes[t]), rule.nodes[t]};
    std::vector<double> xs;
    for (double x = -30.25; x < 30; x += 1.5) xs.push_back(x);
    const auto a = chk::adjoint(s, g, rule, xs);
    const auto b = chk::adjoint_via_reflection(s, g, rule, xs);
    EXPECT_LT(max_abs_diff(a, b), 1e-10) << s.value();
  }
}

TEST(CdIdentity, ZeroParameterExact) {
  const auto rule = chk::gauss_jacobi(128, 0.0, 0.0);
  for (auto [x, y] : {std::pair{1.0, 2.0}, {-3.0, 17.0}, {0.4, 0.4}, {-19.0, -0.1}})
    EXPECT_LT(chk::verify_cd_identity(0.0, x, y, rule), 1e-12);
}

TEST(CdIdentity, ComplexParameter) {
  const SpectralParameter s(0.3, 0.7);
  const auto rule = chk::gauss_jacobi(256, 0.6, 0.0);
  EXPECT_LT(chk::verify_cd_identity(s, 3.0, -5.0, rule), 1e-8);
  EXPECT_LT(chk::verify_cd_identity(s, 4.0, 4.0, rule), 1e-8);
  EXPECT_THROW(chk::verify_cd_identity(s, 3.0, -5.0, chk::gauss_legendre(64)), chk::DomainError);
}

TEST(CdIdentity, DiagonalIsKernelDiagonal) {
  const SpectralParameter s(0.5);
  const chk::ChKernel k(s);
  const auto rule = chk::gauss_jacobi(128, 1.0, 0.0);
  for (double x : {-6.0, 0.7, 11.0}) {
    double lhs = 0.0;
    for (std::size_t t = 0; t < rule.size(); ++t)
      lhs += rule.plain_weights[t] * std::norm(k.tcal(x * rule.nodes[t]));
    EXPECT_NEAR(lhs, k.diagonal(x), 1e-12);
  }
}

TEST(CdIdentity, GeometricConvergenceInNodes) {
  const SpectralParameter s(-0.3);
  double prev = 1.0;
  for (int n : {4, 8, 16}) {
    const double r = chk::verify_cd_identity(s, 7.0, -4.0, chk::gauss_jacobi(n, -0.6, 0.0));
    EXPECT_LT(r, 0.05 * prev) << n;
    prev = r;
  }
  EXPECT_LT(chk::verify_cd_identity(s, 7.0, -4.0, chk::gauss_jacobi(64, -0.6, 0.0)), 1e-12);
}

TEST(Projector, MatchesGaugedKernel) {
  for (const SpectralParameter s : {SpectralParameter(0.0), SpectralParameter(0.5),
                                    SpectralParameter(0.3, 0.7), SpectralParameter(-0.3)}) {
    const WindowGrid w(12.0, 96);
    const auto op = chk::projector_unit_interval(s, w);
    const Eigen::MatrixXcd ref = chk::gauged_kernel_matrix(s, w);
    EXPECT_LT((op.matrix - ref).cwiseAbs().maxCoeff(), 1e-10) << s.value();
    EXPECT_LT((op.matrix - op.matrix.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Projector, SpectrumInUnitInterval) {
  const SpectralParameter s(0.5);
  const WindowGrid w(15.0, 600);
  const auto op = chk::projector_unit_interval(s, w);
  const Eigen::MatrixXcd m = w.spacing * op.matrix;
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(m).eigenvalues();
  EXPECT_GT(ev.minCoeff(), -1e-8);
  EXPECT_LT(ev.maxCoeff(), 1.0 + 1e-3);
  EXPECT_GT(ev.maxCoeff(), 0.99);
}

TEST(PaleyWiener, ZeroParameterIsExactNull) {
  const WindowGrid w(20.0, 200);
  const auto r = chk::pw_projector_residual(0.0, gaussian(), w, 20.0);
  EXPECT_EQ(r.residual, 0.0);
  EXPECT_GT(r.reference_norm, 0.5);
}

TEST(PaleyWiener, KernelRouteMatchesDenseRoute) {
  const SpectralParameter s(0.5);
  const double L = 4.0;
  const WindowGrid w(10.0, 2000);
  const auto f = gaussian();
  const auto dense = chk::halfline_projector_apply_dense(chk::ChKernel(s), sample(w, f.f), w, L, 16);
  std::vector<double> probe;
  std::vector<cplx> dense_probe;
  for (int i = 0; i < w.n_points; i += 50) {
    probe.push_back(w.nodes[i]);
    dense_probe.push_back(dense[i]);
  }
  const auto fast = chk::halfline_projector_apply(chk::ChKernel(s), f, probe, L);
  double scale = 0.0;
  for (auto v : dense_probe) scale = std::max(scale, std::abs(v));
  EXPECT_LT(max_abs_diff(fast, dense_probe), 2e-3 * scale);
}

TEST(PaleyWiener, ResidualShrinksUnderRefinement) {
  const SpectralParameter s(0.5);
  const auto a = chk::pw_projector_residual(s, gaussian(), WindowGrid(25.0, 256), 25.0);
  const auto b = chk::pw_projector_residual(s, gaussian(), WindowGrid(50.0, 512), 50.0);
  EXPECT_LT(b.residual, a.residual);
  EXPECT_LT(b.residual, 0.1);
}

TEST(PaleyWiener, MinusHalfLineIsReflectedPlus) {
  const SpectralParameter s(0.3, 0.7);
  const WindowGrid w(10.0, 100);
  auto f = chk::SupportedFunction{[](double x) { return cplx(std::exp(-0.5 * (x - 1) * (x - 1)), 0.2 * x); },
                                  {-7.0, 9.0}};
  auto jf = chk::SupportedFunction{[g = f.f](double x) { return g(-x); }, {-9.0, 7.0}};
  const chk::ChKernel k(s);
  const auto minus = chk::halfline_projector_apply(k, f, w.nodes, 10.0, chk::HalfLine::minus);
  std::vector<double> neg(w.nodes.rbegin(), w.nodes.rend());
  const auto plus = chk::halfline_projector_apply(k, jf, neg, 10.0, chk::HalfLine::plus);
  double scale = 0.0;
  for (auto v : plus) scale = std::max(scale, std::abs(v));
  EXPECT_LT(max_abs_diff(minus, plus), 1e-9 * scale);
  const auto rm = chk::pw_projector_residual(s, f, w, 10.0, chk::HalfLine::minus);
  const auto rp = chk::pw_projector_residual(s, jf, w, 10.0, chk::HalfLine::plus);
  EXPECT_NEAR(rm.residual, rp.residual, 1e-9 * (1.0 + rp.residual));
}

TEST(PaleyWiener, SampledInputMatchesCallable) {
  const SpectralParameter s(0.5);
  const WindowGrid w(15.0, 600);
  const auto f = gaussian();
  const auto a = chk::pw_projector_residual(s, f, w, 15.0);
  const auto b = chk::pw_projector_residual(s, sample(w, f.f), w, 15.0);
  EXPECT_NEAR(a.residual, b.residual, 0.05 * a.residual);
}

TEST(Hardy, ZeroParameterIsAnalytic) {
  const WindowGrid w(400.0, 4096);
  const auto q = chk::hardy_probe(0.0, w);
  EXPECT_LE(chk::hardy_membership(q, w), 1e-3);
}

TEST(Hardy, ConjugationFlips) {
  const WindowGrid w(200.0, 2048);
  const auto q = chk::hardy_probe(0.5, w);
  const double frac = chk::hardy_membership(q, w);
  std::vector<cplx> conj_only(q.size()), conj_reflect(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    conj_only[i] = std::conj(q[i]);
    conj_reflect[i] = std::conj(q[q.size() - 1 - i]);
  }
  EXPECT_NEAR(chk::hardy_membership(conj_only, w), 1.0 - frac, 1e-12);
  EXPECT_NEAR(chk::hardy_membership(conj_reflect, w), frac, 1e-12);
}

TEST(Hardy, GeneralParameterImprovesWithWindow) {
  const SpectralParameter s(0.5);
  const WindowGrid small(100.0, 1024), large(400.0, 4096);
  const double a = chk::hardy_membership(chk::hardy_probe(s, small), small);
  const double b = chk::hardy_membership(chk::hardy_probe(s, large), large);
  EXPECT_LT(b, a);
  EXPECT_LE(b, 1e-2);
}

TEST(Hardy, TailMassGuard) {
  const WindowGrid w(10.0, 100);
  std::vector<cplx> edge(100, 0.0);
  edge[0] = edge[99] = 1.0;
  EXPECT_THROW(chk::hardy_membership(edge, w), chk::TailMassError);
}

// At s = 0 the windowed norm^2 is 1 - (2/pi) int_R^inf (1 - cos w)/w^2 dw; the
// oscillatory tail is summed from its asymptotic expansion.
double windowed_indicator_norm(double R) {
  std::complex<double> j = 0.0, term = std::complex<double>(0.0, 1.0) * std::polar(1.0, R) / (R * R);
  for (int m = 2; m < 8; ++m) {
    j += term;
    term *= std::complex<double>(0.0, -1.0) * double(m) / R;
  }
  return std::sqrt(1.0 - 2.0 / std::numbers::pi * (1.0 / R - j.real()));
}

TEST(UnitIntervalNorm, ZeroParameterMatchesWindowedFourierNorm) {
  const WindowGrid w(100.0, 1000);
  const double ref = windowed_indicator_norm(100.0);
  for (int n : {0, 3}) EXPECT_NEAR(chk::unit_interval_norm(0.0, n, w), ref, 1e-9) << n;
}

TEST(UnitIntervalNorm, AntiderivativeMatchesDirectQuadrature) {
  const chk::ChKernel k(SpectralParameter(0.4, 0.6));
  const chk::TcalAntiderivative g(k, 30.0);
  for (double u : {-23.7, -0.31, 0.02, 1.0, 12.345, 29.9}) {
    // Panels halving toward 0; the remaining sliver is below 1e-12 in size.
    const double au = std::abs(u);
    std::vector<double> bp{0.0};
    for (double e = au * std::ldexp(1.0, -50); e < au; e *= 2.0) bp.push_back(e);
    bp.push_back(au);
    const auto rule = chk::composite_gauss_legendre(bp, 20);
    std::complex<double> ref = 0.0;
    for (std::size_t t = 0; t < rule.size(); ++t) ref += rule.weights[t] * k.tcal(std::copysign(rule.nodes[t], u));
    if (u < 0) ref = -ref;
    EXPECT_LT(std::abs(g(u) - ref), 1e-10) << u;
  }
}

TEST(UnitIntervalNorm, TrendsToOne) {
  const WindowGrid w(100.0, 1000);
  for (const SpectralParameter s : {SpectralParameter(0.5), SpectralParameter(0.3, 0.7)}) {
    const double d1 = std::abs(chk::unit_interval_norm(s, 1, w) - 1.0);
    const double d4 = std::abs(chk::unit_interval_norm(s, 4, w) - 1.0);
    EXPECT_LT(d4, d1) << s.value();
  }
  // Monotone approach to the s = 0 truncation floor.
  const WindowGrid wide = WindowGrid::with_spacing(200.0, 0.2);
  double prev = 1.0;
  for (int n = 1; n <= 5; ++n) {
    const double d = std::abs(chk::unit_interval_norm(0.5, n, wide) - 1.0);
    EXPECT_LT(d, prev) << n;
    prev = d;
  }
  EXPECT_GT(prev, 1.0 - windowed_indicator_norm(200.0) - 1e-7);
  EXPECT_THROW(chk::unit_interval_norm(0.5, -1, w), chk::DomainError);
}

TEST(Roundtrip, ErrorDecaysLikeInverseSqrtWindow) {
  const SpectralParameter s(0.5);
  auto g = [](double t) { return cplx(t >= 0.25 && t <= 0.75 ? 1.0 : 0.0); };
  double rs[3] = {25, 50, 100}, errs[3];
  for (int i = 0; i < 3; ++i) errs[i] = chk::roundtrip_error(s, g, {0.0, 0.25, 0.75, 1.0}, rs[i]).relative_error;
  EXPECT_LT(errs[2], errs[1]);
  EXPECT_LT(errs[1], errs[0]);
  EXPECT_NEAR(chk::test::loglog_slope(rs, errs, 3), -0.5, 0.2);
}
