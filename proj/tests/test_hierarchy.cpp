#include <chk/hierarchy.hpp>
#include "test_util.hpp"
#include <boost/math/special_functions/jacobi.hpp>
#include <gtest/gtest.h>
#include <numbers>

using chk::cplx;
using chk::SpectralParameter;

namespace {

// Orthonormal for t^alpha on [0,1]: sqrt(2n+alpha+1) P_n^{(0,alpha)}(2t-1).
double jacobi_oracle(int n, double alpha, double t) {
  return std::sqrt(2.0 * n + alpha + 1.0) * boost::math::jacobi(unsigned(n), 0.0, alpha, 2.0 * t - 1.0);
}

double max_offdiag_ratio(const Eigen::MatrixXcd& g) {
  double off = 0.0;
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j)
      if (i != j) off = std::max(off, std::abs(g(i, j)) / std::sqrt(std::abs(g(i, i) * g(j, j))));
  return off;
}

}  // namespace

TEST(Jacobi, Examples) {
  EXPECT_NEAR(chk::jacobi_orthonormal(0.0, 0, 0.4), 1.0, 1e-15);
  EXPECT_NEAR(chk::jacobi_orthonormal(SpectralParameter(0.5, 2.0), 0, 0.9), std::sqrt(2.0), 1e-14);
  for (double t : {0.0, 0.3, 1.0})
    EXPECT_NEAR(chk::jacobi_orthonormal(SpectralParameter(0.0, 1.3), 1, t), std::sqrt(3.0) * (2.0 * t - 1.0), 1e-14);
  EXPECT_THROW(chk::jacobi_orthonormal(0.5, 65, 0.5), chk::DegreeError);
  EXPECT_THROW(chk::jacobi_orthonormal(0.5, 2, 1.5), chk::DomainError);
}

TEST(Jacobi, MatchesClassicalJacobi) {
  for (double re : {0.0, 0.25, 0.5, -0.3, 1.7}) {
    const double alpha = 2.0 * re;
    for (int n : {1, 2, 7, 20, 40, 64})
      for (double t : {0.0, 0.013, 0.37, 0.81, 1.0}) {
        const double ref = jacobi_oracle(n, alpha, t);
        EXPECT_NEAR(chk::jacobi_orthonormal(re, n, t), ref, 1e-10 * std::max(1.0, std::abs(ref)))
            << re << " " << n << " " << t;
      }
  }
}

TEST(Jacobi, WeightedOrthonormality) {
  const double alpha = 1.0;
  const auto r = chk::gauss_jacobi(30, alpha, 0.0, {0.0, 1.0});
  const auto& fam = chk::jacobi_family(alpha);
  for (int m = 0; m <= 12; ++m)
    for (int n = 0; n <= 12; ++n) {
      double acc = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) acc += r.weights[i] * fam(m, r.nodes[i]) * fam(n, r.nodes[i]);
      EXPECT_NEAR(acc, m == n ? 1.0 : 0.0, 1e-10) << m << " " << n;
    }
}

TEST(Jacobi, HypergeometricArgument) {
  // 2F1(-n, n+1+alpha; 1; 1-t) is a multiple of p_n.
  const SpectralParameter s(0.5, 0.4);
  for (int n : {1, 3, 6}) {
    const double c = chk::jacobi_hypergeometric(s, n, 1.0 - 0.2) / chk::jacobi_orthonormal(s, n, 0.2);
    for (double t : {0.05, 0.5, 0.95})
      EXPECT_NEAR(chk::jacobi_hypergeometric(s, n, 1.0 - t), c * chk::jacobi_orthonormal(s, n, t),
                  1e-11 * std::abs(c));
  }
  // With argument -t the degree-one member is 1 + 2t, which has nonzero mean.
  EXPECT_NEAR(chk::jacobi_hypergeometric(0.0, 1, -0.3), 1.6, 1e-15);
  EXPECT_NEAR(chk::minus_t_argument_counterexample(), 2.0, 1e-14);
}

TEST(Jacobi, MomentAnnihilation) {
  EXPECT_LT(chk::moment_annihilation(0.0, 1, 1), 1e-15);
  EXPECT_LT(chk::moment_annihilation(0.5, 3, 2), 1e-10);
  for (const SpectralParameter s : {SpectralParameter(0.5), SpectralParameter(0.3, 0.7), SpectralParameter(-0.2)})
    for (int n = 1; n <= 12; ++n)
      for (int k = 1; k <= n; ++k) EXPECT_LT(chk::moment_annihilation(s, n, k), 1e-10) << n << " " << k;
  // k > n is outside the contract and does not vanish.
  EXPECT_GT(chk::moment_annihilation(0.5, 2, 3), 1e-3);
  EXPECT_THROW(chk::moment_annihilation(0.5, 2, 0), chk::DomainError);
}

TEST(Basis, ZeroParameterIsFourierOfIndicator) {
  const std::vector<double> xs{-7.5, -0.3, 0.01, 1.0, 12.0};
  const auto a = chk::basis_L_adjoint_route(0.0, 0, xs);
  const auto c = chk::basis_L_closed_form(0.0, 0, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const cplx f = (std::polar(1.0, xs[i]) - 1.0) / cplx(0.0, xs[i]);
    EXPECT_LT(std::abs(a.values[i] - chk::kInvSqrtTwoPi * f), 1e-13);
    EXPECT_LT(std::abs(c.values[i] - f), 1e-13);
  }
  EXPECT_EQ(a.route, chk::BasisRoute::adjoint_route);
  EXPECT_EQ(c.route, chk::BasisRoute::closed_form);
}

TEST(Basis, RoutesAreProportional) {
  const std::vector<double> xs{-9.0, -4.3, -1.1, 0.2, 0.7, 2.5, 6.0, 15.0};
  for (const SpectralParameter s : {SpectralParameter(0.5), SpectralParameter(0.3, 0.7)})
    for (int n = 0; n <= 3; ++n) {
      const auto a = chk::basis_L_adjoint_route(s, n, xs);
      const auto c = chk::basis_L_closed_form(s, n, xs);
      const cplx r0 = a.values[0] / c.values[0];
      for (std::size_t i = 0; i < xs.size(); ++i)
        EXPECT_LT(std::abs(a.values[i] / c.values[i] / r0 - 1.0), 1e-6) << s.value() << " " << n << " " << xs[i];
      if (n == 0) {
        // constant = Gamma(1+conj s)/Gamma(1+2Re s)/sqrt(2 pi) * p_0
        const cplx expect = chk::gamma_ratio({1.0 + std::conj(s.value())}, {cplx(1.0 + 2.0 * s.re())}) *
                            chk::kInvSqrtTwoPi * std::sqrt(2.0 * s.re() + 1.0);
        EXPECT_LT(std::abs(r0 - expect), 1e-12 * std::abs(expect));
      }
    }
}

TEST(Basis, SeriesMatchesAdjointRoute) {
  const std::vector<double> xs{-1.9, -0.4, 0.05, 0.2, 0.7, 1.5};
  for (const SpectralParameter s : {SpectralParameter(0.5), SpectralParameter(0.3, 0.7), SpectralParameter(0.0)})
    for (int n = 0; n <= 3; ++n) {
      const auto a = chk::basis_L_adjoint_route(s, n, xs);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const cplx ref = chk::basis_L_series(s, n, xs[i]);
        EXPECT_LT(std::abs(a.values[i] - ref), 1e-7 * std::abs(ref)) << n << " " << xs[i];
      }
    }
}

TEST(Basis, ConjugatePowerBreaksVanishingForComplexS) {
  const SpectralParameter s(0.3, 0.7);
  const std::vector<double> xs{0.02, 0.2};
  const auto h = [&](chk::InputPower p) {
    const auto f = chk::basis_L_adjoint_route(s, 1, xs, p);
    return std::abs(f.values[0] / chk::rho(s, xs[0])) / std::abs(f.values[1] / chk::rho(s, xs[1]));
  };
  EXPECT_NEAR(h(chk::InputPower::s), 0.1, 0.01);
  EXPECT_GT(h(chk::InputPower::conj_s), 0.5);
}

TEST(BasisGram, WindowedAndExtrapolated) {
  for (const SpectralParameter s : {SpectralParameter(0.0), SpectralParameter(0.5)}) {
    const auto g100 = chk::gram_of_basis(s, 4, chk::WindowGrid::with_spacing(100.0, 0.2));
    const auto g200 = chk::gram_of_basis(s, 4, chk::WindowGrid::with_spacing(200.0, 0.2));
    EXPECT_LT((g200 - g200.adjoint()).cwiseAbs().maxCoeff(), 1e-13);
    for (int i = 0; i < 4; ++i) EXPECT_GT(g200(i, i).real(), 0.9);
    // 1/R: halving the window doubles the defect.
    EXPECT_NEAR(max_offdiag_ratio(g100) / max_offdiag_ratio(g200), 2.0, 0.2);
    const Eigen::MatrixXcd e = 2.0 * g200 - g100;
    EXPECT_LT(max_offdiag_ratio(e), 1e-3) << s.value();
    EXPECT_LT((e - chk::gram_of_basis_extrapolated(s, 4, chk::WindowGrid::with_spacing(200.0, 0.2))).cwiseAbs().maxCoeff(),
              1e-14);
  }
}

TEST(Vanishing, OrderMatchesIndex) {
  for (const SpectralParameter s : {SpectralParameter(0.5), SpectralParameter(0.3, 0.7), SpectralParameter(0.0)}) {
    double prev = -1.0;
    for (int n = 0; n <= 4; ++n) {
      const double e = chk::vanishing_order(s, n);
      EXPECT_NEAR(e, n, 0.05) << s.value() << " " << n;
      EXPECT_GT(e, prev);
      prev = e;
    }
  }
  EXPECT_THROW(chk::vanishing_order(0.5, 2, {0.1, 0.9}), chk::DomainError);
  EXPECT_THROW(chk::vanishing_order(0.5, 64, {1e-6, 1e-5}), chk::FitError);
}
