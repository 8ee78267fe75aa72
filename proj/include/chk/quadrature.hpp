#pragma once

#include <chk/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace chk {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double length() const { return hi - lo; }
  bool contains(double t) const { return t >= lo && t <= hi; }
};

enum class RuleKind { gauss_legendre, gauss_jacobi, uniform, composite };

/**
 * Nodes and weights on an interval.
 *
 * `weights` integrate `weight_fn(t) * h(t)` where `weight_fn` is the endpoint
 * weight the rule was built for (1 for Legendre and uniform rules).
 * `plain_weights` are `weights / weight_fn(node)`, i.e. the weights to use when
 * the caller's integrand already carries the singular factor. Both vectors are
 * always filled, so callers pick whichever matches their integrand.
 */
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> plain_weights;
  Interval domain;
  RuleKind kind = RuleKind::gauss_legendre;
  // Endpoint exponents of the Jacobi weight (t-lo)^left (hi-t)^right.
  double left_exponent = 0.0;
  double right_exponent = 0.0;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  auto integrate_plain(F&& f) const {
    using R = decltype(f(0.0));
    R acc{};
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += plain_weights[i] * f(nodes[i]);
    return acc;
  }

  template <class F>
  auto integrate_weighted(F&& f) const {
    using R = decltype(f(0.0));
    R acc{};
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

namespace detail {

inline double log_gamma_real(double x) { return std::lgamma(x); }

// Golub-Welsch on [-1, 1] for the weight (1-x)^alpha (1+x)^beta.
inline void golub_welsch_jacobi(int n, double alpha, double beta, std::vector<double>& x,
                                std::vector<double>& w) {
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 1);
  const double ab = alpha + beta;
  diag(0) = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double tk = 2.0 * k + ab;
    diag(k) = (beta * beta - alpha * alpha) / (tk * (tk + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double tk = 2.0 * k + ab;
    double b2;
    if (k == 1) {
      b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (tk * tk * (tk + 1.0) * (tk - 1.0));
    }
    sub(k - 1) = std::sqrt(b2);
  }
  const double log_mu0 = (ab + 1.0) * std::log(2.0) + log_gamma_real(alpha + 1.0) +
                         log_gamma_real(beta + 1.0) - log_gamma_real(ab + 2.0);
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  if (n == 1) {
    x[0] = diag(0);
    w[0] = std::exp(log_mu0);
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw EigFailure("Golub-Welsch eigensolver failed");
  const double mu0 = std::exp(log_mu0);
  for (int i = 0; i < n; ++i) {
    x[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    w[i] = mu0 * v0 * v0;
  }
}

inline double jacobi_weight(double t, const Interval& d, double left, double right) {
  double v = 1.0;
  if (left != 0.0) v *= std::pow(t - d.lo, left);
  if (right != 0.0) v *= std::pow(d.hi - t, right);
  return v;
}

}  // namespace detail

/// Gauss-Jacobi rule for the weight (t-lo)^left_exponent (hi-t)^right_exponent.
inline QuadratureRule gauss_jacobi(int n, double left_exponent, double right_exponent,
                                   Interval domain = {0.0, 1.0}) {
  if (n < 1) throw DomainError("gauss_jacobi: n must be >= 1");
  if (!(left_exponent > -1.0) || !(right_exponent > -1.0))
    throw DomainError("gauss_jacobi: endpoint exponents must exceed -1");
  if (!(domain.hi > domain.lo)) throw DomainError("gauss_jacobi: empty interval");
  std::vector<double> x, w;
  // On [-1,1] the left endpoint carries (1+x)^beta.
  detail::golub_welsch_jacobi(n, right_exponent, left_exponent, x, w);
  QuadratureRule r;
  r.domain = domain;
  r.kind = (left_exponent == 0.0 && right_exponent == 0.0) ? RuleKind::gauss_legendre
                                                           : RuleKind::gauss_jacobi;
  r.left_exponent = left_exponent;
  r.right_exponent = right_exponent;
  const double half = 0.5 * domain.length();
  const double scale = std::pow(half, left_exponent + right_exponent + 1.0);
  r.nodes.resize(n);
  r.weights.resize(n);
  r.plain_weights.resize(n);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = domain.lo + half * (1.0 + x[i]);
    r.weights[i] = scale * w[i];
    r.plain_weights[i] =
        r.weights[i] / detail::jacobi_weight(r.nodes[i], domain, left_exponent, right_exponent);
  }
  return r;
}

inline QuadratureRule gauss_legendre(int n, Interval domain = {0.0, 1.0}) {
  return gauss_jacobi(n, 0.0, 0.0, domain);
}

/// Midpoint rule with n equal cells.
inline QuadratureRule uniform_midpoint(int n, Interval domain) {
  if (n < 1) throw DomainError("uniform_midpoint: n must be >= 1");
  QuadratureRule r;
  r.domain = domain;
  r.kind = RuleKind::uniform;
  const double h = domain.length() / n;
  r.nodes.resize(n);
  r.weights.assign(n, h);
  r.plain_weights.assign(n, h);
  for (int i = 0; i < n; ++i) r.nodes[i] = domain.lo + (i + 0.5) * h;
  return r;
}

/// Concatenates rules on adjacent panels. Node order follows the panel order.
inline QuadratureRule concatenate(std::span<const QuadratureRule> panels) {
  QuadratureRule r;
  r.kind = RuleKind::composite;
  if (panels.empty()) throw DomainError("concatenate: no panels");
  r.domain = {panels.front().domain.lo, panels.back().domain.hi};
  for (const auto& p : panels) {
    r.nodes.insert(r.nodes.end(), p.nodes.begin(), p.nodes.end());
    r.weights.insert(r.weights.end(), p.weights.begin(), p.weights.end());
    r.plain_weights.insert(r.plain_weights.end(), p.plain_weights.begin(), p.plain_weights.end());
  }
  return r;
}

/// Gauss-Legendre panels between consecutive breakpoints.
inline QuadratureRule composite_gauss_legendre(std::span<const double> breakpoints,
                                               int nodes_per_panel) {
  if (breakpoints.size() < 2) throw DomainError("composite_gauss_legendre: need two breakpoints");
  std::vector<QuadratureRule> panels;
  const QuadratureRule ref = gauss_legendre(nodes_per_panel, {-1.0, 1.0});
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i], b = breakpoints[i + 1];
    if (!(b > a)) throw DomainError("composite_gauss_legendre: breakpoints must increase");
    QuadratureRule p;
    p.domain = {a, b};
    p.nodes.resize(ref.size());
    p.weights.resize(ref.size());
    for (std::size_t k = 0; k < ref.size(); ++k) {
      p.nodes[k] = 0.5 * (a + b) + 0.5 * (b - a) * ref.nodes[k];
      p.weights[k] = 0.5 * (b - a) * ref.weights[k];
    }
    p.plain_weights = p.weights;
    panels.push_back(std::move(p));
  }
  return concatenate(panels);
}

/// Equal-width Gauss-Legendre panels on [lo, hi].
inline QuadratureRule panel_gauss_legendre(Interval domain, int panels, int nodes_per_panel) {
  std::vector<double> bp(panels + 1);
  for (int i = 0; i <= panels; ++i) bp[i] = domain.lo + domain.length() * i / panels;
  bp.back() = domain.hi;
  return composite_gauss_legendre(bp, nodes_per_panel);
}

/**
 * Two Gauss-Jacobi panels (lo, c) and (c, hi) sharing the singular point c,
 * each carrying |t - c|^exponent at c. `weights` integrate |t-c|^exponent h(t).
 */
inline QuadratureRule split_gauss_jacobi(int n_total, double exponent, Interval domain, double c) {
  if (!(c > domain.lo && c < domain.hi)) throw DomainError("split_gauss_jacobi: split point must be interior");
  const int n_left = n_total / 2;
  const int n_right = n_total - n_left;
  std::vector<QuadratureRule> panels{gauss_jacobi(n_left, 0.0, exponent, {domain.lo, c}),
                                     gauss_jacobi(n_right, exponent, 0.0, {c, domain.hi})};
  QuadratureRule r = concatenate(panels);
  r.kind = RuleKind::gauss_jacobi;
  r.domain = domain;
  r.left_exponent = exponent;
  r.right_exponent = exponent;
  return r;
}

}  // namespace chk
