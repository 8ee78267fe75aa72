#pragma once

// Determinantal point process of K^s restricted to [a, b]: Nystrom spectral data,
// exact sampling of the discretized process on the quadrature nodes, and
// first-intensity / count diagnostics.

#include <chk/errors.hpp>
#include <chk/kernel.hpp>
#include <chk/quadrature.hpp>

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace chk {

struct SpectralDecomposition {
  QuadratureRule grid;
  Eigen::VectorXd eigenvalues;    // clipped to [0, 1], ascending
  Eigen::MatrixXcd eigenvectors;  // unit columns of sqrt(pw_i pw_j) K(x_i, x_j)
  double clip_norm = 0.0;         // max distance of a raw eigenvalue from [0, 1]
  double raw_trace = 0.0;         // sum of unclipped eigenvalues

  Interval interval() const { return grid.domain; }
  /// Eigenfunction k at node i, normalized in L2 of the grid measure.
  cplx eigenfunction(int k, int i) const { return eigenvectors(i, k) / std::sqrt(grid.plain_weights[i]); }
};

struct PointConfiguration {
  std::vector<double> points;
  std::uint64_t seed = 0;
  Interval interval;
};

namespace detail {

// Panel rule on [a, b]; 0 becomes a breakpoint when inside, and the panels touching 0
// carry the |x|^{2 Re s} factor as a Gauss-Jacobi weight.
inline QuadratureRule dpp_grid(const SpectralParameter& s, double a, double b, int n_nodes) {
  constexpr int npp = 8;
  const int panels = std::max(2, (n_nodes + npp - 1) / npp);
  std::vector<double> bp;
  if (a < 0.0 && b > 0.0) {
    int left = std::clamp(static_cast<int>(std::lround(panels * (-a) / (b - a))), 1, panels - 1);
    const int right = panels - left;
    for (int k = 0; k < left; ++k) bp.push_back(a + (-a) * k / left);
    for (int k = 0; k <= right; ++k) bp.push_back(b * k / right);
  } else {
    for (int k = 0; k <= panels; ++k) bp.push_back(a + (b - a) * k / panels);
  }
  const double alpha = 2.0 * s.re();
  std::vector<QuadratureRule> parts;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const Interval d{bp[i], bp[i + 1]};
    const double le = (alpha != 0.0 && d.lo == 0.0) ? alpha : 0.0;
    const double re = (alpha != 0.0 && d.hi == 0.0) ? alpha : 0.0;
    parts.push_back(gauss_jacobi(npp, le, re, d));
  }
  QuadratureRule r = concatenate(parts);
  r.domain = {a, b};
  return r;
}

inline double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Nystrom eigen-decomposition of K^s on [a, b] with about n_nodes nodes (a multiple of 8).
inline SpectralDecomposition nystrom_eig(const SpectralParameter& s, double a, double b, int n_nodes) {
  if (n_nodes < 16) throw DomainError("nystrom_eig: n_nodes must be >= 16");
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) throw DomainError("nystrom_eig: need finite a < b");
  const ChKernel k(s);
  SpectralDecomposition d;
  d.grid = detail::dpp_grid(s, a, b, n_nodes);
  const auto n = static_cast<Eigen::Index>(d.grid.size());
  std::vector<KernelPoint> pts;
  pts.reserve(n);
  for (double x : d.grid.nodes) pts.push_back(k.point(x));
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double wi = std::sqrt(d.grid.plain_weights[i]);
    m(i, i) = wi * wi * k.diagonal(d.grid.nodes[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      m(i, j) = wi * std::sqrt(d.grid.plain_weights[j]) * k(pts[i], pts[j]);
      m(j, i) = std::conj(m(i, j));
    }
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  if (es.info() != Eigen::Success) throw EigFailure("nystrom_eig: eigensolver failed");
  d.eigenvalues = es.eigenvalues();
  d.eigenvectors = es.eigenvectors();
  d.raw_trace = d.eigenvalues.sum();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double l = d.eigenvalues(i);
    d.clip_norm = std::max(d.clip_norm, std::max(-l, l - 1.0));
    d.eigenvalues(i) = std::clamp(l, 0.0, 1.0);
  }
  return d;
}

/// sum_i pw_i K(x_i, x_i): the expected number of points of the discretized process.
inline double diagonal_trace(const SpectralParameter& s, const QuadratureRule& grid) {
  const ChKernel k(s);
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) acc += grid.plain_weights[i] * k.diagonal(grid.nodes[i]);
  return acc;
}

/// One exact draw of the discrete process on the grid nodes: Bernoulli(lambda_k) selection, then the
/// projection recursion. Deterministic in `seed` (mt19937_64).
inline PointConfiguration sample(const SpectralDecomposition& d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  PointConfiguration out;
  out.seed = seed;
  out.interval = d.interval();
  const Eigen::Index n = d.eigenvectors.rows();
  std::vector<Eigen::Index> chosen;
  for (Eigen::Index k = 0; k < d.eigenvalues.size(); ++k)
    if (detail::uniform01(gen) < d.eigenvalues(k)) chosen.push_back(k);
  Eigen::MatrixXcd v(n, static_cast<Eigen::Index>(chosen.size()));
  for (std::size_t c = 0; c < chosen.size(); ++c) v.col(static_cast<Eigen::Index>(c)) = d.eigenvectors.col(chosen[c]);

  while (v.cols() > 0) {
    const Eigen::VectorXd p = v.rowwise().squaredNorm();
    const double total = p.sum();
    const double u = detail::uniform01(gen) * total;
    Eigen::Index j = 0;
    double acc = p(0);
    while (acc <= u && j + 1 < n) acc += p(++j);
    out.points.push_back(d.grid.nodes[j]);
    if (v.cols() == 1) break;
    // Drop the component at node j: eliminate it from all columns using the largest entry.
    Eigen::Index c;
    v.row(j).cwiseAbs().maxCoeff(&c);
    const Eigen::VectorXcd pivot = v.col(c) / v(j, c);
    Eigen::MatrixXcd w(n, v.cols() - 1);
    for (Eigen::Index k = 0, q = 0; k < v.cols(); ++k)
      if (k != c) w.col(q++) = v.col(k) - v(j, k) * pivot;
    const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(w);
    v = qr.householderQ() * Eigen::MatrixXcd::Identity(n, w.cols());
  }
  std::sort(out.points.begin(), out.points.end());
  return out;
}

/// Draws with seeds seed, seed+1, ...
inline std::vector<PointConfiguration> sample_many(const SpectralDecomposition& d, std::uint64_t seed, int count) {
  if (count < 0) throw DomainError("sample_many: count must be >= 0");
  std::vector<PointConfiguration> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(sample(d, seed + static_cast<std::uint64_t>(i)));
  return out;
}

struct IntensityHistogram {
  std::vector<double> edges;    // bins + 1
  std::vector<double> density;  // mean points per unit length
  std::vector<double> stderr_;  // standard error of density
  std::size_t draws = 0;
};

inline IntensityHistogram empirical_intensity(std::span<const PointConfiguration> configs, int bins) {
  if (configs.size() < 500) throw DomainError("empirical_intensity: need at least 500 configurations");
  if (bins < 1) throw DomainError("empirical_intensity: bins must be >= 1");
  const Interval iv = configs.front().interval;
  for (const auto& c : configs)
    if (c.interval.lo != iv.lo || c.interval.hi != iv.hi)
      throw DomainError("empirical_intensity: configurations on different intervals");
  const double width = iv.length() / bins;
  IntensityHistogram h;
  h.draws = configs.size();
  for (int b = 0; b <= bins; ++b) h.edges.push_back(iv.lo + width * b);
  std::vector<double> sum(bins, 0.0), sum2(bins, 0.0);
  std::vector<int> cnt(bins);
  for (const auto& c : configs) {
    std::fill(cnt.begin(), cnt.end(), 0);
    for (double x : c.points) ++cnt[std::clamp(static_cast<int>((x - iv.lo) / width), 0, bins - 1)];
    for (int b = 0; b < bins; ++b) {
      sum[b] += cnt[b];
      sum2[b] += static_cast<double>(cnt[b]) * cnt[b];
    }
  }
  const double n = static_cast<double>(configs.size());
  for (int b = 0; b < bins; ++b) {
    const double mean = sum[b] / n;
    const double var = std::max(0.0, (sum2[b] - n * mean * mean) / (n - 1.0));
    h.density.push_back(mean / width);
    h.stderr_.push_back(std::sqrt(var / n) / width);
  }
  return h;
}

struct CountStatistics {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and sample variance of the number of points in [lo, hi].
inline CountStatistics count_statistics(std::span<const PointConfiguration> configs, Interval window) {
  if (configs.size() < 2) throw DomainError("count_statistics: need at least two configurations");
  double s = 0.0, s2 = 0.0;
  for (const auto& c : configs) {
    const auto lo = std::lower_bound(c.points.begin(), c.points.end(), window.lo);
    const auto hi = std::upper_bound(c.points.begin(), c.points.end(), window.hi);
    const double k = static_cast<double>(hi - lo);
    s += k;
    s2 += k * k;
  }
  const double n = static_cast<double>(configs.size());
  const double mean = s / n;
  return {mean, (s2 - n * mean * mean) / (n - 1.0)};
}

/// {"seed":..,"interval":[a,b],"points":[..]} with 17 significant digits.
inline std::string to_jsonl(const PointConfiguration& c) {
  const auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::string out = "{\"seed\":" + std::to_string(c.seed) + ",\"interval\":[" + num(c.interval.lo) + "," +
                    num(c.interval.hi) + "],\"points\":[";
  for (std::size_t i = 0; i < c.points.size(); ++i) out += (i ? "," : "") + num(c.points[i]);
  return out + "]}";
}

inline PointConfiguration from_jsonl(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  PointConfiguration c;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.interval = {j.at("interval").at(0).get<double>(), j.at("interval").at(1).get<double>()};
  c.points = j.at("points").get<std::vector<double>>();
  return c;
}

}  // namespace chk
