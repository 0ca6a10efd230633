#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "rlab/types.hpp"

namespace rlab {

namespace detail {

inline bool complex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

inline double rank_cutoff(const Eigen::VectorXd& sv, Index rows, Index cols,
                          const Tolerances& tol) {
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  return tol.rank_rel * smax * static_cast<double>(std::max(rows, cols));
}

}  // namespace detail

inline Spectrum spectrum(const CMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("spectrum: matrix must be square");
  require_finite(m, "spectrum");
  Spectrum s;
  s.source_dim = m.rows();
  s.scale = norm_scale(m);
  if (m.rows() == 0) return s;
  Eigen::ComplexEigenSolver<CMatrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NumericalBreakdownError("spectrum: eigensolver did not converge");
  s.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
  std::sort(s.values.begin(), s.values.end(), detail::complex_less);
  return s;
}

inline Index numeric_rank(const CMatrix& m, const Tolerances& tol = {}) {
  if (m.size() == 0) return 0;
  require_finite(m, "numeric_rank");
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& sv = svd.singularValues();
  const double cut = detail::rank_cutoff(sv, m.rows(), m.cols(), tol);
  Index r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  return r;
}

// Orthonormal basis of the (numerical) kernel; empty for full column rank.
inline CMatrix null_space(const CMatrix& m, const Tolerances& tol = {}) {
  if (m.cols() == 0) return CMatrix(0, 0);
  if (m.rows() == 0) return CMatrix::Identity(m.cols(), m.cols());
  require_finite(m, "null_space");
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = detail::rank_cutoff(sv, m.rows(), m.cols(), tol);
  Index r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  return svd.matrixV().rightCols(m.cols() - r);
}

inline EigenClusters cluster_eigenvalues(const CMatrix& a, const Tolerances& tol = {}) {
  if (a.rows() != a.cols())
    throw DimensionError("cluster_eigenvalues: matrix must be square");
  const Index n = a.rows();
  const Spectrum s = spectrum(a);
  EigenClusters out;
  out.radius = tol.eig_match * s.scale;
  if (n == 0) return out;

  // Single-linkage grouping at the norm-scaled radius.
  std::vector<int> parent(static_cast<size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&parent](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (std::abs(s.values[i] - s.values[j]) <= out.radius)
        parent[find(static_cast<int>(i))] = find(static_cast<int>(j));

  std::vector<std::vector<Complex>> groups(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i)
    groups[static_cast<size_t>(find(static_cast<int>(i)))].push_back(s.values[i]);

  for (const auto& g : groups) {
    if (g.empty()) continue;
    EigenCluster c;
    Complex sum = 0;
    for (const Complex& v : g) sum += v;
    c.representative = sum / static_cast<double>(g.size());
    c.algebraic = static_cast<int>(g.size());
    for (size_t i = 0; i < g.size(); ++i)
      for (size_t j = i + 1; j < g.size(); ++j)
        c.diameter = std::max(c.diameter, std::abs(g[i] - g[j]));
    if (c.diameter > 10.0 * out.radius) out.ill_conditioned = true;

    // The rank-based count is more robust than the clustered algebraic one:
    // a size-k Jordan block scatters its computed eigenvalues by roughly
    // eps^(1/k), which can split a cluster and undercount its multiplicity,
    // while rank(A - rep*I) stays well separated.  So geo > algebraic only
    // flags ill-conditioning; it does not cap the value.
    const CMatrix shifted = a - c.representative * CMatrix::Identity(n, n);
    int geo = static_cast<int>(n - numeric_rank(shifted, tol));
    if (geo < 1 || geo > c.algebraic) out.ill_conditioned = true;
    c.geometric = std::clamp(geo, 1, static_cast<int>(n));
    out.clusters.push_back(c);
  }

  std::sort(out.clusters.begin(), out.clusters.end(),
            [](const EigenCluster& x, const EigenCluster& y) {
              return detail::complex_less(x.representative, y.representative);
            });
  return out;
}

inline Complex scalar_polynomial(const std::vector<Complex>& coeffs, Complex z) {
  if (coeffs.empty()) throw InvalidInputError("scalar_polynomial: empty coefficients");
  Complex acc = coeffs.back();
  for (size_t k = coeffs.size() - 1; k-- > 0;) acc = acc * z + coeffs[k];
  return acc;
}

// Horner evaluation; coeffs[k] multiplies M^k.
inline CMatrix matrix_polynomial(const std::vector<Complex>& coeffs, const CMatrix& m) {
  if (coeffs.empty()) throw InvalidInputError("matrix_polynomial: empty coefficients");
  if (m.rows() != m.cols())
    throw DimensionError("matrix_polynomial: matrix must be square");
  require_finite(m, "matrix_polynomial");
  const Index n = m.rows();
  CMatrix acc = coeffs.back() * CMatrix::Identity(n, n);
  for (size_t k = coeffs.size() - 1; k-- > 0;)
    acc = (acc * m + coeffs[k] * CMatrix::Identity(n, n)).eval();
  return acc;
}

struct SpectralMatch {
  Complex left;
  Complex right;
  double distance = 0.0;
};

// Greedy minimum-distance matching; empty result certifies disjointness at
// the scaled tolerance.
inline std::vector<SpectralMatch> spectra_intersect(const Spectrum& s1,
                                                    const Spectrum& s2,
                                                    const Tolerances& tol = {}) {
  const double cut = tol.eig_match * std::max(s1.scale, s2.scale);
  std::vector<bool> used1(s1.values.size(), false), used2(s2.values.size(), false);
  std::vector<SpectralMatch> matches;
  for (;;) {
    double best = std::numeric_limits<double>::infinity();
    size_t bi = 0, bj = 0;
    bool found = false;
    for (size_t i = 0; i < s1.values.size(); ++i) {
      if (used1[i]) continue;
      for (size_t j = 0; j < s2.values.size(); ++j) {
        if (used2[j]) continue;
        const double d = std::abs(s1.values[i] - s2.values[j]);
        if (d <= cut && d < best) {
          best = d;
          bi = i;
          bj = j;
          found = true;
        }
      }
    }
    if (!found) break;
    used1[bi] = used2[bj] = true;
    matches.push_back({s1.values[bi], s2.values[bj], best});
  }
  return matches;
}

inline Spectrum make_spectrum(std::vector<Complex> values) {
  Spectrum s;
  s.source_dim = static_cast<Index>(values.size());
  double peak = 0.0;
  for (const Complex& v : values) peak = std::max(peak, std::abs(v));
  s.scale = 1.0 + peak;
  std::sort(values.begin(), values.end(), detail::complex_less);
  s.values = std::move(values);
  return s;
}

}  // namespace rlab
