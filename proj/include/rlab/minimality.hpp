#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <vector>

#include <complex>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "rlab/numeric.hpp"
#include "rlab/realization.hpp"
#include "rlab/types.hpp"

namespace rlab {

struct PbhResult {
  bool ok = false;
  std::optional<Complex> witness;
  double margin = 0.0;  // min over eigenvalues of sigma_n / rank cutoff
};

struct MinimalityVerdict {
  bool controllable = false;
  bool observable = false;
  bool minimal = false;
  std::optional<Complex> uncontrollable_witness;
  std::optional<Complex> unobservable_witness;
  double controllability_margin = 0.0;
  double observability_margin = 0.0;
};

namespace detail {

// Clearance of "numeric_rank(m) == want": smallest singular value that must
// stay above the cutoff, as a multiple of the cutoff.
inline double rank_clearance(const CMatrix& m, Index want, const Tolerances& tol) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& sv = svd.singularValues();
  if (want < 1 || want > sv.size()) return 0.0;
  const double cut = rank_cutoff(sv, m.rows(), m.cols(), tol);
  if (cut == 0.0) return 0.0;
  return sv(want - 1) / cut;
}

}  // namespace detail

// Rank test confined to spectrum representatives; first violation reported.
inline PbhResult pbh_controllable(const CMatrix& a, const CMatrix& b,
                                  const Tolerances& tol = {}) {
  if (a.rows() != a.cols()) throw DimensionError("pbh_controllable: A must be square");
  if (b.rows() != a.rows()) throw DimensionError("pbh_controllable: B must have n rows");
  require_finite(a, "A");
  require_finite(b, "B");
  const Index n = a.rows();
  PbhResult res;
  res.ok = true;
  res.margin = std::numeric_limits<double>::infinity();
  const EigenClusters clusters = cluster_eigenvalues(a, tol);
  CMatrix pencil(n, n + b.cols());
  for (const EigenCluster& c : clusters.clusters) {
    pencil.leftCols(n) = c.representative * CMatrix::Identity(n, n) - a;
    pencil.rightCols(b.cols()) = b;
    res.margin = std::min(res.margin, detail::rank_clearance(pencil, n, tol));
    if (numeric_rank(pencil, tol) < n) {
      res.ok = false;
      if (!res.witness) res.witness = c.representative;
    }
  }
  return res;
}

inline PbhResult pbh_observable(const CMatrix& a, const CMatrix& c,
                                const Tolerances& tol = {}) {
  if (a.rows() != a.cols()) throw DimensionError("pbh_observable: A must be square");
  if (c.cols() != a.rows())
    throw DimensionError("pbh_observable: C must have n columns");
  PbhResult res = pbh_controllable(a.adjoint(), c.adjoint(), tol);
  if (res.witness) res.witness = std::conj(*res.witness);
  return res;
}

// Independent oracle: rank of [B, AB, ..., A^{n-1}B] via column-pivoted QR.
inline bool kalman_controllable(const CMatrix& a, const CMatrix& b,
                                const Tolerances& tol = {}) {
  if (a.rows() != a.cols()) throw DimensionError("kalman_controllable: A must be square");
  if (b.rows() != a.rows())
    throw DimensionError("kalman_controllable: B must have n rows");
  const Index n = a.rows();
  CMatrix block = b;
  CMatrix reach(n, n * b.cols());
  for (Index k = 0; k < n; ++k) {
    reach.middleCols(k * b.cols(), b.cols()) = block;
    block = a * block;
  }
  Eigen::ColPivHouseholderQR<CMatrix> qr(reach);
  qr.setThreshold(tol.rank_rel * static_cast<double>(std::max(reach.rows(), reach.cols())));
  return qr.rank() == n;
}

inline bool kalman_observable(const CMatrix& a, const CMatrix& c,
                              const Tolerances& tol = {}) {
  return kalman_controllable(a.adjoint(), c.adjoint(), tol);
}

inline MinimalityVerdict is_minimal(const Realization& r, const Tolerances& tol = {}) {
  validate(r);
  MinimalityVerdict v;
  const PbhResult ctrl = pbh_controllable(r.A, r.B, tol);
  const PbhResult obs = pbh_observable(r.A, r.C, tol);
  v.controllable = ctrl.ok;
  v.observable = obs.ok;
  v.minimal = ctrl.ok && obs.ok;
  v.uncontrollable_witness = ctrl.witness;
  v.unobservable_witness = obs.witness;
  v.controllability_margin = ctrl.margin;
  v.observability_margin = obs.margin;
  return v;
}

inline bool kalman_minimal(const Realization& r, const Tolerances& tol = {}) {
  validate(r);
  return kalman_controllable(r.A, r.B, tol) && kalman_observable(r.A, r.C, tol);
}

// Largest geometric multiplicity over the spectrum.
inline int alpha(const CMatrix& a, const Tolerances& tol = {}) {
  const EigenClusters clusters = cluster_eigenvalues(a, tol);
  int best = 0;
  for (const EigenCluster& c : clusters.clusters) best = std::max(best, c.geometric);
  return best;
}

// Finite generalized eigenvalues of (M, N): lambda with det(lambda N - M) = 0.
inline std::vector<Complex> finite_pencil_eigenvalues(const CMatrix& m,
                                                      const CMatrix& n) {
  if (m.rows() != m.cols() || n.rows() != n.cols() || m.rows() != n.rows())
    throw DimensionError("finite_pencil_eigenvalues: matrices must be square, same size");
  require_finite(m, "pencil M");
  require_finite(n, "pencil N");
  const lapack_int dim = static_cast<lapack_int>(m.rows());
  if (dim == 0) return {};
  CMatrix a = m, b = n;  // zggev overwrites its inputs
  std::vector<Complex> num(static_cast<size_t>(dim)), den(static_cast<size_t>(dim));
  const lapack_int info = LAPACKE_zggev(
      LAPACK_COL_MAJOR, 'N', 'N', dim, a.data(), dim, b.data(), dim, num.data(),
      den.data(), nullptr, 1, nullptr, 1);
  if (info < 0) throw NumericalBreakdownError("zggev: invalid argument");
  std::vector<Complex> out;
  // info > 0 means partial convergence; the converged tail is still usable.
  const size_t first = info > 0 ? static_cast<size_t>(info) : 0;
  for (size_t i = first; i < num.size(); ++i)
    if (std::abs(den[i]) > 1e-10 * (1.0 + std::abs(num[i])))
      out.push_back(num[i] / den[i]);
  std::sort(out.begin(), out.end(), detail::complex_less);
  return out;
}

struct RankFormulaResult {
  Index lhs = 0;
  Index rhs = 0;
  bool holds = false;
  Complex minimizer;  // candidate point attaining lhs
};

// min over lambda of rank [[lambda I - A, B],[C, D]] versus
// n + min(rank B, rank C).  The bordered matrix T(lambda) is a linear pencil,
// so its rank only drops below the normal rank at finitely many points: the
// finite eigenvalues of the pencil squared down by a random full-rank
// compression (which keeps every rank-drop point and at worst adds spurious
// candidates that the rank evaluation then ignores).  Spectrum-derived points
// are kept as extra candidates; they cost one SVD each.
inline RankFormulaResult rank_formula_check(const Realization& r,
                                            const Tolerances& tol = {},
                                            std::uint64_t seed = 0) {
  validate(r);
  const Index n = r.n();
  const Index rows = n + r.p();
  const Index cols = n + r.m();

  CMatrix pm(rows, cols);
  pm.topLeftCorner(n, n) = r.A;
  pm.topRightCorner(n, r.m()) = -r.B;
  pm.bottomLeftCorner(r.p(), n) = -r.C;
  pm.bottomRightCorner(r.p(), r.m()) = -r.D;
  CMatrix pn = CMatrix::Zero(rows, cols);
  pn.topLeftCorner(n, n).setIdentity();
  const Index side = std::min(rows, cols);
  Rng rng(mix_seed(seed, 0x4a3f00d1));
  if (rows > cols) {
    const CMatrix g = rng.gaussian_matrix(side, rows);
    pm = (g * pm).eval();
    pn = (g * pn).eval();
  } else if (cols > rows) {
    const CMatrix g = rng.gaussian_matrix(cols, side);
    pm = (pm * g).eval();
    pn = (pn * g).eval();
  }

  std::vector<Complex> candidates;
  for (const EigenCluster& c : cluster_eigenvalues(r.A, tol).clusters)
    candidates.push_back(c.representative);
  const Spectrum hat = spectrum(assemble_system_matrix(naive_square(r)).L);
  candidates.insert(candidates.end(), hat.values.begin(), hat.values.end());
  const std::vector<Complex> pencil_eigs = finite_pencil_eigenvalues(pm, pn);
  candidates.insert(candidates.end(), pencil_eigs.begin(), pencil_eigs.end());
  std::sort(candidates.begin(), candidates.end(), detail::complex_less);

  RankFormulaResult res;
  res.rhs = n + std::min(numeric_rank(r.B, tol), numeric_rank(r.C, tol));
  res.lhs = std::numeric_limits<Index>::max();
  CMatrix bordered(rows, cols);
  bordered.bottomLeftCorner(r.p(), n) = r.C;
  bordered.bottomRightCorner(r.p(), r.m()) = r.D;
  for (const Complex& lam : candidates) {
    bordered.topLeftCorner(n, n) = lam * CMatrix::Identity(n, n) - r.A;
    bordered.topRightCorner(n, r.m()) = r.B;
    const Index rank = numeric_rank(bordered, tol);
    if (rank < res.lhs) {
      res.lhs = rank;
      res.minimizer = lam;
    }
  }
  res.holds = res.lhs == res.rhs;
  return res;
}

}  // namespace rlab
