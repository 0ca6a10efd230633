#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "rlab/minimality.hpp"
#include "rlab/numeric.hpp"
#include "rlab/realization.hpp"

namespace rlab {

// Re-reads psi(L) as a realization with the same block boundary.
inline Realization psi_realization(const Realization& r,
                                   const std::vector<Complex>& psi) {
  validate(r);
  if (r.m() != r.p())
    throw PreconditionError("psi_realization: system matrix must be square");
  SystemMatrix s = assemble_system_matrix(r);
  s.L = matrix_polynomial(psi, s.L);
  return split_system_matrix(s);
}

struct FamilyReport {
  std::vector<Complex> psi_coeffs;
  Realization tilde;
  bool crit_i_tilde = false;   // spect(A-tilde) disjoint from spect(psi(L))
  bool minimal_tilde = false;
  bool minimal_L = false;
  bool chain_respected = false;
};

// Evaluates the implication chain disjointness => minimal(psi(L)) =>
// minimal(L) on one instance.  A broken chain is a tolerance failure, never
// a mathematical verdict, so it throws.
inline FamilyReport family_report(const Realization& r,
                                  const std::vector<Complex>& psi,
                                  const Tolerances& tol = {}) {
  FamilyReport report;
  report.psi_coeffs = psi;
  report.tilde = psi_realization(r, psi);
  const CMatrix psi_l = assemble_system_matrix(report.tilde).L;
  report.crit_i_tilde =
      spectra_intersect(spectrum(report.tilde.A), spectrum(psi_l), tol).empty();
  report.minimal_tilde = is_minimal(report.tilde, tol).minimal;
  report.minimal_L = is_minimal(r, tol).minimal;
  report.chain_respected = !(report.crit_i_tilde && !report.minimal_tilde) &&
                           !(report.minimal_tilde && !report.minimal_L);
  if (!report.chain_respected)
    throw NumericalBreakdownError(
        "family_report: implication chain violated; tolerances are off");
  return report;
}

// Eigenvector-level containment: every right and left eigenpair of L is
// transported to psi(L) with eigenvalue psi(lambda).
inline bool invariant_subspace_containment(const CMatrix& l,
                                           const std::vector<Complex>& psi,
                                           const Tolerances& tol = {}) {
  if (l.rows() != l.cols())
    throw DimensionError("invariant_subspace_containment: matrix must be square");
  require_finite(l, "invariant_subspace_containment");
  const CMatrix psi_l = matrix_polynomial(psi, l);
  const double cut = tol.eig_match * norm_scale(psi_l);

  Eigen::ComplexEigenSolver<CMatrix> right(l, true);
  if (right.info() != Eigen::Success)
    throw NumericalBreakdownError("invariant_subspace_containment: eigensolver failed");
  for (Index i = 0; i < l.rows(); ++i) {
    const CVector v = right.eigenvectors().col(i);
    const Complex lam = right.eigenvalues()(i);
    if ((psi_l * v - scalar_polynomial(psi, lam) * v).norm() > cut * v.norm())
      return false;
  }

  Eigen::ComplexEigenSolver<CMatrix> left(l.adjoint().eval(), true);
  if (left.info() != Eigen::Success)
    throw NumericalBreakdownError("invariant_subspace_containment: eigensolver failed");
  for (Index i = 0; i < l.rows(); ++i) {
    const CVector w = left.eigenvectors().col(i);
    const Complex lam = std::conj(left.eigenvalues()(i));
    const Complex target = std::conj(scalar_polynomial(psi, lam));
    if ((psi_l.adjoint() * w - target * w).norm() > cut * w.norm()) return false;
  }
  return true;
}

// Splits L^{-1} at the same block boundary; shares minimality with L.
inline Realization inverse_matrix_family(const Realization& r,
                                         const Tolerances& tol = {}) {
  validate(r);
  if (r.m() != r.p())
    throw PreconditionError("inverse_matrix_family: system matrix must be square");
  SystemMatrix s = assemble_system_matrix(r);
  if (numeric_rank(s.L, tol) < s.L.rows())
    throw PreconditionError("inverse_matrix_family: system matrix is singular");
  s.L = s.L.partialPivLu().inverse();
  return split_system_matrix(s);
}

struct ProbeStats {
  int trials = 0;
  int minimal_tested = 0;
  int discarded_nonminimal = 0;
  double closest_distance = std::numeric_limits<double>::infinity();
  double closest_threshold = 0.0;
};

struct ProbeResult {
  std::optional<Realization> counterexample;
  ProbeStats stats;
};

// Random search for a minimal (A, B, C), D = 0, whose open- and closed-block
// spectra still meet.  Reports candidates only; decides nothing.
inline ProbeResult conjecture_probe(Index n, Index p, int trials,
                                    std::uint64_t seed = 0,
                                    const Tolerances& tol = {}) {
  if (n < 1 || p < 1)
    throw InvalidInputError("conjecture_probe: n and p must be at least 1");
  ProbeResult result;
  for (int t = 0; t < trials; ++t) {
    ++result.stats.trials;
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    Realization r{rng.gaussian_matrix(n, n), rng.gaussian_matrix(n, p),
                  rng.gaussian_matrix(p, n), CMatrix::Zero(p, p)};
    if (!is_minimal(r, tol).minimal) {
      ++result.stats.discarded_nonminimal;
      continue;
    }
    ++result.stats.minimal_tested;
    const Spectrum open_spectrum = spectrum(r.A);
    const Spectrum closed_spectrum = spectrum(assemble_system_matrix(r).L);
    const double cut =
        tol.eig_match * std::max(open_spectrum.scale, closed_spectrum.scale);
    double dist = std::numeric_limits<double>::infinity();
    for (const Complex& a : open_spectrum.values)
      for (const Complex& mu : closed_spectrum.values)
        dist = std::min(dist, std::abs(a - mu));
    if (dist < result.stats.closest_distance) {
      result.stats.closest_distance = dist;
      result.stats.closest_threshold = cut;
    }
    if (dist * 10.0 <= cut) {
      result.counterexample = r;
      break;
    }
  }
  return result;
}

}  // namespace rlab
