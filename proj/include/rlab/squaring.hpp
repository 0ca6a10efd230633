#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include "rlab/minimality.hpp"
#include "rlab/numeric.hpp"
#include "rlab/realization.hpp"

namespace rlab {

struct SquaringTransform {
  CMatrix T_b;  // m x alpha, full column rank
  CMatrix T_c;  // alpha x p, full row rank
  Index alpha = 0;
};

// Full-column-rank T_b with (A, B T_b) still controllable and B T_b of rank
// alpha.  Identity when m is already alpha; otherwise a verified random draw.
inline CMatrix construct_Tb(const CMatrix& a, const CMatrix& b,
                            const Tolerances& tol = {}, std::uint64_t seed = 0) {
  if (!pbh_controllable(a, b, tol).ok)
    throw PreconditionError("construct_Tb: pair is not controllable");
  const Index al = alpha(a, tol);
  const Index m = b.cols();
  if (m == al) return CMatrix::Identity(m, al);
  Rng rng(mix_seed(seed, 0x2b1e7f09));
  for (int attempt = 0; attempt < tol.max_retries; ++attempt) {
    const CMatrix t = rng.gaussian_matrix(m, al);
    if (numeric_rank(t, tol) < al) continue;
    if (numeric_rank(b * t, tol) < al) continue;
    if (pbh_controllable(a, b * t, tol).ok) return t;
  }
  throw NumericalBreakdownError("construct_Tb: retries exhausted");
}

// Dual construction: T_c = T*, with T built for the controllable pair (A*, C*).
inline CMatrix construct_Tc(const CMatrix& a, const CMatrix& c,
                            const Tolerances& tol = {}, std::uint64_t seed = 0) {
  if (!pbh_observable(a, c, tol).ok)
    throw PreconditionError("construct_Tc: pair is not observable");
  return construct_Tb(a.adjoint(), c.adjoint(), tol, mix_seed(seed, 0x11d4c9a7))
      .adjoint();
}

struct SquaredRealization {
  Realization squared;  // (A, B T_b, T_c C, T_c D T_b); m = p = alpha
  SquaringTransform transform;
};

// Truncates the input/output dimensions to alpha while keeping A bitwise.
// Caller-supplied transforms are verified before use.
inline SquaredRealization square_realization(
    const Realization& r, const Tolerances& tol = {}, std::uint64_t seed = 0,
    const std::optional<CMatrix>& tb_override = std::nullopt,
    const std::optional<CMatrix>& tc_override = std::nullopt) {
  validate(r);
  if (!is_minimal(r, tol).minimal)
    throw PreconditionError(
        "square_realization: input is not minimal; use naive_square instead");
  const Index al = alpha(r.A, tol);

  CMatrix tb;
  if (tb_override) {
    tb = *tb_override;
    if (tb.rows() != r.m() || tb.cols() != al)
      throw PreconditionError("square_realization: T_b override must be m x alpha");
    if (numeric_rank(tb, tol) < al || numeric_rank(r.B * tb, tol) < al ||
        !pbh_controllable(r.A, r.B * tb, tol).ok)
      throw PreconditionError("square_realization: T_b override rejected");
  } else {
    tb = construct_Tb(r.A, r.B, tol, mix_seed(seed, 1));
  }

  CMatrix tc;
  if (tc_override) {
    tc = *tc_override;
    if (tc.rows() != al || tc.cols() != r.p())
      throw PreconditionError("square_realization: T_c override must be alpha x p");
    if (numeric_rank(tc, tol) < al || numeric_rank(tc * r.C, tol) < al ||
        !pbh_observable(r.A, tc * r.C, tol).ok)
      throw PreconditionError("square_realization: T_c override rejected");
  } else {
    tc = construct_Tc(r.A, r.C, tol, mix_seed(seed, 2));
  }

  SquaredRealization out;
  out.squared = {r.A, r.B * tb, tc * r.C, tc * r.D * tb};
  out.transform = {tb, tc, al};

  // The compressed transfer function must match T_c F T_b exactly; sample on
  // a circle strictly outside the spectrum.
  const double radius = 2.0 * norm_scale(r.A);
  for (int k = 0; k < 10; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / 10.0;
    const Complex s{radius * std::cos(angle), radius * std::sin(angle)};
    const CMatrix lhs = eval_transfer(out.squared, s, tol);
    const CMatrix rhs = tc * eval_transfer(r, s, tol) * tb;
    if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff()))
      throw NumericalBreakdownError(
          "square_realization: compressed transfer mismatch");
  }
  return out;
}

}  // namespace rlab
