#pragma once

#include <string>

#include "rlab/numeric.hpp"
#include "rlab/types.hpp"

namespace rlab {

struct Realization {
  CMatrix A, B, C, D;

  Index n() const { return A.rows(); }
  Index m() const { return B.cols(); }
  Index p() const { return C.rows(); }
};

inline void validate(const Realization& r) {
  if (r.A.rows() != r.A.cols()) throw DimensionError("A must be square");
  if (r.A.rows() < 1) throw DimensionError("state dimension must be at least 1");
  if (r.B.cols() < 1) throw DimensionError("input dimension must be at least 1");
  if (r.C.rows() < 1) throw DimensionError("output dimension must be at least 1");
  if (r.B.rows() != r.A.rows()) throw DimensionError("B must have n rows");
  if (r.C.cols() != r.A.rows()) throw DimensionError("C must have n columns");
  if (r.D.rows() != r.C.rows() || r.D.cols() != r.B.cols())
    throw DimensionError("D must be p x m");
  require_finite(r.A, "A");
  require_finite(r.B, "B");
  require_finite(r.C, "C");
  require_finite(r.D, "D");
}

struct SystemMatrix {
  CMatrix L;
  Index n = 0, m = 0, p = 0;
};

inline SystemMatrix assemble_system_matrix(const Realization& r) {
  validate(r);
  SystemMatrix s{CMatrix(r.n() + r.p(), r.n() + r.m()), r.n(), r.m(), r.p()};
  s.L.topLeftCorner(r.n(), r.n()) = r.A;
  s.L.topRightCorner(r.n(), r.m()) = r.B;
  s.L.bottomLeftCorner(r.p(), r.n()) = r.C;
  s.L.bottomRightCorner(r.p(), r.m()) = r.D;
  return s;
}

inline Realization split_system_matrix(const SystemMatrix& s) {
  if (s.n < 1 || s.m < 1 || s.p < 1)
    throw DimensionError("block boundary must have n, m, p >= 1");
  if (s.L.rows() != s.n + s.p || s.L.cols() != s.n + s.m)
    throw DimensionError("system matrix shape does not match block boundary");
  Realization r;
  r.A = s.L.topLeftCorner(s.n, s.n);
  r.B = s.L.topRightCorner(s.n, s.m);
  r.C = s.L.bottomLeftCorner(s.p, s.n);
  r.D = s.L.bottomRightCorner(s.p, s.m);
  return r;
}

// Strictly proper part: F(s) - F(inf), i.e. the same system with D = 0.
inline Realization associated(const Realization& r) {
  validate(r);
  return {r.A, r.B, r.C, CMatrix::Zero(r.p(), r.m())};
}

// Pads B with zero columns or C with zero rows (D accordingly) until m = p.
inline Realization naive_square(const Realization& r) {
  validate(r);
  const Index k = std::max(r.m(), r.p());
  Realization out;
  out.A = r.A;
  out.B = CMatrix::Zero(r.n(), k);
  out.B.leftCols(r.m()) = r.B;
  out.C = CMatrix::Zero(k, r.n());
  out.C.topRows(r.p()) = r.C;
  out.D = CMatrix::Zero(k, k);
  out.D.topLeftCorner(r.p(), r.m()) = r.D;
  return out;
}

// F(s) = C (sI - A)^{-1} B + D via a linear solve.
inline CMatrix eval_transfer(const Realization& r, Complex s,
                             const Tolerances& tol = {}) {
  validate(r);
  const Spectrum sp = spectrum(r.A);
  double dist = std::numeric_limits<double>::infinity();
  for (const Complex& lam : sp.values) dist = std::min(dist, std::abs(s - lam));
  if (dist <= tol.eig_match * sp.scale)
    throw PreconditionError("eval_transfer: point is within tolerance of a pole");
  const CMatrix resolvent_arg = s * CMatrix::Identity(r.n(), r.n()) - r.A;
  return r.C * resolvent_arg.partialPivLu().solve(r.B) + r.D;
}

// A_cl = A + BKC on a strictly proper system.
inline Realization closed_loop(const Realization& r, const CMatrix& k) {
  validate(r);
  if (k.rows() != r.m() || k.cols() != r.p())
    throw DimensionError("closed_loop: gain must be m x p");
  require_finite(k, "closed_loop gain");
  if (r.D.cwiseAbs().maxCoeff() != 0.0)
    throw PreconditionError("closed_loop: D must be zero; take associated() first");
  return {r.A + r.B * k * r.C, r.B, r.C, r.D};
}

// Realization of F(s)^{-1} for D = I: (A - BC, B, -C, I).
inline Realization inverse_realization(const Realization& r,
                                       const Tolerances& tol = {}) {
  validate(r);
  if (r.m() != r.p())
    throw DimensionError("inverse_realization: m must equal p");
  const CMatrix eye = CMatrix::Identity(r.p(), r.m());
  if ((r.D - eye).cwiseAbs().maxCoeff() > tol.eig_match)
    throw PreconditionError("inverse_realization: D must be the identity");
  return {r.A - r.B * r.C, r.B, -r.C, eye};
}

}  // namespace rlab
