#pragma once

#include <algorithm>
#include <vector>

#include "rlab/numeric.hpp"
#include "rlab/types.hpp"

namespace rlab {

struct JordanGroup {
  Complex eigenvalue;
  std::vector<Index> block_sizes;
};

// Symbolic Jordan structure; eigenvalues are exact labels, never computed.
struct JordanSpec {
  std::vector<JordanGroup> groups;
};

inline void validate(const JordanSpec& spec) {
  if (spec.groups.empty()) throw InvalidInputError("JordanSpec: no eigenvalue groups");
  for (size_t i = 0; i < spec.groups.size(); ++i) {
    const JordanGroup& g = spec.groups[i];
    if (g.block_sizes.empty())
      throw InvalidInputError("JordanSpec: group without blocks");
    for (Index s : g.block_sizes)
      if (s < 1) throw InvalidInputError("JordanSpec: block size must be >= 1");
    for (size_t j = i + 1; j < spec.groups.size(); ++j)
      if (g.eigenvalue == spec.groups[j].eigenvalue)
        throw InvalidInputError("JordanSpec: eigenvalues must be pairwise distinct");
  }
}

inline Index total_size(const JordanSpec& spec) {
  Index n = 0;
  for (const JordanGroup& g : spec.groups)
    for (Index s : g.block_sizes) n += s;
  return n;
}

inline CMatrix jordan_matrix(const JordanSpec& spec) {
  validate(spec);
  const Index n = total_size(spec);
  CMatrix a = CMatrix::Zero(n, n);
  Index at = 0;
  for (const JordanGroup& g : spec.groups)
    for (Index s : g.block_sizes) {
      for (Index i = 0; i < s; ++i) {
        a(at + i, at + i) = g.eigenvalue;
        if (i + 1 < s) a(at + i, at + i + 1) = 1.0;
      }
      at += s;
    }
  return a;
}

struct RowSpecBlock {
  Index height = 0;
  std::vector<Index> rows;  // 1-based, ascending, within the block
};

struct RowSpec {
  std::vector<RowSpecBlock> blocks;
};

inline void validate(const RowSpec& spec) {
  if (spec.blocks.empty()) throw InvalidInputError("RowSpec: no blocks");
  for (const RowSpecBlock& b : spec.blocks) {
    if (b.height < 1) throw InvalidInputError("RowSpec: block height must be >= 1");
    Index prev = 0;
    for (Index r : b.rows) {
      if (r <= prev) throw InvalidInputError("RowSpec: row indices must be ascending");
      if (r > b.height) throw InvalidInputError("RowSpec: row index out of range");
      prev = r;
    }
  }
}

inline Index total_height(const RowSpec& spec) {
  Index h = 0;
  for (const RowSpecBlock& b : spec.blocks) h += b.height;
  return h;
}

// rho = the largest independent-row count demanded by any block.
inline Index rho(const RowSpec& spec) {
  Index r = 0;
  for (const RowSpecBlock& b : spec.blocks)
    r = std::max(r, static_cast<Index>(b.rows.size()));
  return r;
}

// Last row of each Jordan block, grouped per eigenvalue: exactly the rows of
// B that must stay independent for (A, B) to be controllable.
inline RowSpec jordan_row_spec(const JordanSpec& spec) {
  validate(spec);
  RowSpec out;
  for (const JordanGroup& g : spec.groups) {
    RowSpecBlock block;
    Index at = 0;
    for (Index s : g.block_sizes) {
      at += s;
      block.rows.push_back(at);
    }
    block.height = at;
    out.blocks.push_back(std::move(block));
  }
  return out;
}

namespace detail {

inline std::vector<Index> block_offsets(const RowSpec& spec) {
  std::vector<Index> offs;
  Index at = 0;
  for (const RowSpecBlock& b : spec.blocks) {
    offs.push_back(at);
    at += b.height;
  }
  return offs;
}

inline CMatrix spec_rows(const CMatrix& b, const RowSpecBlock& block, Index offset) {
  CMatrix sub(static_cast<Index>(block.rows.size()), b.cols());
  for (size_t i = 0; i < block.rows.size(); ++i)
    sub.row(static_cast<Index>(i)) = b.row(offset + block.rows[i] - 1);
  return sub;
}

}  // namespace detail

inline bool check_row_spec(const CMatrix& b, const RowSpec& spec,
                           const Tolerances& tol = {}) {
  validate(spec);
  if (b.rows() != total_height(spec))
    throw DimensionError("check_row_spec: row count does not match spec height");
  require_finite(b, "check_row_spec");
  const std::vector<Index> offs = detail::block_offsets(spec);
  for (size_t k = 0; k < spec.blocks.size(); ++k) {
    const RowSpecBlock& block = spec.blocks[k];
    if (block.rows.empty()) continue;
    const CMatrix sub = detail::spec_rows(b, block, offs[k]);
    if (numeric_rank(sub, tol) < sub.rows()) return false;
  }
  return true;
}

// Echelon pattern over the spec rows of each block: every listed row has a
// pivot above rank_rel * row norm, later rows pivot strictly further right,
// and entries left of a pivot sit below that scale.
inline bool is_block_echelon(const CMatrix& b, const RowSpec& spec,
                             const Tolerances& tol = {}) {
  validate(spec);
  if (b.rows() != total_height(spec))
    throw DimensionError("is_block_echelon: row count does not match spec height");
  const std::vector<Index> offs = detail::block_offsets(spec);
  for (size_t k = 0; k < spec.blocks.size(); ++k) {
    Index prev_pivot = -1;
    for (Index r : spec.blocks[k].rows) {
      const auto row = b.row(offs[k] + r - 1);
      const double cut = tol.rank_rel * row.norm();
      Index pivot = -1;
      for (Index j = 0; j < b.cols(); ++j)
        if (std::abs(row(j)) > cut) {
          pivot = j;
          break;
        }
      if (pivot < 0 || pivot <= prev_pivot) return false;
      prev_pivot = pivot;
    }
  }
  return true;
}

struct EchelonReduction {
  CMatrix U;        // block-diagonal unitary, blocks sized as the spec heights
  CMatrix B_tilde;  // U* B, spec rows in echelon form
};

// Unitary reduction bringing each block's spec rows to echelon form.  The
// pivot columns are the leftmost independent columns of the spec-row
// submatrix; a QR factor of that square selection is embedded at the spec
// row positions, so non-spec rows pass through untouched.
inline EchelonReduction block_echelon_reduce(const CMatrix& b, const RowSpec& spec,
                                             const Tolerances& tol = {}) {
  if (!check_row_spec(b, spec, tol))
    throw PreconditionError("block_echelon_reduce: B violates the row spec");
  EchelonReduction out;
  out.U = CMatrix::Identity(b.rows(), b.rows());
  out.B_tilde = b;
  const std::vector<Index> offs = detail::block_offsets(spec);
  for (size_t k = 0; k < spec.blocks.size(); ++k) {
    const RowSpecBlock& block = spec.blocks[k];
    const Index rows = static_cast<Index>(block.rows.size());
    if (rows == 0) continue;
    const CMatrix sub = detail::spec_rows(b, block, offs[k]);

    std::vector<Index> picked;
    for (Index j = 0; j < sub.cols() && static_cast<Index>(picked.size()) < rows; ++j) {
      CMatrix trial(rows, static_cast<Index>(picked.size()) + 1);
      for (size_t t = 0; t < picked.size(); ++t)
        trial.col(static_cast<Index>(t)) = sub.col(picked[t]);
      trial.col(static_cast<Index>(picked.size())) = sub.col(j);
      if (numeric_rank(trial, tol) == trial.cols()) picked.push_back(j);
    }
    if (static_cast<Index>(picked.size()) < rows)
      throw NumericalBreakdownError("block_echelon_reduce: no independent column set");

    CMatrix selection(rows, rows);
    for (size_t t = 0; t < picked.size(); ++t)
      selection.col(static_cast<Index>(t)) = sub.col(picked[t]);
    Eigen::HouseholderQR<CMatrix> qr(selection);
    const CMatrix q = qr.householderQ();

    for (Index i = 0; i < rows; ++i) {
      const Index gi = offs[k] + block.rows[static_cast<size_t>(i)] - 1;
      for (Index j = 0; j < rows; ++j) {
        const Index gj = offs[k] + block.rows[static_cast<size_t>(j)] - 1;
        out.U(gi, gj) = q(i, j);
      }
      out.B_tilde.row(gi) = (q.col(i).adjoint() * sub).row(0);
    }
  }
  return out;
}

// Full-rank T with B T still satisfying the spec: identity when it already
// fits, otherwise a verified random draw.
inline CMatrix build_selector_T(const CMatrix& b, const RowSpec& spec,
                                const Tolerances& tol = {}, std::uint64_t seed = 0) {
  if (!check_row_spec(b, spec, tol))
    throw PreconditionError("build_selector_T: B violates the row spec");
  const Index r = rho(spec);
  const Index m = b.cols();
  if (m < r)
    throw PreconditionError("build_selector_T: B has fewer columns than rho");
  if (m == r) {
    const CMatrix eye = CMatrix::Identity(m, r);
    if (check_row_spec(b * eye, spec, tol)) return eye;
  }
  Rng rng(mix_seed(seed, 0x7e5ec70e));
  for (int attempt = 0; attempt < tol.max_retries; ++attempt) {
    const CMatrix t = rng.gaussian_matrix(m, r);
    if (numeric_rank(t, tol) == r && check_row_spec(b * t, spec, tol)) return t;
  }
  throw NumericalBreakdownError("build_selector_T: no valid selector found");
}

inline CMatrix sample_controllable_B(const JordanSpec& spec, Index m,
                                     std::uint64_t seed = 0,
                                     const Tolerances& tol = {}) {
  const RowSpec rows = jordan_row_spec(spec);
  if (m < rho(rows))
    throw PreconditionError("sample_controllable_B: m is below rho of the spec");
  Rng rng(mix_seed(seed, 0x5a8b17c3));
  for (int attempt = 0; attempt < tol.max_retries; ++attempt) {
    const CMatrix b = rng.gaussian_matrix(total_height(rows), m);
    if (check_row_spec(b, rows, tol)) return b;
  }
  throw NumericalBreakdownError("sample_controllable_B: retries exhausted");
}

}  // namespace rlab
