#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rlab {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Bad dimensions, violated preconditions, malformed data.  The CLI maps
// these to exit code 2.
struct InvalidInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DimensionError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

struct PreconditionError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

// Retry exhaustion or a violated internal invariant; exit code 3 in the CLI.
struct NumericalBreakdownError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double rank_rel = 1e-9;   // relative SVD cutoff for numeric rank
  double eig_match = 1e-6;  // eigenvalue matching distance, scaled by matrix 1-norm
  int max_retries = 32;     // epsilon halvings / eta doublings / redraws
};

struct Spectrum {
  std::vector<Complex> values;  // sorted by (re, im); one entry per dimension
  Index source_dim = 0;
  double scale = 1.0;  // 1 + ||source||_1; scales matching tolerances
};

struct EigenCluster {
  Complex representative;  // centroid of the clustered eigenvalues
  int algebraic = 0;
  int geometric = 0;
  double diameter = 0.0;
};

struct EigenClusters {
  std::vector<EigenCluster> clusters;  // sorted by representative (re, im)
  double radius = 0.0;                 // linkage distance used
  bool ill_conditioned = false;        // a diameter exceeded 10x the radius
};

inline double one_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

inline double norm_scale(const CMatrix& m) { return 1.0 + one_norm(m); }

inline void require_finite(const CMatrix& m, const std::string& label) {
  if (!m.allFinite()) throw InvalidInputError(label + ": non-finite entry");
}

// Deterministic stream of standard complex Gaussians (unit total variance).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  Complex gaussian() {
    const double re = normal_(eng_);
    const double im = normal_(eng_);
    return {re * kInvSqrt2, im * kInvSqrt2};
  }

  CMatrix gaussian_matrix(Index rows, Index cols) {
    CMatrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) m(i, j) = gaussian();
    return m;
  }

  double uniform() { return uniform_(eng_); }

  std::uint64_t integer() { return eng_(); }

  // Uniform draw from {0, ..., bound - 1}.
  std::uint64_t integer(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(eng_);
  }

 private:
  static constexpr double kInvSqrt2 = 0.70710678118654752;
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Splits one user-facing seed into independent per-purpose streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace rlab
