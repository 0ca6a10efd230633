#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "rlab/numeric.hpp"
#include "rlab/realization.hpp"
#include "support/matchers.hpp"
#include "support/systems.hpp"

using namespace rlab;
using testsup::multiset_close;

namespace {
const Tolerances kTol{};
}

TEST_CASE("spectrum of diagonal matrix is its diagonal, sorted") {
  CMatrix a = CMatrix::Zero(3, 3);
  a(0, 0) = Complex(5.0, 0.0);
  a(1, 1) = Complex(-1.0, 2.0);
  a(2, 2) = Complex(-1.0, -2.0);
  const Spectrum s = spectrum(a);
  REQUIRE(s.values.size() == 3);
  CHECK(std::abs(s.values[0] - Complex(-1.0, -2.0)) < 1e-12);
  CHECK(std::abs(s.values[1] - Complex(-1.0, 2.0)) < 1e-12);
  CHECK(std::abs(s.values[2] - Complex(5.0, 0.0)) < 1e-12);
  CHECK(s.source_dim == 3);
}

TEST_CASE("spectrum rejects non-square input") {
  CHECK_THROWS_AS(spectrum(CMatrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("coupled pair system matrix spectra for pinned couplings") {
  // spect(L) = {0, 2, 1 +/- sqrt(4 + d2*d3)}.
  SECTION("d2 = d3 = 0") {
    const auto sm = assemble_system_matrix(testsup::coupled_pair(0.0, 0.0));
    CHECK(multiset_close(spectrum(sm.L).values,
                         {Complex(0), Complex(2), Complex(3), Complex(-1)},
                         1e-9));
  }
  SECTION("d2 = d3 = 1") {
    const auto sm = assemble_system_matrix(testsup::coupled_pair(1.0, 1.0));
    const double r = std::sqrt(5.0);
    CHECK(multiset_close(
        spectrum(sm.L).values,
        {Complex(0), Complex(2), Complex(1.0 + r), Complex(1.0 - r)}, 1e-9));
  }
  SECTION("d2 = 2, d3 = -1") {
    const auto sm = assemble_system_matrix(testsup::coupled_pair(2.0, -1.0));
    const double r = std::sqrt(2.0);
    CHECK(multiset_close(
        spectrum(sm.L).values,
        {Complex(0), Complex(2), Complex(1.0 + r), Complex(1.0 - r)}, 1e-9));
  }
}

TEST_CASE("spectrum is similarity invariant") {
  Rng rng(mix_seed(4101, 0));
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.integer(5));
    const CMatrix a = rng.gaussian_matrix(n, n);
    const CMatrix t = testsup::well_conditioned(rng, n);
    const CMatrix b = t * a * t.partialPivLu().inverse();
    CHECK(multiset_close(spectrum(a).values, spectrum(b).values,
                         1e-6 * norm_scale(a)));
  }
}

TEST_CASE("numeric_rank basic cases") {
  CHECK(numeric_rank(CMatrix::Zero(3, 4), kTol) == 0);
  CHECK(numeric_rank(CMatrix::Identity(4, 4), kTol) == 4);
  CMatrix uv = CMatrix::Zero(3, 3);
  const CVector u = (CVector(3) << 1.0, 2.0, -1.0).finished();
  const CVector v = (CVector(3) << 0.5, 0.0, 3.0).finished();
  uv = u * v.adjoint();
  CHECK(numeric_rank(uv, kTol) == 1);
}

TEST_CASE("numeric_rank matches constructed singular values") {
  Rng rng(mix_seed(4102, 0));
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 3 + static_cast<Index>(rng.integer(4));
    const Index r = 1 + static_cast<Index>(rng.integer(n));
    CMatrix s = CMatrix::Zero(n, n);
    for (Index i = 0; i < r; ++i)
      s(i, i) = Complex(0.1 + rng.uniform(), 0.0);
    const CMatrix m =
        testsup::random_unitary(rng, n) * s * testsup::random_unitary(rng, n);
    CHECK(numeric_rank(m, kTol) == r);
  }
}

TEST_CASE("bordered matrix of the tall system drops rank at zero") {
  // [[lambda*I - A, B], [C, D]] at lambda = 0 is 4x3 of rank 2 with null
  // vector parallel to (-1, 1, -1): rows two and four coincide there.
  const Realization r = testsup::tall_two_output();
  CMatrix bordered(4, 3);
  bordered << -r.A, r.B, r.C, r.D;
  CHECK(numeric_rank(bordered, kTol) == 2);
  const CMatrix ns = null_space(bordered, kTol);
  REQUIRE(ns.cols() == 1);
  CVector want(3);
  want << Complex(-1.0), Complex(1.0), Complex(-1.0);
  CHECK(testsup::parallel_within(ns.col(0), want, 1e-9));
}

TEST_CASE("null_space dimension and residual") {
  Rng rng(mix_seed(4103, 0));
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 3 + static_cast<Index>(rng.integer(4));
    const CVector u = rng.gaussian_matrix(n, 1);
    const CVector v = rng.gaussian_matrix(n, 1);
    const CMatrix m = u * v.adjoint();
    const CMatrix ns = null_space(m, kTol);
    REQUIRE(ns.cols() == n - 1);
    CHECK((m * ns).norm() < 1e-9 * (1.0 + m.norm()));
    CHECK((ns.adjoint() * ns - CMatrix::Identity(n - 1, n - 1)).norm() < 1e-9);
  }
}

TEST_CASE("null_space of full-rank matrix is empty") {
  const CMatrix ns = null_space(CMatrix::Identity(3, 3), kTol);
  CHECK(ns.cols() == 0);
}

TEST_CASE("cluster_eigenvalues separates and counts multiplicities") {
  SECTION("diagonal with repeated entry") {
    CMatrix a = CMatrix::Zero(3, 3);
    a(0, 0) = Complex(2.0);
    a(1, 1) = Complex(2.0);
    a(2, 2) = Complex(5.0);
    const EigenClusters ec = cluster_eigenvalues(a, kTol);
    REQUIRE(ec.clusters.size() == 2);
    CHECK(std::abs(ec.clusters[0].representative - Complex(2.0)) < 1e-9);
    CHECK(ec.clusters[0].algebraic == 2);
    CHECK(ec.clusters[0].geometric == 2);
    CHECK(ec.clusters[1].algebraic == 1);
    CHECK(ec.clusters[1].geometric == 1);
  }
  SECTION("single Jordan block has geometric multiplicity one") {
    CMatrix j = Complex(7.0) * CMatrix::Identity(2, 2);
    j(0, 1) = Complex(1.0);
    const EigenClusters ec = cluster_eigenvalues(j, kTol);
    REQUIRE(ec.clusters.size() == 1);
    CHECK(ec.clusters[0].algebraic == 2);
    CHECK(ec.clusters[0].geometric == 1);
  }
}

TEST_CASE("cluster_eigenvalues merges numerically coincident values") {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = Complex(1.0);
  a(1, 1) = Complex(1.0 + 1e-12);
  const EigenClusters ec = cluster_eigenvalues(a, kTol);
  REQUIRE(ec.clusters.size() == 1);
  CHECK(ec.clusters[0].algebraic == 2);
}

TEST_CASE("scalar and matrix polynomial evaluation agree with Horner") {
  const std::vector<Complex> coeffs = {Complex(3.0), Complex(0.0),
                                       Complex(-1.0), Complex(2.0)};
  // psi(s) = 3 - s^2 + 2 s^3.
  const Complex s(1.0, 1.0);
  const Complex want = Complex(3.0) - s * s + Complex(2.0) * s * s * s;
  CHECK(std::abs(scalar_polynomial(coeffs, s) - want) < 1e-12);

  Rng rng(mix_seed(4104, 0));
  const CMatrix m = rng.gaussian_matrix(4, 4);
  const CMatrix pm = matrix_polynomial(coeffs, m);
  const CMatrix direct = Complex(3.0) * CMatrix::Identity(4, 4) - m * m +
                         Complex(2.0) * m * m * m;
  CHECK((pm - direct).norm() < 1e-10 * (1.0 + direct.norm()));
}

TEST_CASE("matrix_polynomial of degree zero is a scalar multiple of I") {
  const CMatrix pm =
      matrix_polynomial({Complex(4.0, -1.0)}, CMatrix::Random(3, 3));
  CHECK((pm - Complex(4.0, -1.0) * CMatrix::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("matrix polynomial transports eigenvalues") {
  Rng rng(mix_seed(4105, 0));
  const std::vector<Complex> coeffs = {Complex(1.0), Complex(-2.0),
                                       Complex(0.5)};
  for (int trial = 0; trial < 50; ++trial) {
    const CMatrix m = rng.gaussian_matrix(4, 4);
    std::vector<Complex> mapped;
    for (const Complex& lam : spectrum(m).values)
      mapped.push_back(scalar_polynomial(coeffs, lam));
    CHECK(multiset_close(spectrum(matrix_polynomial(coeffs, m)).values, mapped,
                         1e-6 * norm_scale(m) * norm_scale(m)));
  }
}

TEST_CASE("spectra_intersect on pinned spectra") {
  const Spectrum s1 = make_spectrum({Complex(0.0), Complex(2.0)});
  const Spectrum s2 = make_spectrum({Complex(3.0), Complex(-1.0)});
  const Spectrum s3 =
      make_spectrum({Complex(0.0), Complex(2.0), Complex(3.0), Complex(-1.0)});
  CHECK(spectra_intersect(s1, s2, kTol).empty());
  const auto hits = spectra_intersect(s1, s3, kTol);
  REQUIRE(hits.size() == 2);
  CHECK(std::abs(hits[0].left - Complex(0.0)) < 1e-12);
  CHECK(std::abs(hits[1].left - Complex(2.0)) < 1e-12);
}

TEST_CASE("spectra_intersect tolerates perturbation within the cut") {
  const Spectrum s1 = make_spectrum({Complex(1.0)});
  const Spectrum s2 = make_spectrum({Complex(1.0 + 1e-9)});
  const auto hits = spectra_intersect(s1, s2, kTol);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].distance < 1e-8);
}

TEST_CASE("spectra_intersect pairs each value at most once") {
  const Spectrum s1 = make_spectrum({Complex(0.0), Complex(0.0)});
  const Spectrum s2 = make_spectrum({Complex(0.0)});
  CHECK(spectra_intersect(s1, s2, kTol).size() == 1);
}
