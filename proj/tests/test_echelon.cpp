#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rlab/echelon.hpp"
#include "rlab/minimality.hpp"
#include "support/systems.hpp"

using namespace rlab;

namespace {

const Tolerances kTol{};

JordanSpec seventeen_state_spec() {
  JordanSpec spec;
  spec.groups.push_back({Complex(1.0), {2, 2, 2}});
  spec.groups.push_back({Complex(2.0), {3, 1}});
  spec.groups.push_back({Complex(3.0), {4, 1, 1, 1}});
  return spec;
}

RowSpec seventeen_row_spec() { return jordan_row_spec(seventeen_state_spec()); }

}  // namespace

TEST_CASE("jordan_matrix lays out blocks along the diagonal") {
  JordanSpec spec;
  spec.groups.push_back({Complex(0.0), {2}});
  spec.groups.push_back({Complex(3.0), {1}});
  const CMatrix a = jordan_matrix(spec);
  REQUIRE(a.rows() == 3);
  CHECK(a(0, 0) == Complex(0.0));
  CHECK(a(0, 1) == Complex(1.0));
  CHECK(a(1, 1) == Complex(0.0));
  CHECK(a(1, 2) == Complex(0.0));
  CHECK(a(2, 2) == Complex(3.0));
}

TEST_CASE("JordanSpec validation") {
  JordanSpec spec;
  spec.groups.push_back({Complex(1.0), {2}});
  spec.groups.push_back({Complex(1.0), {1}});
  CHECK_THROWS_AS(validate(spec), InvalidInputError);
  spec.groups[1].eigenvalue = 2.0;
  CHECK_NOTHROW(validate(spec));
  spec.groups[1].block_sizes = {0};
  CHECK_THROWS_AS(validate(spec), InvalidInputError);
  CHECK_THROWS_AS(validate(JordanSpec{}), InvalidInputError);
}

TEST_CASE("jordan_row_spec lists the last row of every block") {
  SECTION("single 3x3 block") {
    JordanSpec spec;
    spec.groups.push_back({Complex(0.0), {3}});
    const RowSpec rows = jordan_row_spec(spec);
    REQUIRE(rows.blocks.size() == 1);
    CHECK(rows.blocks[0].height == 3);
    CHECK(rows.blocks[0].rows == std::vector<Index>{3});
    CHECK(rho(rows) == 1);
  }
  SECTION("17-state structure") {
    const RowSpec rows = seventeen_row_spec();
    REQUIRE(rows.blocks.size() == 3);
    CHECK(rows.blocks[0].height == 6);
    CHECK(rows.blocks[0].rows == std::vector<Index>{2, 4, 6});
    CHECK(rows.blocks[1].height == 4);
    CHECK(rows.blocks[1].rows == std::vector<Index>{3, 4});
    CHECK(rows.blocks[2].height == 7);
    CHECK(rows.blocks[2].rows == std::vector<Index>{4, 5, 6, 7});
    CHECK(rho(rows) == 4);
    CHECK(total_height(rows) == 17);
  }
  SECTION("scalar blocks demand every row") {
    JordanSpec spec;
    spec.groups.push_back({Complex(4.0), {1, 1, 1}});
    const RowSpec rows = jordan_row_spec(spec);
    CHECK(rows.blocks[0].rows == std::vector<Index>{1, 2, 3});
    CHECK(rho(rows) == 3);
  }
}

TEST_CASE("RowSpec validation") {
  RowSpec spec;
  spec.blocks.push_back({3, {1, 3}});
  CHECK_NOTHROW(validate(spec));
  spec.blocks[0].rows = {3, 1};
  CHECK_THROWS_AS(validate(spec), InvalidInputError);
  spec.blocks[0].rows = {1, 4};
  CHECK_THROWS_AS(validate(spec), InvalidInputError);
}

TEST_CASE("check_row_spec basic verdicts") {
  RowSpec spec;
  spec.blocks.push_back({3, {1, 3}});
  CMatrix b = CMatrix::Zero(3, 2);
  b(0, 0) = 1.0;
  b(2, 1) = 1.0;
  CHECK(check_row_spec(b, spec, kTol));
  b(2, 1) = 0.0;  // listed row becomes zero
  CHECK_FALSE(check_row_spec(b, spec, kTol));
  CHECK_THROWS_AS(check_row_spec(CMatrix::Zero(4, 2), spec, kTol),
                  DimensionError);
}

TEST_CASE("row spec captures controllability of Jordan-structured pairs") {
  Rng rng(mix_seed(4401, 0));
  for (int trial = 0; trial < 200; ++trial) {
    JordanSpec spec;
    const int groups = 1 + static_cast<int>(rng.integer(3));
    const auto eigs = testsup::separated_points(rng, groups);
    Index n = 0;
    for (int g = 0; g < groups; ++g) {
      std::vector<Index> blocks;
      const int nb = 1 + static_cast<int>(rng.integer(2));
      for (int i = 0; i < nb; ++i) {
        const Index s = 1 + static_cast<Index>(rng.integer(2));
        blocks.push_back(s);
        n += s;
      }
      spec.groups.push_back({eigs[static_cast<size_t>(g)], blocks});
      if (n > 8) break;
    }
    const RowSpec rows = jordan_row_spec(spec);
    const Index m = 1 + static_cast<Index>(rng.integer(3));
    const CMatrix b = rng.gaussian_matrix(total_height(rows), m);
    const bool by_spec = check_row_spec(b, rows, kTol);
    const bool by_pbh = pbh_controllable(jordan_matrix(spec), b, kTol).ok;
    CHECK(by_spec == by_pbh);
  }
}

TEST_CASE("is_block_echelon pattern predicate") {
  RowSpec spec;
  spec.blocks.push_back({2, {1, 2}});
  CMatrix good(2, 3);
  good << Complex(1.0), Complex(5.0), Complex(2.0), Complex(0.0), Complex(3.0),
      Complex(1.0);
  CHECK(is_block_echelon(good, spec, kTol));
  CMatrix bad = good;
  bad(1, 0) = 1.0;  // pivot no longer strictly to the right
  CHECK_FALSE(is_block_echelon(bad, spec, kTol));
}

TEST_CASE("block_echelon_reduce on conforming random matrices") {
  const RowSpec spec = seventeen_row_spec();
  Rng rng(mix_seed(4402, 0));
  for (int trial = 0; trial < 20; ++trial) {
    const Index m = 5 + static_cast<Index>(rng.integer(4));
    CMatrix b = rng.gaussian_matrix(17, m);
    REQUIRE(check_row_spec(b, spec, kTol));
    const EchelonReduction red = block_echelon_reduce(b, spec, kTol);
    CHECK((red.U.adjoint() * red.U - CMatrix::Identity(17, 17)).norm() < 1e-10);
    CHECK((b - red.U * red.B_tilde).norm() < 1e-9 * b.norm());
    CHECK(is_block_echelon(red.B_tilde, spec, kTol));
    // Rows outside the listed sets pass through untouched.
    CHECK((red.B_tilde.row(0) - b.row(0)).norm() < 1e-12 * b.norm());
    CHECK((red.B_tilde.row(6) - b.row(6)).norm() < 1e-12 * b.norm());
  }
}

TEST_CASE("block_echelon_reduce handles the single-block 6-row case") {
  RowSpec spec;
  spec.blocks.push_back({6, {2, 4, 6}});
  Rng rng(mix_seed(4403, 0));
  const CMatrix b = rng.gaussian_matrix(6, 4);
  const EchelonReduction red = block_echelon_reduce(b, spec, kTol);
  CHECK(is_block_echelon(red.B_tilde, spec, kTol));
  CHECK((b - red.U * red.B_tilde).norm() < 1e-9 * b.norm());
}

TEST_CASE("block_echelon_reduce keeps an already-echelon input in pattern") {
  RowSpec spec;
  spec.blocks.push_back({3, {1, 2, 3}});
  CMatrix b = CMatrix::Zero(3, 3);
  b(0, 0) = 2.0;
  b(0, 2) = 1.0;
  b(1, 1) = 3.0;
  b(2, 2) = -1.0;
  const EchelonReduction red = block_echelon_reduce(b, spec, kTol);
  CHECK(is_block_echelon(red.B_tilde, spec, kTol));
  CHECK((b - red.U * red.B_tilde).norm() < 1e-9 * b.norm());
}

TEST_CASE("block_echelon_reduce rejects spec violations") {
  RowSpec spec;
  spec.blocks.push_back({2, {1, 2}});
  CHECK_THROWS_AS(block_echelon_reduce(CMatrix::Zero(2, 2), spec, kTol),
                  PreconditionError);
}

TEST_CASE("echelon reduction with dependent leading columns") {
  // Leading columns of the listed rows coincide, so the pivot search must
  // skip to a later column instead of emitting equal pivots.
  RowSpec spec;
  spec.blocks.push_back({2, {1, 2}});
  CMatrix b(2, 3);
  b << Complex(0.0), Complex(1.0), Complex(2.0), Complex(0.0), Complex(1.0),
      Complex(5.0);
  REQUIRE(check_row_spec(b, spec, kTol));
  const EchelonReduction red = block_echelon_reduce(b, spec, kTol);
  CHECK(is_block_echelon(red.B_tilde, spec, kTol));
  CHECK((b - red.U * red.B_tilde).norm() < 1e-9 * b.norm());
}

TEST_CASE("build_selector_T produces a verified full-rank selector") {
  const RowSpec spec = seventeen_row_spec();
  Rng rng(mix_seed(4404, 0));
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix b = rng.gaussian_matrix(17, 8);
    REQUIRE(check_row_spec(b, spec, kTol));
    const CMatrix t = build_selector_T(b, spec, kTol, rng.integer());
    REQUIRE(t.rows() == 8);
    REQUIRE(t.cols() == 4);
    CHECK(numeric_rank(t, kTol) == 4);
    CHECK(check_row_spec(b * t, spec, kTol));
  }
}

TEST_CASE("build_selector_T returns the identity when m equals rho") {
  RowSpec spec;
  spec.blocks.push_back({2, {1, 2}});
  Rng rng(mix_seed(4405, 0));
  const CMatrix b = rng.gaussian_matrix(2, 2);
  const CMatrix t = build_selector_T(b, spec, kTol, 7);
  CHECK((t - CMatrix::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("structured unit-vector selector validates for some scalars") {
  // (e1 | e4 + g*e5 | e6 | e8 + d*e9) is full rank for every g, d; for a
  // conforming B some scalar choice keeps the selected rows independent.
  const RowSpec spec = seventeen_row_spec();
  Rng rng(mix_seed(4406, 0));
  const CMatrix b = rng.gaussian_matrix(17, 9);
  REQUIRE(check_row_spec(b, spec, kTol));
  bool validated = false;
  for (const auto& [g, d] :
       {std::pair{0.0, 0.0}, {1.0, 1.0}, {1.0, -1.0}, {2.0, 3.0}}) {
    CMatrix t = CMatrix::Zero(9, 4);
    t(0, 0) = 1.0;
    t(3, 1) = 1.0;
    t(4, 1) = g;
    t(5, 2) = 1.0;
    t(7, 3) = 1.0;
    t(8, 3) = d;
    REQUIRE(numeric_rank(t, kTol) == 4);
    if (check_row_spec(b * t, spec, kTol)) {
      validated = true;
      break;
    }
  }
  CHECK(validated);
}

TEST_CASE("sample_controllable_B respects the rho lower bound") {
  const JordanSpec spec = seventeen_state_spec();
  CHECK_THROWS_AS(sample_controllable_B(spec, 3, 1), PreconditionError);
  SECTION("m = rho pins the rank to alpha") {
    const CMatrix b = sample_controllable_B(spec, 4, 11);
    CHECK(numeric_rank(b, kTol) == 4);
    CHECK(pbh_controllable(jordan_matrix(spec), b, kTol).ok);
  }
  SECTION("square draw reaches full rank") {
    const CMatrix b = sample_controllable_B(spec, 17, 12);
    CHECK(numeric_rank(b, kTol) == 17);
  }
  SECTION("single nilpotent block needs a nonzero last entry") {
    JordanSpec small;
    small.groups.push_back({Complex(0.0), {2}});
    const CMatrix b = sample_controllable_B(small, 1, 3);
    CHECK(std::abs(b(1, 0)) > 0.0);
  }
}
