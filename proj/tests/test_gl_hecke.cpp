#include <gtest/gtest.h>

#include "hecke/gl.hpp"
#include "oracles.hpp"

using namespace hecke;

TEST(GlRationality, RankTwoThroughX5) {
  for (std::int64_t p : {2, 3, 5}) {
    const Report rep = gl::verify_rationality(2, p, 5);
    EXPECT_TRUE(rep.passed()) << rep.to_text();
    EXPECT_EQ(rep.checks.size(), 6u);
  }
}

TEST(GlRationality, RankThreeAtTwoThroughX3) {
  const Report rep = gl::verify_rationality(3, 2, 3);
  EXPECT_TRUE(rep.passed()) << rep.to_text();
}

TEST(GlRationality, OtherRanksAndPrimes) {
  EXPECT_TRUE(gl::verify_rationality(1, 7, 6).passed());
  EXPECT_TRUE(gl::verify_rationality(2, 7, 3).passed());
  EXPECT_TRUE(gl::verify_rationality(3, 3, 2).passed());
  EXPECT_TRUE(gl::verify_rationality(4, 2, 2).passed());
}

TEST(GlRationality, WrongPolynomialIsCaught) {
  gl::Ring ring(gl::System(2, 3));
  auto f = gl::f_poly(ring, 3);
  f[2] = PInt(2) * f[2];
  const auto prod = ring.series_mul(f, ring.series(3));
  EXPECT_FALSE((prod[2] - gl::Hecke{}).is_zero());
  EXPECT_THROW(gl::verify_rationality(ring, 0), std::invalid_argument);
}

TEST(GlDegrees, ElementaryDegreesMatchSubspaceCount) {
  for (int r = 1; r <= 3; ++r)
    for (std::int64_t p : {2, 3, 5}) {
      gl::Ring ring(gl::System(r, p));
      for (int i = 0; i <= r; ++i) {
        const PInt deg = ring.degree(gl::t_elementary(r, i));
        EXPECT_EQ(deg, PInt(oracle::count_subspaces(r, p, i))) << "r=" << r << " p=" << p << " i=" << i;
        EXPECT_EQ(deg, gaussian_binomial(r, i, p));
      }
    }
}

TEST(GlDegrees, LevelSizesMatchSublatticeCount) {
  for (std::int64_t p : {2, 3}) {
    gl::System sys(2, p);
    for (int v = 0; v <= (p == 2 ? 3 : 2); ++v)
      EXPECT_EQ(sys.left_coset_count(v), oracle::count_sublattices(2, p, v, 2));
  }
}

TEST(GlStructureConstants, T1pSquaredMatchesBruteForce) {
  for (std::int64_t p : {2, 3, 5}) {
    const auto brute = oracle::t1p_squared(p);
    ASSERT_TRUE(brute.uniform);
    EXPECT_EQ(brute.left_cosets_of_t1p, static_cast<std::size_t>(p + 1));
    EXPECT_EQ(brute.coeff_1_p2, 1);
    EXPECT_EQ(brute.coeff_p_p, p + 1);

    gl::Ring ring(gl::System(2, p));
    const gl::Key t{{0, 1}};
    const auto prod = ring.key_product(t, t);
    EXPECT_EQ(prod, gl::Hecke::basis(gl::Key{{0, 2}}, brute.coeff_1_p2) +
                        gl::Hecke::basis(gl::Key{{1, 1}}, brute.coeff_p_p));
  }
}

TEST(GlStructureConstants, ScalarMatrixIsCentralAndShifts) {
  for (std::int64_t p : {2, 3}) {
    gl::Ring ring(gl::System(2, p));
    const gl::Key scalar{{1, 1}};
    for (int v = 0; v <= 3; ++v)
      for (const auto& k : ring.system().all_doubles(v)) {
        const gl::Key shifted{{k.exps[0] + 1, k.exps[1] + 1}};
        EXPECT_EQ(ring.key_product(scalar, k), gl::Hecke::basis(shifted));
        EXPECT_EQ(ring.key_product(k, scalar), gl::Hecke::basis(shifted));
      }
  }
}

TEST(GlStructureConstants, RingIsCommutative) {
  for (std::int64_t p : {2, 3}) {
    gl::Ring ring(gl::System(2, p));
    std::vector<gl::Key> keys;
    for (int v = 0; v <= 3; ++v)
      for (const auto& k : ring.system().all_doubles(v)) keys.push_back(k);
    for (const auto& a : keys)
      for (const auto& b : keys) EXPECT_EQ(ring.key_product(a, b), ring.key_product(b, a));
  }
  gl::Ring r3(gl::System(3, 2));
  const gl::Key a{{0, 0, 1}}, b{{0, 1, 1}};
  EXPECT_EQ(r3.key_product(a, b), r3.key_product(b, a));
}

TEST(GlSeries, LowRows) {
  gl::Ring ring(gl::System(2, 3));
  const auto s = ring.series(2);
  EXPECT_EQ(s[0], ring.unit());
  EXPECT_EQ(s[1], gl::Hecke::basis(gl::Key{{0, 1}}));
  EXPECT_EQ(s[2], gl::Hecke::basis(gl::Key{{0, 2}}) + gl::Hecke::basis(gl::Key{{1, 1}}));
}

TEST(GlSystem, DoubleKeysAndRepresentatives) {
  gl::System sys(3, 2);
  EXPECT_EQ(sys.all_doubles(2), (std::vector<gl::Key>{gl::Key{{0, 0, 2}}, gl::Key{{0, 1, 1}}}));
  for (int v = 0; v <= 3; ++v)
    for (const auto& k : sys.all_doubles(v)) {
      EXPECT_EQ(sys.double_key(sys.representative(k)), k);
      for (const auto& h : *sys.left_cosets(k)) EXPECT_EQ(sys.double_key(h), k);
    }
  EXPECT_THROW(sys.left_cosets(gl::Key{{1, 0, 0}}), std::invalid_argument);
  EXPECT_THROW(sys.left_cosets(gl::Key{{0, 1}}), std::invalid_argument);
  EXPECT_THROW(gl::System(2, 6), std::invalid_argument);
}

TEST(GlCodec, RoundTripAndValidation) {
  const gl::Key k{{0, 1, 3}};
  EXPECT_EQ(KeyCodec<gl::Key>::decode(KeyCodec<gl::Key>::encode(k)), k);
  EXPECT_EQ(KeyCodec<gl::Key>::decode(json::parse("[0,2]")), (gl::Key{{0, 2}}));
  EXPECT_THROW(KeyCodec<gl::Key>::decode(json::parse("[2,0]")), std::invalid_argument);
  EXPECT_THROW(KeyCodec<gl::Key>::decode(json::parse("[-1,2]")), std::invalid_argument);
}
