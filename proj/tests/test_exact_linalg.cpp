#include <gtest/gtest.h>

#include <limits>
#include <set>

#include "generators.hpp"
#include "hecke/integer.hpp"
#include "hecke/matrix.hpp"
#include "hecke/normal_form.hpp"
#include "oracles.hpp"

using namespace hecke;

namespace {

PInt cofactor_det(const Matrix& m) {
  const int r = m.dim();
  if (r == 1) return m(0, 0);
  PInt d = 0;
  for (int j = 0; j < r; ++j) {
    Matrix sub(r - 1);
    for (int i = 1; i < r; ++i)
      for (int k = 0, c = 0; k < r; ++k)
        if (k != j) sub(i - 1, c++) = m(i, k);
    PInt term = PInt(m(0, j)) * cofactor_det(sub);
    d += (j % 2 == 0) ? term : PInt(-term);
  }
  return d;
}

bool is_canonical_hnf(const Matrix& h, std::int64_t p) {
  for (int i = 0; i < h.dim(); ++i) {
    if (h(i, i) <= 0 || ipow(p, valuation(h(i, i), p)) != h(i, i)) return false;
    for (int j = 0; j < i; ++j)
      if (h(i, j) != 0) return false;
    for (int j = i + 1; j < h.dim(); ++j)
      if (h(i, j) < 0 || h(i, j) >= h(j, j)) return false;
  }
  return true;
}

}  // namespace

TEST(Integer, ValuationBasics) {
  EXPECT_EQ(valuation(std::int64_t{48}, 2), 4);
  EXPECT_EQ(valuation(std::int64_t{-27}, 3), 3);
  EXPECT_EQ(valuation(std::int64_t{7}, 5), 0);
  EXPECT_EQ(valuation(PInt("1267650600228229401496703205376"), PInt(2)), 100);
  EXPECT_THROW(valuation(std::int64_t{0}, 3), std::domain_error);
}

TEST(Integer, CheckedArithmeticOverflows) {
  const auto big = std::numeric_limits<std::int64_t>::max();
  EXPECT_THROW(detail::checked_add(big, 1), OverflowError);
  EXPECT_THROW(detail::checked_mul(big / 2 + 1, 2), OverflowError);
  EXPECT_THROW(ipow(10, 19), OverflowError);
  EXPECT_EQ(ipow(3, 4), 81);
  EXPECT_EQ(pow_big(PInt(2), 70), PInt(1) << 70);
}

TEST(Integer, FloorDivisionAndInverse) {
  EXPECT_EQ(floor_div(-7, 2), -4);
  EXPECT_EQ(floor_mod(-7, 5), 3);
  for (std::int64_t m : {9, 25, 32, 49})
    for (std::int64_t a = 1; a < m; ++a) {
      if (std::gcd(a, m) != 1) continue;
      EXPECT_EQ(mul_mod(a, inverse_mod(a, m), m), 1) << a << " mod " << m;
    }
}

TEST(Integer, PrimesAndFactorization) {
  EXPECT_EQ(primes_up_to(30), (std::vector<std::int64_t>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29}));
  EXPECT_EQ(factorize(360), (std::vector<std::pair<std::int64_t, int>>{{2, 3}, {3, 2}, {5, 1}}));
  EXPECT_TRUE(factorize(1).empty());
  EXPECT_THROW(require_prime(1), std::invalid_argument);
  EXPECT_THROW(require_prime(9), std::invalid_argument);
}

TEST(Integer, UnitGeneratorsGenerateUnitsModP3) {
  for (std::int64_t p : {2, 3, 5, 7}) {
    const std::int64_t n = p * p * p;
    std::set<std::int64_t> seen{1};
    std::vector<std::int64_t> stack{1};
    while (!stack.empty()) {
      const std::int64_t x = stack.back();
      stack.pop_back();
      for (std::int64_t g : unit_generators(p)) {
        const std::int64_t y = mul_mod(x, floor_mod(g, n), n);
        if (seen.insert(y).second) stack.push_back(y);
      }
    }
    EXPECT_EQ(static_cast<std::int64_t>(seen.size()), n - n / p) << "p=" << p;
  }
}

TEST(Integer, GaussianBinomialSmallValues) {
  EXPECT_EQ(gaussian_binomial(2, 1, 3), 4);
  EXPECT_EQ(gaussian_binomial(3, 1, 2), 7);
  EXPECT_EQ(gaussian_binomial(3, 0, 5), 1);
  EXPECT_EQ(gaussian_binomial(4, 2, 2), 35);
}

TEST(Matrix, DeterminantMatchesCofactorExpansion) {
  gen::Rng rng(11);
  for (int r = 1; r <= 4; ++r)
    for (int t = 0; t < 50; ++t) {
      Matrix m(r);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) m(i, j) = gen::uniform(rng, -50, 50);
      EXPECT_EQ(PInt(m.determinant()), cofactor_det(m)) << m;
    }
}

TEST(Matrix, ProductAndIdentity) {
  Matrix a{{1, 2}, {3, 4}};
  Matrix b{{0, 1}, {1, 0}};
  EXPECT_EQ(a * b, (Matrix{{2, 1}, {4, 3}}));
  EXPECT_EQ(a * Matrix::identity(2), a);
  EXPECT_EQ((a * b).determinant(), a.determinant() * b.determinant());
}

TEST(Hnf, ExamplesAndErrors) {
  EXPECT_EQ(hnf_p(Matrix{{0, 1}, {2, 0}}, 2), (Matrix{{2, 0}, {0, 1}}));
  EXPECT_EQ(hnf_p(Matrix{{1, 0}, {0, 3}}, 3), (Matrix{{1, 0}, {0, 3}}));
  EXPECT_EQ(hnf_p(Matrix{{1, 5}, {0, 3}}, 3), (Matrix{{1, 2}, {0, 3}}));
  EXPECT_EQ(hnf_p(Matrix{{2, 0}, {1, 1}}, 2), (Matrix{{1, 1}, {0, 2}}));
  EXPECT_EQ(hnf_p(Matrix::identity(3), 5), Matrix::identity(3));
  EXPECT_THROW(hnf_p(Matrix{{1, 2}, {2, 4}}, 2), std::invalid_argument);
  EXPECT_THROW(hnf_p(Matrix{{3, 0}, {0, 1}}, 2), std::invalid_argument);
}

TEST(Hnf, CanonicalIdempotentAndUnimodularInvariant) {
  gen::Rng rng(2024);
  for (std::int64_t p : {2, 3, 5})
    for (int r = 1; r <= 3; ++r)
      for (int t = 0; t < 40; ++t) {
        const Matrix a = gen::p_power_matrix(rng, r, p, 4);
        const Matrix h = hnf_p(a, p);
        ASSERT_TRUE(is_canonical_hnf(h, p)) << a << " -> " << h;
        EXPECT_EQ(hnf_p(h, p), h);
        EXPECT_EQ(std::abs(h.determinant()), std::abs(a.determinant()));
        for (int u = 0; u < 3; ++u) EXPECT_EQ(hnf_p(gen::unimodular(rng, r) * a, p), h);
      }
}

TEST(Hnf, HundredRandomUnimodularLeftFactors) {
  gen::Rng rng(7);
  const Matrix a = gen::p_power_matrix(rng, 3, 2, 5);
  const Matrix h = hnf_p(a, 2);
  for (int t = 0; t < 100; ++t) EXPECT_EQ(hnf_p(gen::unimodular(rng, 3) * a, 2), h);
}

TEST(Hnf, RowLatticeMatchesPointSet) {
  gen::Rng rng(99);
  for (std::int64_t p : {2, 3, 5})
    for (int t = 0; t < 40; ++t) {
      const Matrix a = gen::p_power_matrix(rng, 2, p, 3);
      const std::int64_t n = ipow(p, valuation(a.determinant(), p));
      EXPECT_EQ(oracle::row_span(a, n), oracle::row_span(hnf_p(a, p), n)) << a;
    }
}

TEST(Hnf, LocalVersionAbsorbsUnitDeterminant) {
  // diag(5, 1) is a unit at p = 2, so it does not change the coset of A.
  const Matrix a{{2, 1}, {0, 4}};
  EXPECT_EQ(hnf_p_local(Matrix{{5, 0}, {0, 1}} * a, 2), hnf_p(a, 2));
  EXPECT_EQ(hnf_p_local(Matrix{{3, 0}, {0, 7}} * a, 2), hnf_p(a, 2));
}

TEST(Snf, AgreesWithDeterminantalMinors) {
  gen::Rng rng(5);
  for (std::int64_t p : {2, 3, 5})
    for (int r = 1; r <= 3; ++r)
      for (int t = 0; t < 60; ++t) {
        const Matrix a = gen::p_power_matrix(rng, r, p, 5);
        EXPECT_EQ(snf_exponents(a, p).exps, oracle::snf_by_minors(a, p)) << a;
      }
}

TEST(Snf, LocalVersionOnArbitraryNonsingularMatrices) {
  gen::Rng rng(6);
  for (std::int64_t p : {2, 3, 5})
    for (int t = 0; t < 100; ++t) {
      const Matrix a = gen::nonsingular(rng, 3, 12);
      EXPECT_EQ(snf_exponents_local(a, p).exps, oracle::snf_by_minors(a, p)) << a;
    }
}

TEST(Snf, InvariantUnderTwoSidedUnimodular) {
  gen::Rng rng(8);
  for (int t = 0; t < 60; ++t) {
    const Matrix a = gen::p_power_matrix(rng, 3, 3, 4);
    const auto e = snf_exponents(a, 3);
    EXPECT_EQ(e.total(), valuation(a.determinant(), 3));
    EXPECT_EQ(snf_exponents(gen::unimodular(rng, 3) * a * gen::unimodular(rng, 3), 3), e);
  }
}

TEST(EnumerateHnf, CountMatchesSublatticeOracle) {
  struct Case {
    int r;
    std::int64_t p;
    int k;
  };
  for (auto c : {Case{2, 2, 1}, Case{2, 2, 2}, Case{2, 2, 3}, Case{2, 3, 1}, Case{2, 3, 2}, Case{2, 5, 1},
                 Case{3, 2, 1}, Case{3, 2, 2}, Case{1, 3, 2}}) {
    EXPECT_EQ(enumerate_hnf(c.r, c.p, c.k).size(), oracle::count_sublattices(c.r, c.p, c.k, c.r))
        << "r=" << c.r << " p=" << c.p << " k=" << c.k;
  }
}

TEST(EnumerateHnf, RankTwoClosedForm) {
  for (std::int64_t p : {2, 3, 5, 7})
    for (int k = 0; k <= 5; ++k) {
      const auto list = enumerate_hnf(2, p, k);
      EXPECT_EQ(static_cast<std::int64_t>(list.size()), (ipow(p, k + 1) - 1) / (p - 1));
      std::set<Matrix> distinct(list.begin(), list.end());
      EXPECT_EQ(distinct.size(), list.size());
      for (const auto& h : list) {
        EXPECT_TRUE(is_canonical_hnf(h, p));
        EXPECT_EQ(hnf_p(h, p), h);
      }
    }
}

TEST(EnumerateHnf, Errors) {
  EXPECT_THROW(enumerate_hnf(0, 2, 1), std::invalid_argument);
  EXPECT_THROW(enumerate_hnf(2, 2, -1), std::invalid_argument);
  EXPECT_EQ(enumerate_hnf(3, 2, 0), std::vector<Matrix>{Matrix::identity(3)});
}

TEST(LatticeReduce, LandsInBoxAndDiffersByLatticeVector) {
  gen::Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const std::int64_t p = t % 2 ? 3 : 2;
    const Matrix h = hnf_p(gen::p_power_matrix(rng, 2, p, 4), p);
    IntVector c{gen::uniform(rng, -100, 100), gen::uniform(rng, -100, 100)};
    const IntVector red = lattice_reduce(h, c);
    for (int j = 0; j < 2; ++j) {
      EXPECT_GE(red[j], 0);
      EXPECT_LT(red[j], h(j, j));
    }
    // (c - red) = x H with integer x.
    const std::int64_t d0 = c[0] - red[0];
    ASSERT_EQ(d0 % h(0, 0), 0);
    const std::int64_t x0 = d0 / h(0, 0);
    EXPECT_EQ((c[1] - red[1] - x0 * h(0, 1)) % h(1, 1), 0);
  }
}
