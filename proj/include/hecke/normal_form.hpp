#pragma once

// p-local normal forms for integer matrices whose determinant is a power of
// p times a p-adic unit.
//
// Left action of GL_r(Z_p) is row operations. The canonical representative of
// a left coset GL_r(Z_p) A is the upper-triangular Hermite form with diagonal
// p^{e_1}, ..., p^{e_r} and every entry above the diagonal in column j reduced
// into [0, p^{e_j}). Since the row lattice of A over Z_p contains p^m Z_p^r
// (m = v_p(det A)), it is determined by the integer lattice spanned by the rows
// of A mod p^m together with p^m e_1, ..., p^m e_r; that lattice has p-power
// index in Z^r, so its integer Hermite form is the p-local one.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "hecke/integer.hpp"
#include "hecke/matrix.hpp"

namespace hecke {

/// Ascending elementary-divisor exponents: A lies in
/// GL_r(Z_p) diag(p^{e_1}, ..., p^{e_r}) GL_r(Z_p).
struct ExpVector {
  std::vector<int> exps;

  int total() const { return std::accumulate(exps.begin(), exps.end(), 0); }
  int size() const { return static_cast<int>(exps.size()); }

  friend bool operator==(const ExpVector&, const ExpVector&) = default;
  friend auto operator<=>(const ExpVector&, const ExpVector&) = default;
};

namespace detail {

inline void require_p_power_det(std::int64_t det, std::int64_t p) {
  if (det == 0) throw std::invalid_argument("matrix is singular");
  std::int64_t d = det < 0 ? -det : det;
  while (d % p == 0) d /= p;
  if (d != 1)
    throw std::invalid_argument("determinant " + std::to_string(det) + " is not a power of " +
                                std::to_string(p) + " up to sign");
}

/// Integer row-Hermite form of the full-rank lattice spanned by `rows`.
inline Matrix hermite_of_rows(std::vector<IntVector> rows, int r) {
  std::size_t top = 0;
  for (int j = 0; j < r; ++j) {
    for (;;) {
      std::size_t piv = rows.size();
      for (std::size_t i = top; i < rows.size(); ++i) {
        if (rows[i][j] == 0) continue;
        if (piv == rows.size() || std::abs(rows[i][j]) < std::abs(rows[piv][j])) piv = i;
      }
      if (piv == rows.size()) throw std::invalid_argument("hermite_of_rows: lattice is not full rank");
      std::swap(rows[top], rows[piv]);
      bool cleared = true;
      for (std::size_t i = top + 1; i < rows.size(); ++i) {
        if (rows[i][j] == 0) continue;
        std::int64_t q = floor_div(rows[i][j], rows[top][j]);
        for (int k = j; k < r; ++k) rows[i][k] = checked_sub(rows[i][k], checked_mul(q, rows[top][k]));
        if (rows[i][j] != 0) cleared = false;
      }
      if (cleared) break;
    }
    if (rows[top][j] < 0)
      for (auto& x : rows[top]) x = -x;
    ++top;
  }
  Matrix h(r);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < r; ++k) h(i, k) = rows[i][k];
  for (int j = 1; j < r; ++j)
    for (int i = 0; i < j; ++i) {
      std::int64_t q = floor_div(h(i, j), h(j, j));
      if (q == 0) continue;
      for (int k = j; k < r; ++k) h(i, k) = checked_sub(h(i, k), checked_mul(q, h(j, k)));
    }
  return h;
}

inline int unit_free_valuation(std::int64_t det, std::int64_t p) {
  if (det == 0) throw std::invalid_argument("matrix is singular");
  return valuation(det, p);
}

}  // namespace detail

/// Canonical left-coset representative, tolerating determinants of the form
/// (p-adic unit) * p^m. Used where GL_r(Z_p) elements with non-unit integer
/// determinant (e.g. diag(u, 1)) act on representatives.
inline Matrix hnf_p_local(const Matrix& a, std::int64_t p) {
  const int r = a.dim();
  const int m = detail::unit_free_valuation(a.determinant(), p);
  const std::int64_t modulus = ipow(p, m);
  std::vector<IntVector> rows;
  rows.reserve(2 * r);
  for (int i = 0; i < r; ++i) {
    IntVector row(r);
    for (int k = 0; k < r; ++k) row[k] = floor_mod(a(i, k), modulus);
    rows.push_back(std::move(row));
  }
  for (int i = 0; i < r; ++i) {
    IntVector row(r, 0);
    row[i] = modulus;
    rows.push_back(std::move(row));
  }
  return detail::hermite_of_rows(std::move(rows), r);
}

/// Canonical left-coset representative of GL_r(Z_p) A; |det A| must be p^m.
inline Matrix hnf_p(const Matrix& a, std::int64_t p) {
  detail::require_p_power_det(a.determinant(), p);
  return hnf_p_local(a, p);
}

/// Elementary-divisor exponents by p-adic pivoting modulo p^{m+1}.
inline ExpVector snf_exponents_local(const Matrix& a, std::int64_t p) {
  const int r = a.dim();
  const int m = detail::unit_free_valuation(a.determinant(), p);
  const std::int64_t modulus = ipow(p, m + 1);
  Matrix b(r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) b(i, j) = floor_mod(a(i, j), modulus);

  ExpVector out;
  for (int k = 0; k < r; ++k) {
    int best = -1, bi = -1, bj = -1;
    for (int i = k; i < r; ++i)
      for (int j = k; j < r; ++j) {
        if (b(i, j) == 0) continue;
        int v = valuation(b(i, j), p);
        if (best < 0 || v < best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    if (best < 0) throw std::logic_error("snf_exponents: rank deficiency modulo p^(m+1)");
    b.swap_rows(k, bi);
    b.swap_cols(k, bj);
    const std::int64_t pe = ipow(p, best);
    const std::int64_t unit_inv = inverse_mod(b(k, k) / pe, modulus);
    for (int i = k + 1; i < r; ++i) {
      if (b(i, k) == 0) continue;
      std::int64_t f = mul_mod(b(i, k) / pe, unit_inv, modulus);
      for (int j = k; j < r; ++j) b(i, j) = floor_mod(b(i, j) - mul_mod(f, b(k, j), modulus), modulus);
    }
    for (int j = k + 1; j < r; ++j) {
      if (b(k, j) == 0) continue;
      std::int64_t f = mul_mod(b(k, j) / pe, unit_inv, modulus);
      for (int i = k; i < r; ++i) b(i, j) = floor_mod(b(i, j) - mul_mod(f, b(i, k), modulus), modulus);
    }
    out.exps.push_back(best);
  }
  std::sort(out.exps.begin(), out.exps.end());
  if (out.total() != m) throw std::logic_error("snf_exponents: exponent sum disagrees with v_p(det)");
  return out;
}

inline ExpVector snf_exponents(const Matrix& a, std::int64_t p) {
  detail::require_p_power_det(a.determinant(), p);
  return snf_exponents_local(a, p);
}

/// Every canonical Hermite form of dimension r with determinant p^k, each once.
inline std::vector<Matrix> enumerate_hnf(int r, std::int64_t p, int k) {
  if (r < 1) throw std::invalid_argument("enumerate_hnf: r must be positive");
  if (k < 0) throw std::invalid_argument("enumerate_hnf: k must be nonnegative");
  std::vector<Matrix> out;
  std::vector<int> e(r, 0);

  // Fill the strictly upper part column by column, entry by entry.
  auto fill = [&](auto&& self, Matrix& h, int col, int row) -> void {
    if (col == r) {
      out.push_back(h);
      return;
    }
    if (row == col) {
      self(self, h, col + 1, 0);
      return;
    }
    const std::int64_t bound = ipow(p, e[col]);
    for (std::int64_t x = 0; x < bound; ++x) {
      h(row, col) = x;
      self(self, h, col, row + 1);
    }
    h(row, col) = 0;
  };

  auto compose = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == r - 1) {
      e[pos] = remaining;
      Matrix h(r);
      for (int i = 0; i < r; ++i) h(i, i) = ipow(p, e[i]);
      fill(fill, h, 0, 0);
      return;
    }
    for (int x = remaining; x >= 0; --x) {
      e[pos] = x;
      self(self, pos + 1, remaining - x);
    }
  };
  compose(compose, 0, k);
  return out;
}

/// Reduce c modulo the row lattice of an upper-triangular H: coordinate j is
/// brought into [0, H_jj) by subtracting multiples of row j, for j = 1..r.
inline IntVector lattice_reduce(const Matrix& h, IntVector c) {
  const int r = h.dim();
  if (static_cast<int>(c.size()) != r) throw std::invalid_argument("lattice_reduce: dimension mismatch");
  for (int j = 0; j < r; ++j) {
    if (h(j, j) <= 0) throw std::invalid_argument("lattice_reduce: H is not in canonical form");
    std::int64_t q = floor_div(c[j], h(j, j));
    if (q == 0) continue;
    for (int k = j; k < r; ++k) c[k] = detail::checked_sub(c[k], detail::checked_mul(q, h(j, k)));
  }
  return c;
}

}  // namespace hecke
