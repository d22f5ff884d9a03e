#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "hecke/integer.hpp"

namespace hecke {

using IntVector = std::vector<std::int64_t>;

/// Square integer matrix, row-major. Entries are exact; every arithmetic
/// operation is overflow-checked.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int r) : r_(r), a_(static_cast<std::size_t>(r) * r, 0) {
    if (r < 1) throw std::invalid_argument("Matrix: dimension must be positive");
  }
  Matrix(int r, std::vector<std::int64_t> entries) : r_(r), a_(std::move(entries)) {
    if (r < 1 || a_.size() != static_cast<std::size_t>(r) * r)
      throw std::invalid_argument("Matrix: entry count does not match dimension");
  }
  Matrix(std::initializer_list<std::initializer_list<std::int64_t>> rows)
      : r_(static_cast<int>(rows.size())) {
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != r_) throw std::invalid_argument("Matrix: not square");
      a_.insert(a_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(int r) {
    Matrix m(r);
    for (int i = 0; i < r; ++i) m(i, i) = 1;
    return m;
  }

  static Matrix diagonal(std::span<const std::int64_t> d) {
    Matrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.r_; ++i) m(i, i) = d[i];
    return m;
  }

  int dim() const noexcept { return r_; }
  std::int64_t operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * r_ + j]; }
  std::int64_t& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * r_ + j]; }
  std::span<const std::int64_t> row(int i) const {
    return {a_.data() + static_cast<std::size_t>(i) * r_, static_cast<std::size_t>(r_)};
  }
  const std::vector<std::int64_t>& entries() const noexcept { return a_; }

  friend Matrix operator*(const Matrix& x, const Matrix& y) {
    if (x.r_ != y.r_) throw std::invalid_argument("Matrix: dimension mismatch");
    Matrix z(x.r_);
    for (int i = 0; i < x.r_; ++i)
      for (int j = 0; j < x.r_; ++j) {
        __int128 s = 0;
        for (int k = 0; k < x.r_; ++k) s += static_cast<__int128>(x(i, k)) * y(k, j);
        z(i, j) = detail::narrow(s);
      }
    return z;
  }

  void swap_rows(int i, int j) {
    for (int k = 0; k < r_; ++k) std::swap((*this)(i, k), (*this)(j, k));
  }
  void swap_cols(int i, int j) {
    for (int k = 0; k < r_; ++k) std::swap((*this)(k, i), (*this)(k, j));
  }

  /// Fraction-free (Bareiss) determinant.
  std::int64_t determinant() const {
    if (r_ == 1) return a_[0];
    if (r_ == 2)
      return detail::narrow(static_cast<__int128>(a_[0]) * a_[3] - static_cast<__int128>(a_[1]) * a_[2]);
    Matrix m = *this;
    std::int64_t sign = 1, prev = 1;
    for (int k = 0; k + 1 < r_; ++k) {
      if (m(k, k) == 0) {
        int s = k + 1;
        while (s < r_ && m(s, k) == 0) ++s;
        if (s == r_) return 0;
        m.swap_rows(k, s);
        sign = -sign;
      }
      for (int i = k + 1; i < r_; ++i)
        for (int j = k + 1; j < r_; ++j) {
          __int128 v = static_cast<__int128>(m(i, j)) * m(k, k) - static_cast<__int128>(m(i, k)) * m(k, j);
          m(i, j) = detail::narrow(v / prev);
        }
      prev = m(k, k);
    }
    return sign * m(r_ - 1, r_ - 1);
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;
  friend auto operator<=>(const Matrix& x, const Matrix& y) {
    if (auto c = x.r_ <=> y.r_; c != 0) return c;
    return x.a_ <=> y.a_;
  }

  friend std::ostream& operator<<(std::ostream& os, const Matrix& m) {
    os << '[';
    for (int i = 0; i < m.r_; ++i) {
      os << (i ? ",[" : "[");
      for (int j = 0; j < m.r_; ++j) os << (j ? "," : "") << m(i, j);
      os << ']';
    }
    return os << ']';
  }

 private:
  int r_ = 0;
  std::vector<std::int64_t> a_;
};

/// Row vector times matrix.
inline IntVector row_times(std::span<const std::int64_t> v, const Matrix& m) {
  if (static_cast<int>(v.size()) != m.dim()) throw std::invalid_argument("row_times: dimension mismatch");
  IntVector out(v.size(), 0);
  for (int j = 0; j < m.dim(); ++j) {
    __int128 s = 0;
    for (int k = 0; k < m.dim(); ++k) s += static_cast<__int128>(v[k]) * m(k, j);
    out[j] = detail::narrow(s);
  }
  return out;
}

}  // namespace hecke
