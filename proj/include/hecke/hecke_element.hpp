#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hecke/integer.hpp"

namespace hecke {

/// Finitely supported integer combination of double-coset keys. Zero
/// coefficients are never stored, so equality is structural.
template <class Key>
class HeckeElement {
 public:
  using key_type = Key;
  using container = std::map<Key, PInt>;

  HeckeElement() = default;

  static HeckeElement basis(Key k, PInt c = 1) {
    HeckeElement e;
    e.add_term(std::move(k), c);
    return e;
  }

  void add_term(const Key& k, const PInt& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(k, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  PInt coefficient(const Key& k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? PInt(0) : it->second;
  }

  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }
  auto begin() const { return terms_.begin(); }
  auto end() const { return terms_.end(); }
  const container& terms() const noexcept { return terms_; }

  HeckeElement& operator+=(const HeckeElement& o) {
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
  }
  HeckeElement& operator-=(const HeckeElement& o) {
    for (const auto& [k, c] : o.terms_) add_term(k, -c);
    return *this;
  }
  HeckeElement& operator*=(const PInt& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, c] : terms_) c *= s;
    return *this;
  }

  friend HeckeElement operator+(HeckeElement a, const HeckeElement& b) { return a += b; }
  friend HeckeElement operator-(HeckeElement a, const HeckeElement& b) { return a -= b; }
  friend HeckeElement operator-(HeckeElement a) { return a *= PInt(-1); }
  friend HeckeElement operator*(const PInt& s, HeckeElement a) { return a *= s; }
  friend HeckeElement operator*(HeckeElement a, const PInt& s) { return a *= s; }

  friend bool operator==(const HeckeElement&, const HeckeElement&) = default;

 private:
  container terms_;
};

/// Power series in X with Hecke-ring coefficients, truncated after X^N.
template <class Key>
struct TruncSeries {
  std::vector<HeckeElement<Key>> coeffs;
  /// Description of the owning coset system; empty for hand-built series.
  std::string system;

  TruncSeries() = default;
  explicit TruncSeries(int n) : coeffs(static_cast<std::size_t>(n) + 1) {
    if (n < 0) throw std::invalid_argument("TruncSeries: negative truncation degree");
  }

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  const HeckeElement<Key>& operator[](int k) const { return coeffs.at(k); }
  HeckeElement<Key>& operator[](int k) { return coeffs.at(k); }

  friend bool operator==(const TruncSeries&, const TruncSeries&) = default;
};

}  // namespace hecke
