#pragma once

// Scalar arithmetic shared by every layer: big integers for coefficients,
// overflow-checked machine integers for coset representatives, and the
// handful of elementary number-theoretic helpers the engine needs.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace hecke {

using PInt = boost::multiprecision::cpp_int;

/// Raised when a representative no longer fits the machine word used for
/// coset arithmetic. Coefficients never overflow (they are PInt).
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

namespace detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("int64 overflow in coset arithmetic");
  return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("int64 overflow in coset arithmetic");
  return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("int64 overflow in coset arithmetic");
  return r;
}

inline std::int64_t narrow(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw OverflowError("int64 overflow in coset arithmetic");
  return static_cast<std::int64_t>(v);
}

}  // namespace detail

/// Floor division; b != 0.
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Representative of a modulo m in [0, m); m > 0.
inline std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

inline std::int64_t mul_mod(std::int64_t a, std::int64_t b, std::int64_t m) {
  return floor_mod(static_cast<std::int64_t>((static_cast<__int128>(a) * b) % m), m);
}

inline std::int64_t ipow(std::int64_t base, int e) {
  if (e < 0) throw std::invalid_argument("ipow: negative exponent");
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r = detail::checked_mul(r, base);
  return r;
}

inline PInt pow_big(const PInt& base, int e) {
  PInt r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

/// v_p(n): the largest e with p^e | n.
inline int valuation(const PInt& n, const PInt& p) {
  if (n == 0) throw std::domain_error("undefined valuation");
  if (p < 2) throw std::invalid_argument("valuation: modulus must be at least 2");
  PInt m = abs(n);
  int e = 0;
  while (m % p == 0) {
    m /= p;
    ++e;
  }
  return e;
}

inline int valuation(std::int64_t n, std::int64_t p) {
  if (n == 0) throw std::domain_error("undefined valuation");
  if (p < 2) throw std::invalid_argument("valuation: modulus must be at least 2");
  int e = 0;
  while (n % p == 0) {
    n /= p;
    ++e;
  }
  return e;
}

/// Inverse of a modulo m; requires gcd(a, m) = 1.
inline std::int64_t inverse_mod(std::int64_t a, std::int64_t m) {
  if (m == 1) return 0;
  std::int64_t r0 = m, r1 = floor_mod(a, m);
  std::int64_t s0 = 0, s1 = 1;
  while (r1 != 0) {
    std::int64_t q = r0 / r1;
    std::int64_t t = r0 - q * r1;
    r0 = r1;
    r1 = t;
    t = s0 - q * s1;
    s0 = s1;
    s1 = t;
  }
  if (r0 != 1) throw std::domain_error("inverse_mod: not a unit");
  return floor_mod(s0, m);
}

inline bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<std::int64_t> primes_up_to(std::int64_t bound) {
  std::vector<std::int64_t> out;
  for (std::int64_t n = 2; n <= bound; ++n)
    if (is_prime(n)) out.push_back(n);
  return out;
}

/// Prime factorisation as (p, v_p(n)) pairs in ascending order; n >= 1.
inline std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("factorize: n must be positive");
  std::vector<std::pair<std::int64_t, int>> out;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d != 0) continue;
    int e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    out.emplace_back(d, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline void require_prime(std::int64_t p) {
  if (!is_prime(p)) throw std::invalid_argument("not a prime: " + std::to_string(p));
}

/// Integers whose classes generate (Z/p^k)^* for every k >= 1.
/// Odd p: a primitive root mod p^2 (hence mod every p^k). p = 2: {-1, 5}.
inline std::vector<std::int64_t> unit_generators(std::int64_t p) {
  require_prime(p);
  if (p == 2) return {-1, 5};
  std::int64_t p2 = p * p;
  auto order_is_full = [&](std::int64_t g, std::int64_t mod, std::int64_t group_order) {
    for (const auto& [q, _] : factorize(group_order)) {
      std::int64_t x = 1;
      for (std::int64_t i = 0; i < group_order / q; ++i) x = mul_mod(x, g, mod);
      if (x == 1) return false;
    }
    return true;
  };
  for (std::int64_t g = 2; g < p2; ++g) {
    if (g % p == 0) continue;
    if (order_is_full(g, p2, p * (p - 1))) return {g};
  }
  throw std::logic_error("no primitive root found");
}

/// Number of i-dimensional subspaces of F_p^r, evaluated as a polynomial in p.
inline PInt gaussian_binomial(int r, int i, const PInt& p) {
  if (i < 0 || i > r) throw std::invalid_argument("gaussian_binomial: need 0 <= i <= r");
  PInt num = 1, den = 1;
  for (int j = 0; j < i; ++j) {
    num *= pow_big(p, r - j) - 1;
    den *= pow_big(p, j + 1) - 1;
  }
  return num / den;
}

}  // namespace hecke
