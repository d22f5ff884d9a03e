#pragma once

// Hecke ring of (GL_r(Z_p), M_r(Z_p) ∩ GL_r(Q_p)) and the Hecke-Tamagawa
// rationality f_{r,p}(X) P(X) = 1.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "hecke/coset_system.hpp"
#include "hecke/hecke_element.hpp"
#include "hecke/json.hpp"
#include "hecke/matrix.hpp"
#include "hecke/normal_form.hpp"
#include "hecke/ring.hpp"

namespace hecke {

template <>
struct KeyCodec<ExpVector> {
  static json encode(const ExpVector& k) { return json{{"exponents", k.exps}}; }
  static ExpVector decode(const json& j) {
    const json& arr = j.is_object() ? j.at("exponents") : j;
    ExpVector k{arr.get<std::vector<int>>()};
    if (k.exps.empty() || !std::is_sorted(k.exps.begin(), k.exps.end()) || k.exps.front() < 0)
      throw std::invalid_argument("exponent key must be a nonempty ascending list of nonnegative integers");
    return k;
  }
};

namespace gl {

using Key = ExpVector;

class System {
 public:
  using Element = Matrix;
  using Key = ExpVector;

  System(int r, std::int64_t p) : r_(r), p_(p), cache_(std::make_shared<Cache>()) {
    if (r < 1) throw std::invalid_argument("gl::System: r must be positive");
    require_prime(p);
  }

  int rank() const noexcept { return r_; }
  std::int64_t prime() const noexcept { return p_; }
  std::string describe() const { return "GL_" + std::to_string(r_) + "(Z_" + std::to_string(p_) + ")"; }

  Matrix identity() const { return Matrix::identity(r_); }
  Key identity_key() const { return Key{std::vector<int>(r_, 0)}; }
  Matrix mul(const Matrix& a, const Matrix& b) const { return a * b; }
  Matrix canonical_left(const Matrix& x) const { return hnf_p(x, p_); }
  int index_valuation(const Matrix& x) const { return valuation(x.determinant(), p_); }
  Key double_key(const Matrix& x) const { return snf_exponents(x, p_); }
  int key_index_valuation(const Key& k) const { return k.total(); }

  /// diag(p^{e_1}, ..., p^{e_r}).
  Matrix representative(const Key& k) const {
    validate(k);
    std::vector<std::int64_t> d;
    for (int e : k.exps) d.push_back(ipow(p_, e));
    return Matrix::diagonal(d);
  }

  /// Canonical left cosets inside the double coset `k`: the Hermite forms at
  /// determinant p^{|k|} whose elementary divisors are k.
  std::shared_ptr<const std::vector<Matrix>> left_cosets(const Key& k) const {
    validate(k);
    auto lvl = level(k.total());
    auto it = lvl->cosets.find(k);
    if (it == lvl->cosets.end()) throw std::logic_error("gl::System: key missing from its level");
    return it->second;
  }

  /// Partitions of v into at most r parts, as ascending exponent vectors.
  std::vector<Key> all_doubles(int v) const {
    if (v < 0) throw std::invalid_argument("all_doubles: negative valuation");
    std::vector<Key> out;
    std::vector<int> e(r_, 0);
    auto rec = [&](auto&& self, int pos, int lo, int remaining) -> void {
      if (pos == r_ - 1) {
        if (remaining >= lo) {
          e[pos] = remaining;
          out.push_back(Key{e});
        }
        return;
      }
      const int slots = r_ - pos;
      for (int x = lo; x * slots <= remaining; ++x) {
        e[pos] = x;
        self(self, pos + 1, x, remaining - x);
      }
    };
    rec(rec, 0, 0, v);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Number of canonical left cosets with determinant p^v.
  std::size_t left_coset_count(int v) const {
    std::size_t n = 0;
    for (const auto& [k, list] : level(v)->cosets) n += list->size();
    return n;
  }

 private:
  struct Level {
    std::map<Key, std::shared_ptr<const std::vector<Matrix>>> cosets;
  };
  struct Cache {
    std::mutex mu;
    std::map<int, std::shared_ptr<const Level>> levels;
  };

  void validate(const Key& k) const {
    if (k.size() != r_ || !std::is_sorted(k.exps.begin(), k.exps.end()) || k.exps.front() < 0)
      throw std::invalid_argument("gl::System: malformed exponent key for " + describe());
  }

  std::shared_ptr<const Level> level(int v) const {
    {
      std::lock_guard lock(cache_->mu);
      if (auto it = cache_->levels.find(v); it != cache_->levels.end()) return it->second;
    }
    std::map<Key, std::vector<Matrix>> groups;
    for (auto& h : enumerate_hnf(r_, p_, v)) {
      Key k = snf_exponents(h, p_);
      groups[k].push_back(std::move(h));
    }
    auto lvl = std::make_shared<Level>();
    for (auto& [k, list] : groups) lvl->cosets.emplace(k, std::make_shared<const std::vector<Matrix>>(std::move(list)));
    std::lock_guard lock(cache_->mu);
    return cache_->levels.try_emplace(v, std::move(lvl)).first->second;
  }

  int r_;
  std::int64_t p_;
  std::shared_ptr<Cache> cache_;
};

static_assert(CosetSystem<System>);

using Ring = HeckeRing<System>;
using Hecke = HeckeElement<Key>;
using Series = TruncSeries<Key>;

/// T_{r,p}^{(i)}: the double coset of diag(1, ..., 1, p, ..., p) with i p's.
inline Hecke t_elementary(int r, int i) {
  if (i < 0 || i > r) throw std::invalid_argument("t_elementary: need 0 <= i <= r");
  std::vector<int> e(r, 0);
  std::fill(e.end() - i, e.end(), 1);
  return Hecke::basis(Key{e});
}

inline Hecke t_elementary(const Ring& ring, int i) { return t_elementary(ring.system().rank(), i); }

/// f_{r,p}(X) = sum_i (-1)^i p^{i(i-1)/2} T^{(i)} X^i, padded (or cut) to degree n.
inline Series f_poly(const Ring& ring, int n) {
  const int r = ring.system().rank();
  Series f(n);
  for (int i = 0; i <= std::min(r, n); ++i) {
    PInt c = pow_big(PInt(ring.prime()), i * (i - 1) / 2);
    if (i % 2 == 1) c = -c;
    f[i] = c * t_elementary(r, i);
  }
  return ring.tag(std::move(f));
}

/// Checks that f_{r,p}(X) P(X) has coefficient delta_{k,0} for k <= n.
inline Report verify_rationality(const Ring& ring, int n) {
  if (n < 1) throw std::invalid_argument("verify_rationality: N must be at least 1");
  Report rep;
  rep.identity = "rationality f_{r,p}(X) P(X) = 1";
  rep.parameters = {{"r", ring.system().rank()}, {"p", ring.prime()}, {"N", n}};
  const Series prod = ring.series_mul(f_poly(ring, n), ring.series(n));
  for (int k = 0; k <= n; ++k) {
    const Hecke residual = prod[k] - (k == 0 ? ring.unit() : Hecke{});
    rep.add("X^" + std::to_string(k), residual.is_zero(), terms_to_json(residual));
  }
  return rep;
}

inline Report verify_rationality(int r, std::int64_t p, int n) {
  Ring ring(System(r, p));
  return verify_rationality(ring, n);
}

}  // namespace gl
}  // namespace hecke
