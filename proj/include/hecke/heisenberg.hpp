#pragma once

// Hecke ring of the Heisenberg Lie algebra over Z_p.
//
// Basis x, y, z with [x, y] = z. An endomorphism with nonzero index is a pair
// (A, a): x -> A11 x + A21 y + a1 z, y -> A12 x + A22 y + a2 z, z -> det(A) z.
// Composition gives (A, a)(B, b) = (AB, aB + det(A) b) and the index of the
// image lattice is |det A|^2. Gamma is the group of pairs (U, u) with U in
// GL_2(Z_p).
//
// A left coset Gamma (A, a) is determined by H = hnf_p(A) and the class of
// det(U0) a modulo the row lattice of H, where U0 = H A^{-1}. Double cosets
// are computed as orbits of the right Gamma-action on left cosets.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hecke/coset_system.hpp"
#include "hecke/gl.hpp"
#include "hecke/hecke_element.hpp"
#include "hecke/json.hpp"
#include "hecke/matrix.hpp"
#include "hecke/normal_form.hpp"
#include "hecke/ring.hpp"

namespace hecke {
namespace heis {

struct Element {
  Matrix A;
  std::array<std::int64_t, 2> a{0, 0};

  static Element identity() { return {Matrix::identity(2), {0, 0}}; }

  friend bool operator==(const Element&, const Element&) = default;

  /// On canonical forms this is the order (diagonal exponents, off-diagonal
  /// entry, translation); the trailing A(1,0) makes it total on all elements.
  friend std::strong_ordering operator<=>(const Element& x, const Element& y) {
    auto tie = [](const Element& e) {
      return std::array<std::int64_t, 6>{e.A(0, 0), e.A(1, 1), e.A(0, 1), e.a[0], e.a[1], e.A(1, 0)};
    };
    return tie(x) <=> tie(y);
  }
};

inline Element heis_mul(const Element& x, const Element& y) {
  const std::int64_t d = x.A.determinant();
  IntVector t = row_times(x.a, y.A);
  return {x.A * y.A,
          {detail::checked_add(t[0], detail::checked_mul(d, y.a[0])),
           detail::checked_add(t[1], detail::checked_mul(d, y.a[1]))}};
}

/// Canonical representative of Gamma x. det A may carry any p-adic unit.
inline Element heis_canonical_left(const Element& x, std::int64_t p) {
  if (x.A.dim() != 2) throw std::invalid_argument("heisenberg element needs a 2x2 matrix");
  const std::int64_t det = x.A.determinant();
  if (det == 0) throw std::invalid_argument("heisenberg element is singular");
  const int m = valuation(det, p);
  const std::int64_t pm = ipow(p, m);
  Matrix h = hnf_p_local(x.A, p);
  const std::int64_t dinv = inverse_mod(floor_mod(det / pm, pm), pm);
  IntVector c{mul_mod(x.a[0], dinv, pm), mul_mod(x.a[1], dinv, pm)};
  c = lattice_reduce(h, std::move(c));
  return {std::move(h), {c[0], c[1]}};
}

class System {
 public:
  using Element = heis::Element;
  using Key = heis::Element;

  explicit System(std::int64_t p) : p_(p), cache_(std::make_shared<Cache>()) { require_prime(p); }

  std::int64_t prime() const noexcept { return p_; }
  std::string describe() const { return "Heis(Z_" + std::to_string(p_) + ")"; }

  Element identity() const { return Element::identity(); }
  Key identity_key() const { return Element::identity(); }
  Element mul(const Element& x, const Element& y) const { return heis_mul(x, y); }
  Element canonical_left(const Element& x) const { return heis_canonical_left(x, p_); }
  int index_valuation(const Element& x) const { return 2 * valuation(x.A.determinant(), p_); }
  int key_index_valuation(const Key& k) const { return index_valuation(k); }

  Key double_key(const Element& x) const {
    Element c = canonical_left(x);
    auto lvl = level(valuation(c.A.determinant(), p_));
    return lvl->key_of.at(c);
  }

  std::shared_ptr<const std::vector<Element>> left_cosets(const Key& k) const {
    auto lvl = level(valuation(k.A.determinant(), p_));
    auto it = lvl->orbits.find(k);
    if (it == lvl->orbits.end()) throw std::invalid_argument("heis::System: not a double-coset key");
    return it->second;
  }

  std::vector<Key> all_doubles(int v) const {
    if (v < 0) throw std::invalid_argument("all_doubles: negative valuation");
    std::vector<Key> out;
    if (v % 2 != 0) return out;
    for (const auto& [k, _] : level(v / 2)->orbits) out.push_back(k);
    return out;
  }

  /// Every canonical left coset with det A = p^m: Hermite forms H together
  /// with translations in [0, H_11) x [0, H_22).
  std::vector<Element> enumerate_left_cosets(int m) const {
    std::vector<Element> out;
    for (const auto& h : enumerate_hnf(2, p_, m))
      for (std::int64_t c1 = 0; c1 < h(0, 0); ++c1)
        for (std::int64_t c2 = 0; c2 < h(1, 1); ++c2) out.push_back({h, {c1, c2}});
    return out;
  }

  /// Generators of Gamma: elementary matrices, the swap, diagonal unit
  /// generators, and the two unit translations.
  std::vector<Element> generators() const {
    std::vector<Element> g;
    g.push_back({Matrix{{1, 1}, {0, 1}}, {0, 0}});
    g.push_back({Matrix{{1, 0}, {1, 1}}, {0, 0}});
    g.push_back({Matrix{{0, 1}, {1, 0}}, {0, 0}});
    for (std::int64_t u : unit_generators(p_)) {
      g.push_back({Matrix{{u, 0}, {0, 1}}, {0, 0}});
      g.push_back({Matrix{{1, 0}, {0, u}}, {0, 0}});
    }
    g.push_back({Matrix::identity(2), {1, 0}});
    g.push_back({Matrix::identity(2), {0, 1}});
    return g;
  }

  /// Left cosets inside Gamma x Gamma, by breadth-first closure under right
  /// multiplication by generators. Sorted ascending; front() is the key.
  std::vector<Element> double_orbit(const Element& x) const {
    const auto gens = generators();
    std::set<Element> seen{canonical_left(x)};
    std::vector<Element> frontier{*seen.begin()};
    while (!frontier.empty()) {
      std::set<Element> next;
      for (const auto& e : frontier)
        for (const auto& g : gens) {
          Element y = canonical_left(heis_mul(e, g));
          if (seen.insert(y).second) next.insert(y);
        }
      frontier.assign(next.begin(), next.end());
    }
    return {seen.begin(), seen.end()};
  }

 private:
  struct Level {
    std::map<Key, std::shared_ptr<const std::vector<Element>>> orbits;
    std::map<Element, Key> key_of;
  };
  struct Cache {
    std::mutex mu;
    std::map<int, std::shared_ptr<const Level>> levels;
  };

  std::shared_ptr<const Level> level(int m) const {
    {
      std::lock_guard lock(cache_->mu);
      if (auto it = cache_->levels.find(m); it != cache_->levels.end()) return it->second;
    }
    auto lvl = std::make_shared<Level>();
    const auto all = enumerate_left_cosets(m);
    for (const auto& e : all) {
      if (lvl->key_of.count(e)) continue;
      auto orbit = double_orbit(e);
      const Key key = orbit.front();
      for (const auto& o : orbit)
        if (!lvl->key_of.emplace(o, key).second)
          throw std::logic_error("heis::System: double-coset orbits overlap");
      lvl->orbits.emplace(key, std::make_shared<const std::vector<Element>>(std::move(orbit)));
    }
    if (lvl->key_of.size() != all.size()) throw std::logic_error("heis::System: orbits leave the enumeration");
    std::lock_guard lock(cache_->mu);
    return cache_->levels.try_emplace(m, std::move(lvl)).first->second;
  }

  std::int64_t p_;
  std::shared_ptr<Cache> cache_;
};

static_assert(CosetSystem<System>);

using Ring = HeckeRing<System>;
using Hecke = HeckeElement<Element>;
using Series = TruncSeries<Element>;

/// Element of R_{Z^2_p}[theta]: exponent j -> coefficient in R_{Z^2_p}.
/// It acts on R_{H_p}; it is never multiplied into it.
struct ThetaPoly {
  std::map<int, gl::Hecke> coeffs;

  static ThetaPoly monomial(gl::Hecke a, int j) {
    ThetaPoly q;
    if (!a.is_zero()) q.coeffs.emplace(j, std::move(a));
    return q;
  }
  ThetaPoly& operator+=(const ThetaPoly& o) {
    for (const auto& [j, a] : o.coeffs) {
      auto& slot = coeffs[j];
      slot += a;
      if (slot.is_zero()) coeffs.erase(j);
    }
    return *this;
  }
};

/// The homomorphisms s : R_{Z^2_p} -> R_{H_p}, phi : R_{H_p} -> R_{Z^2_p} and
/// theta : R_{H_p} -> R_{H_p}, induced on left cosets by A -> (A, 0),
/// (A, a) -> A and (A, a) -> (A, p a).
class Morphisms {
 public:
  Morphisms(const gl::Ring& gl, const Ring& heis) : gl_(gl), heis_(heis) {
    if (gl.system().rank() != 2) throw std::invalid_argument("Morphisms: need GL_2");
    if (gl.prime() != heis.prime()) throw std::invalid_argument("Morphisms: primes differ");
  }

  const gl::Ring& gl() const noexcept { return gl_; }
  const Ring& heis() const noexcept { return heis_; }
  std::int64_t prime() const { return heis_.prime(); }

  Hecke s(const gl::Hecke& x) const {
    Hecke out;
    for (const auto& [k, c] : x) out += c * image(s_memo_, k, [&] {
                                          return checked_push(gl_.system(), heis_.system(), k,
                                                              [](const Matrix& h) { return Element{h, {0, 0}}; },
                                                              "s");
                                        });
    return out;
  }

  gl::Hecke phi(const Hecke& x) const {
    gl::Hecke out;
    for (const auto& [k, c] : x) out += c * image(phi_memo_, k, [&] {
                                          return checked_push(heis_.system(), gl_.system(), k,
                                                              [](const Element& e) { return e.A; }, "phi");
                                        });
    return out;
  }

  Hecke theta(const Hecke& x, int power = 1) const {
    if (power < 0) throw std::invalid_argument("theta: negative power");
    Hecke cur = x;
    const std::int64_t p = prime();
    for (int i = 0; i < power; ++i) {
      Hecke next;
      for (const auto& [k, c] : cur)
        next += c * image(theta_memo_, k, [&] {
          return checked_push(heis_.system(), heis_.system(), k,
                              [p](const Element& e) {
                                return Element{e.A, {detail::checked_mul(p, e.a[0]), detail::checked_mul(p, e.a[1])}};
                              },
                              "theta");
        });
      cur = std::move(next);
    }
    return cur;
  }

  /// (sum_j a_j theta^j) . m = sum_j s(a_j) theta^j(m), s(a_j) on the left.
  Hecke act(const ThetaPoly& q, const Hecke& m) const {
    Hecke out;
    for (const auto& [j, a] : q.coeffs) out += heis_.mul(s(a), theta(m, j));
    return out;
  }

 private:
  template <class Memo, class F>
  typename Memo::mapped_type image(Memo& memo, const typename Memo::key_type& k, F&& compute) const {
    {
      std::lock_guard lock(mu_);
      if (auto it = memo.find(k); it != memo.end()) return it->second;
    }
    auto v = compute();
    std::lock_guard lock(mu_);
    return memo.try_emplace(k, std::move(v)).first->second;
  }

  template <class Src, class Dst, class F>
  HeckeElement<typename Dst::Key> checked_push(const Src& src, const Dst& dst, const typename Src::Key& k, F&& f,
                                               const char* what) const {
    const bool check = heis_.options().check_uniformity;
    auto img = pushforward_key(src, dst, k, std::forward<F>(f), check, what);
    if (check) {
      PInt deg = 0;
      for (const auto& [g, c] : img) {
        if (c <= 0) throw IllDefinedProduct(std::string(what) + " ill-defined: nonpositive fiber");
        deg += c * PInt(dst.left_cosets(g)->size());
      }
      if (deg != PInt(src.left_cosets(k)->size()))
        throw IllDefinedProduct(std::string(what) + " ill-defined: fibers do not cover the double coset");
    }
    return img;
  }

  const gl::Ring& gl_;
  const Ring& heis_;
  mutable std::mutex mu_;
  mutable std::map<gl::Key, Hecke> s_memo_;
  mutable std::map<Element, gl::Hecke> phi_memo_;
  mutable std::map<Element, Hecke> theta_memo_;
};

/// Owns the local GL_2 and Heisenberg rings at p together with s, phi, theta.
class Local {
 public:
  explicit Local(std::int64_t p, RingOptions opts = {})
      : gl(gl::System(2, p), opts), heis(System(p), opts), maps(gl, heis) {}

  gl::Ring gl;
  Ring heis;
  Morphisms maps;
};

/// g_{2,p}(theta; Y) with Y = pX^2, as X-coefficients: theta^2 at X^0,
/// -p T(1,p) theta at X^2, p^3 T(p,p) at X^4.
inline std::array<ThetaPoly, 3> g_coefficients(std::int64_t p) {
  return {ThetaPoly::monomial(gl::Hecke::basis(gl::Key{{0, 0}}), 2),
          ThetaPoly::monomial(PInt(-p) * gl::t_elementary(2, 1), 1),
          ThetaPoly::monomial(pow_big(PInt(p), 3) * gl::t_elementary(2, 2), 0)};
}

/// Checks g_{2,p}(theta; pX^2) P_{H_p}(X) = 1 through X^n, plus vanishing of
/// the odd coefficients of P_{H_p}.
inline Report verify_identity(const Morphisms& maps, int n) {
  if (n < 0 || n % 2 != 0) throw std::invalid_argument("verify_heis_identity: N must be even and nonnegative");
  const Ring& ring = maps.heis();
  const std::int64_t p = ring.prime();
  Report rep;
  rep.identity = "g_{2,p}(theta_p; pX^2) P_{H_p}(X) = 1";
  rep.parameters = {{"p", p}, {"N", n}};
  const Series series = ring.series(n);
  const auto g = g_coefficients(p);
  for (int k = 0; k <= n; ++k) {
    if (k % 2 == 1) {
      rep.add("T_H(p^" + std::to_string(k) + ") = 0", series[k].is_zero(), terms_to_json(series[k]));
      continue;
    }
    Hecke lhs;
    for (int i = 0; i < 3 && 2 * i <= k; ++i) lhs += maps.act(g[i], series[k - 2 * i]);
    const Hecke residual = lhs - (k == 0 ? ring.unit() : Hecke{});
    rep.add("X^" + std::to_string(k), residual.is_zero(), terms_to_json(residual));
  }
  return rep;
}

inline Report verify_identity(std::int64_t p, int n) {
  Local local(p);
  return verify_identity(local.maps, n);
}

/// Searches double cosets x, y with v(x) + v(y) <= max_valuation for a pair
/// with xy != yx. Returns the first such pair in key order, if any.
inline std::optional<std::pair<Element, Element>> find_noncommuting_pair(const Ring& ring, int max_valuation) {
  std::vector<Element> keys;
  for (int v = 0; v <= max_valuation; v += 2)
    for (const auto& k : ring.system().all_doubles(v)) keys.push_back(k);
  for (std::size_t i = 0; i < keys.size(); ++i)
    for (std::size_t j = i + 1; j < keys.size(); ++j) {
      const auto& x = keys[i];
      const auto& y = keys[j];
      if (ring.system().key_index_valuation(x) + ring.system().key_index_valuation(y) > max_valuation) continue;
      if (ring.key_product(x, y) != ring.key_product(y, x)) return std::make_pair(x, y);
    }
  return std::nullopt;
}

}  // namespace heis

template <>
struct KeyCodec<heis::Element> {
  static json encode(const heis::Element& e) {
    return json{{"matrix", {{e.A(0, 0), e.A(0, 1)}, {e.A(1, 0), e.A(1, 1)}}}, {"translation", {e.a[0], e.a[1]}}};
  }
  static heis::Element decode(const json& j) {
    const auto m = j.at("matrix").get<std::vector<std::vector<std::int64_t>>>();
    const auto t = j.at("translation").get<std::vector<std::int64_t>>();
    if (m.size() != 2 || m[0].size() != 2 || m[1].size() != 2 || t.size() != 2)
      throw std::invalid_argument("heisenberg key needs a 2x2 matrix and a 2-vector");
    return {Matrix{{m[0][0], m[0][1]}, {m[1][0], m[1][1]}}, {t[0], t[1]}};
  }
};

}  // namespace hecke
