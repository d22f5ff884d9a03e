#pragma once

// Restricted-product model of the global Hecke ring: a basis element is a
// finitely supported family of local double cosets, one per prime, trivial
// almost everywhere. Components at distinct primes commute, so products are
// computed prime by prime and tensored together.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hecke/coset_system.hpp"
#include "hecke/gl.hpp"
#include "hecke/hecke_element.hpp"
#include "hecke/json.hpp"
#include "hecke/ring.hpp"

namespace hecke {

/// prime -> nontrivial local double-coset key.
template <class Key>
using GlobalKey = std::map<std::int64_t, Key>;

template <class Key>
using GlobalElement = HeckeElement<GlobalKey<Key>>;

template <class Key>
struct KeyCodec<GlobalKey<Key>> {
  static json encode(const GlobalKey<Key>& k) {
    json arr = json::array();
    for (const auto& [p, local] : k) arr.push_back({{"p", p}, {"key", KeyCodec<Key>::encode(local)}});
    return arr;
  }
  static GlobalKey<Key> decode(const json& j) {
    GlobalKey<Key> k;
    for (const auto& e : j) k.emplace(e.at("p").get<std::int64_t>(), KeyCodec<Key>::decode(e.at("key")));
    return k;
  }
};

/// Formal Dirichlet series truncated to 1 <= n <= bound.
template <class C>
class DirichletTrunc {
 public:
  DirichletTrunc() = default;
  explicit DirichletTrunc(std::int64_t bound) : bound_(bound), coeffs_(static_cast<std::size_t>(bound)) {
    if (bound < 1) throw std::invalid_argument("DirichletTrunc: bound must be at least 1");
  }

  std::int64_t bound() const noexcept { return bound_; }
  const C& operator[](std::int64_t n) const { return coeffs_.at(check(n) - 1); }
  C& operator[](std::int64_t n) { return coeffs_.at(check(n) - 1); }

  friend bool operator==(const DirichletTrunc&, const DirichletTrunc&) = default;

 private:
  std::int64_t check(std::int64_t n) const {
    if (n < 1 || n > bound_) throw std::out_of_range("DirichletTrunc: index outside [1, bound]");
    return n;
  }
  std::int64_t bound_ = 0;
  std::vector<C> coeffs_;
};

/// c(n) = sum_{d | n} a(d) * b(n/d), with a(d) always on the left.
template <class A, class B, class Mul>
auto dirichlet_mul(const DirichletTrunc<A>& a, const DirichletTrunc<B>& b, Mul&& mul) {
  using C = decltype(mul(a[1], b[1]));
  if (a.bound() != b.bound())
    throw std::invalid_argument("dirichlet_mul: bounds differ (" + std::to_string(a.bound()) + " vs " +
                                std::to_string(b.bound()) + ")");
  DirichletTrunc<C> c(a.bound());
  for (std::int64_t d = 1; d <= a.bound(); ++d) {
    if (a[d].is_zero()) continue;
    for (std::int64_t e = 1; d * e <= a.bound(); ++e)
      if (!b[e].is_zero()) c[d * e] += mul(a[d], b[e]);
  }
  return c;
}

/// Expand a product of local elements at distinct primes into global keys.
/// Each factor is (p, local element, local identity key); identity
/// components are dropped from the keys.
template <class Key>
GlobalElement<Key> tensor(const std::vector<std::tuple<std::int64_t, HeckeElement<Key>, Key>>& factors,
                          const PInt& scale = 1) {
  GlobalElement<Key> acc = GlobalElement<Key>::basis(GlobalKey<Key>{}, scale);
  for (const auto& [p, local, identity] : factors) {
    GlobalElement<Key> next;
    for (const auto& [gk, gc] : acc)
      for (const auto& [lk, lc] : local) {
        GlobalKey<Key> k = gk;
        if (!(lk == identity)) k.emplace(p, lk);
        next.add_term(k, gc * lc);
      }
    acc = std::move(next);
    if (acc.is_zero()) break;
  }
  return acc;
}

template <CosetSystem S>
class GlobalRing {
 public:
  using LocalKey = typename S::Key;
  using LocalRing = HeckeRing<S>;
  using LocalHecke = HeckeElement<LocalKey>;
  using Key = GlobalKey<LocalKey>;
  using Element = GlobalElement<LocalKey>;
  using Dirichlet = DirichletTrunc<Element>;
  using Factory = std::function<S(std::int64_t)>;
  using StoreFactory = std::function<std::shared_ptr<ProductStore<LocalKey>>(std::int64_t)>;

  GlobalRing(std::string tag, Factory factory, RingOptions opts = {}, StoreFactory stores = {})
      : tag_(std::move(tag)), factory_(std::move(factory)), stores_(std::move(stores)), opts_(opts) {}
  GlobalRing(const GlobalRing&) = delete;
  GlobalRing& operator=(const GlobalRing&) = delete;

  const std::string& tag() const noexcept { return tag_; }

  const LocalRing& local(std::int64_t p) const {
    std::lock_guard lock(mu_);
    auto it = locals_.find(p);
    if (it == locals_.end()) {
      auto ring = std::make_unique<LocalRing>(factory_(p), opts_);
      if (stores_) ring->attach_store(stores_(p));
      it = locals_.emplace(p, std::move(ring)).first;
    }
    return *it->second;
  }

  LocalKey local_identity(std::int64_t p) const { return local(p).system().identity_key(); }

  Element unit() const { return Element::basis(Key{}); }

  /// The image of a local element under R_{L_p} -> R-hat_L.
  Element embed(std::int64_t p, const LocalHecke& x) const {
    return tensor<LocalKey>({{p, x, local_identity(p)}});
  }

  /// Global index n = prod_p p^{v_p}.
  std::int64_t global_index(const Key& k) const {
    std::int64_t n = 1;
    for (const auto& [p, local_key] : k)
      n = detail::checked_mul(n, ipow(p, local(p).system().key_index_valuation(local_key)));
    return n;
  }

  Element mul(const Element& a, const Element& b) const {
    Element out;
    for (const auto& [ka, ca] : a)
      for (const auto& [kb, cb] : b) out += key_product(ka, kb, ca * cb);
    return out;
  }

  /// T-hat_L(n): the product over p | n of the local T_{L_p}(p^{v_p(n)}).
  Element global_t(std::int64_t n) const {
    std::vector<std::tuple<std::int64_t, LocalHecke, LocalKey>> factors;
    for (const auto& [p, v] : factorize(n)) factors.emplace_back(p, local(p).t_index(v), local_identity(p));
    return tensor(factors);
  }

  Dirichlet dirichlet(std::int64_t bound) const {
    Dirichlet d(bound);
    for (std::int64_t n = 1; n <= bound; ++n) d[n] = global_t(n);
    return d;
  }

  Dirichlet dmul(const Dirichlet& a, const Dirichlet& b) const {
    return dirichlet_mul(a, b, [this](const Element& x, const Element& y) { return mul(x, y); });
  }

  Dirichlet unit_series(std::int64_t bound) const {
    Dirichlet d(bound);
    d[1] = unit();
    return d;
  }

  /// prod_{p <= bound} P_{L_p}(p^{-s}), each local series truncated after X^n.
  Dirichlet euler_product(std::int64_t bound, int n) const {
    Dirichlet acc = unit_series(bound);
    for (std::int64_t p : primes_up_to(bound)) {
      // Only coefficients with p^k <= bound can reach the truncation window.
      Dirichlet factor(bound);
      std::int64_t pk = 1;
      for (int k = 0; k <= n && pk <= bound; ++k) {
        factor[pk] = embed(p, local(p).t_index(k));
        if (pk > bound / p) break;
        pk *= p;
      }
      acc = dmul(acc, factor);
    }
    return acc;
  }

  /// T-hat(mn) = T-hat(m) T-hat(n) for coprime m <= n with mn <= bound.
  Report verify_multiplicativity(std::int64_t bound) const {
    Report rep;
    rep.identity = "multiplicativity T(mn) = T(m) T(n), gcd(m, n) = 1";
    rep.parameters = {{"system", tag_}, {"bound", bound}};
    for (std::int64_t m = 1; m * m <= bound; ++m)
      for (std::int64_t n = m; m * n <= bound; ++n) {
        if (std::gcd(m, n) != 1) continue;
        const Element residual = global_t(m * n) - mul(global_t(m), global_t(n));
        rep.add("(" + std::to_string(m) + "," + std::to_string(n) + ")", residual.is_zero(),
                terms_to_json(residual));
      }
    return rep;
  }

  static int max_exponent(std::int64_t bound) {
    int n = 0;
    for (std::int64_t x = 2; x <= bound; x *= 2) ++n;
    return n;
  }

  /// D-hat_L(s) = prod_p P_{L_p}(p^{-s}) coefficientwise up to bound.
  Report verify_euler_product(std::int64_t bound, int n = -1) const {
    if (n < 0) n = max_exponent(bound);
    if (n < max_exponent(bound))
      throw std::invalid_argument("verify_euler_product: N must cover every prime power up to the bound");
    Report rep;
    rep.identity = "Euler product D(s) = prod_p P_p(p^-s)";
    rep.parameters = {{"system", tag_}, {"bound", bound}, {"N", n}};
    const Dirichlet lhs = dirichlet(bound);
    const Dirichlet rhs = euler_product(bound, n);
    for (std::int64_t k = 1; k <= bound; ++k) {
      const Element residual = lhs[k] - rhs[k];
      rep.add("n=" + std::to_string(k), residual.is_zero(), terms_to_json(residual));
    }
    return rep;
  }

 private:
  Element key_product(const Key& a, const Key& b, const PInt& scale) const {
    std::vector<std::tuple<std::int64_t, LocalHecke, LocalKey>> factors;
    auto ia = a.begin(), ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
      if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
        factors.emplace_back(ia->first, LocalHecke::basis(ia->second), local_identity(ia->first));
        ++ia;
      } else if (ia == a.end() || ib->first < ia->first) {
        factors.emplace_back(ib->first, LocalHecke::basis(ib->second), local_identity(ib->first));
        ++ib;
      } else {
        factors.emplace_back(ia->first, local(ia->first).key_product(ia->second, ib->second),
                             local_identity(ia->first));
        ++ia;
        ++ib;
      }
    }
    return tensor(factors, scale);
  }

  std::string tag_;
  Factory factory_;
  StoreFactory stores_;
  RingOptions opts_;
  mutable std::mutex mu_;
  mutable std::map<std::int64_t, std::unique_ptr<LocalRing>> locals_;
};

namespace global {

using GlRing = GlobalRing<gl::System>;
using GlElement = GlRing::Element;
using GlDirichlet = GlRing::Dirichlet;

inline GlRing::Factory gl_factory(int r) {
  return [r](std::int64_t p) { return gl::System(r, p); };
}

/// I_r(s) = prod_{p <= bound} f_{r,p}(p^{-s}); term i of f_{r,p} sits at n = p^i.
inline GlDirichlet i_r_trunc(const GlRing& ring, std::int64_t bound) {
  GlDirichlet acc = ring.unit_series(bound);
  for (std::int64_t p : primes_up_to(bound)) {
    const auto& local = ring.local(p);
    const int r = local.system().rank();
    const auto f = gl::f_poly(local, r);
    GlDirichlet factor(bound);
    std::int64_t pi = 1;
    for (int i = 0; i <= r && pi <= bound; ++i) {
      factor[pi] = ring.embed(p, f[i]);
      if (pi > bound / p) break;
      pi *= p;
    }
    acc = ring.dmul(acc, factor);
  }
  return acc;
}

/// I_r(s) D_{Z^r}(s) = 1 coefficientwise up to bound.
inline Report verify_global_rationality(const GlRing& ring, std::int64_t bound) {
  Report rep;
  rep.identity = "I_r(s) D_{Z^r}(s) = 1";
  rep.parameters = {{"system", ring.tag()}, {"bound", bound}};
  const GlDirichlet prod = ring.dmul(i_r_trunc(ring, bound), ring.dirichlet(bound));
  for (std::int64_t n = 1; n <= bound; ++n) {
    const GlElement residual = prod[n] - (n == 1 ? ring.unit() : GlElement{});
    rep.add("n=" + std::to_string(n), residual.is_zero(), terms_to_json(residual));
  }
  return rep;
}

}  // namespace global
}  // namespace hecke
