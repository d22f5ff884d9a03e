#pragma once

// The generic Hecke-ring engine. Products are computed by the classical
// left-coset tally: for double cosets X = sum Gamma a_i and Y = sum Gamma b_j
// the coefficient of Gamma g Gamma in XY is #{(i, j) : Gamma a_i b_j = Gamma g},
// which is the same for every left coset Gamma g inside Gamma g Gamma.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hecke/coset_system.hpp"
#include "hecke/hecke_element.hpp"
#include "hecke/integer.hpp"

namespace hecke {

struct RingOptions {
  /// Verify that tallies are constant on every output double coset.
  bool check_uniformity = true;
};

/// External persistence for structure constants (see the CLI cache).
template <class Key>
class ProductStore {
 public:
  virtual ~ProductStore() = default;
  virtual std::optional<HeckeElement<Key>> load(const Key& left, const Key& right) = 0;
  virtual void save(const Key& left, const Key& right, const HeckeElement<Key>& product) = 0;
};

/// Turn a tally over canonical left cosets into a Hecke element of `sys`.
/// The coefficient of a double coset is read at its first listed left coset;
/// with `check` set, every other left coset must carry the same count.
template <CosetSystem S>
HeckeElement<typename S::Key> collapse_tally(const S& sys, const std::map<typename S::Element, std::int64_t>& tally,
                                             bool check, const char* what) {
  using Key = typename S::Key;
  std::map<Key, std::int64_t> seen;
  for (const auto& [left, count] : tally) seen[sys.double_key(left)] += 1;

  HeckeElement<Key> out;
  for (const auto& [key, hits] : seen) {
    auto cosets = sys.left_cosets(key);
    auto lookup = [&](const typename S::Element& e) -> std::int64_t {
      auto it = tally.find(e);
      return it == tally.end() ? 0 : it->second;
    };
    const std::int64_t coeff = lookup(cosets->front());
    if (check) {
      bool uniform = hits == static_cast<std::int64_t>(cosets->size());
      for (std::size_t i = 1; uniform && i < cosets->size(); ++i) uniform = lookup((*cosets)[i]) == coeff;
      if (!uniform) throw IllDefinedProduct(std::string(what) + ": tally is not uniform on a double coset of " +
                                            sys.describe());
    }
    out.add_term(key, coeff);
  }
  return out;
}

/// Image of one double coset under a monoid map f : Delta_src -> Delta_dst
/// that carries Gamma_src-left cosets to Gamma_dst-left cosets: the sum of
/// the images of its left cosets, regrouped into double cosets.
template <CosetSystem Src, CosetSystem Dst, class F>
HeckeElement<typename Dst::Key> pushforward_key(const Src& src, const Dst& dst, const typename Src::Key& key, F&& f,
                                                bool check, const char* what) {
  std::map<typename Dst::Element, std::int64_t> tally;
  for (const auto& left : *src.left_cosets(key)) tally[dst.canonical_left(f(left))] += 1;
  return collapse_tally(dst, tally, check, what);
}

template <CosetSystem S>
class HeckeRing {
 public:
  using System = S;
  using Key = typename S::Key;
  using Element = typename S::Element;
  using Hecke = HeckeElement<Key>;
  using Series = TruncSeries<Key>;

  explicit HeckeRing(S sys, RingOptions opts = {}) : sys_(std::move(sys)), opts_(opts) {}
  HeckeRing(const HeckeRing&) = delete;
  HeckeRing& operator=(const HeckeRing&) = delete;

  const S& system() const noexcept { return sys_; }
  std::int64_t prime() const { return sys_.prime(); }
  const RingOptions& options() const noexcept { return opts_; }

  void attach_store(std::shared_ptr<ProductStore<Key>> store) { store_ = std::move(store); }

  Hecke unit() const { return Hecke::basis(sys_.identity_key()); }
  Hecke basis(const Key& k) const { return Hecke::basis(k); }

  /// Number of left cosets in the double coset `k`.
  PInt degree(const Key& k) const { return PInt(sys_.left_cosets(k)->size()); }

  PInt degree(const Hecke& x) const {
    PInt d = 0;
    for (const auto& [k, c] : x) d += c * degree(k);
    return d;
  }

  /// Structure constants of T(a) T(b); memoised, optionally persisted.
  Hecke key_product(const Key& a, const Key& b) const {
    {
      std::lock_guard lock(mu_);
      if (auto it = memo_.find({a, b}); it != memo_.end()) return it->second;
    }
    std::optional<Hecke> product;
    if (store_) product = store_->load(a, b);
    if (!product) {
      product = compute_product(a, b);
      if (store_) store_->save(a, b, *product);
    }
    std::lock_guard lock(mu_);
    return memo_.try_emplace({a, b}, std::move(*product)).first->second;
  }

  Hecke mul(const Hecke& x, const Hecke& y) const {
    Hecke out;
    for (const auto& [a, ca] : x)
      for (const auto& [b, cb] : y) {
        const PInt c = ca * cb;
        for (const auto& [g, cg] : key_product(a, b)) out.add_term(g, c * cg);
      }
    return out;
  }

  /// Sum of all double cosets of index valuation k.
  Hecke t_index(int k) const {
    if (k < 0) throw std::invalid_argument("t_index: k must be nonnegative");
    Hecke out;
    for (const auto& key : sys_.all_doubles(k)) out.add_term(key, 1);
    return out;
  }

  /// The local Hecke series truncated after X^n.
  Series series(int n) const {
    Series s(n);
    for (int k = 0; k <= n; ++k) s[k] = t_index(k);
    return tag(std::move(s));
  }

  Series tag(Series s) const {
    s.system = sys_.describe();
    return s;
  }

  /// Cauchy product with a on the left.
  Series series_mul(const Series& a, const Series& b) const {
    if (a.degree() != b.degree())
      throw std::invalid_argument("series_mul: truncation degrees differ (" + std::to_string(a.degree()) + " vs " +
                                  std::to_string(b.degree()) + ")");
    for (const Series* s : {&a, &b})
      if (!s->system.empty() && s->system != sys_.describe())
        throw std::invalid_argument("series_mul: series belongs to " + s->system + ", not " + sys_.describe());
    Series c(a.degree());
    for (int k = 0; k <= a.degree(); ++k)
      for (int i = 0; i <= k; ++i)
        if (!a[i].is_zero() && !b[k - i].is_zero()) c[k] += mul(a[i], b[k - i]);
    return tag(std::move(c));
  }

 private:
  Hecke compute_product(const Key& a, const Key& b) const {
    auto la = sys_.left_cosets(a);
    auto lb = sys_.left_cosets(b);
    std::map<Element, std::int64_t> tally;
    for (const auto& x : *la)
      for (const auto& y : *lb) tally[sys_.canonical_left(sys_.mul(x, y))] += 1;
    Hecke out = collapse_tally(sys_, tally, opts_.check_uniformity, "hecke_mul");
    if (opts_.check_uniformity && degree(out) != PInt(la->size()) * PInt(lb->size()))
      throw IllDefinedProduct("hecke_mul: tally conservation failed in " + sys_.describe());
    return out;
  }

  S sys_;
  RingOptions opts_;
  std::shared_ptr<ProductStore<Key>> store_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<Key, Key>, Hecke> memo_;
};

}  // namespace hecke
