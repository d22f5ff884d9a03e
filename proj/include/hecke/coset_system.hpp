#pragma once

#include <concepts>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hecke {

/// A product or morphism whose left-coset tally is not constant on some
/// double coset. Indicates an engine bug or a wrong coset system; never an
/// expected outcome.
class IllDefinedProduct : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Contract every local coset system (Gamma, Delta) at a prime p satisfies.
///
/// Elements are monoid elements of Delta; `canonical_left` is a normal form
/// for Gamma-left cosets; `double_key` labels Gamma-double cosets;
/// `left_cosets(key)` lists the canonical left cosets inside one double coset;
/// `all_doubles(v)` lists the double cosets of index valuation v.
template <class S>
concept CosetSystem = requires(const S& s, const typename S::Element& x, const typename S::Key& k, int v) {
  typename S::Element;
  typename S::Key;
  { s.prime() } -> std::convertible_to<std::int64_t>;
  { s.describe() } -> std::convertible_to<std::string>;
  { s.identity() } -> std::same_as<typename S::Element>;
  { s.identity_key() } -> std::same_as<typename S::Key>;
  { s.mul(x, x) } -> std::same_as<typename S::Element>;
  { s.canonical_left(x) } -> std::same_as<typename S::Element>;
  { s.index_valuation(x) } -> std::convertible_to<int>;
  { s.double_key(x) } -> std::same_as<typename S::Key>;
  { s.key_index_valuation(k) } -> std::convertible_to<int>;
  { s.left_cosets(k) } -> std::same_as<std::shared_ptr<const std::vector<typename S::Element>>>;
  { s.all_doubles(v) } -> std::same_as<std::vector<typename S::Key>>;
};

}  // namespace hecke
