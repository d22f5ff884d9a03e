#pragma once

// Versioned JSON documents for Hecke elements, as printed by the hecke CLI.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "hecke/hecke_element.hpp"
#include "hecke/json.hpp"

namespace hecke {

/// A Hecke element together with the ring it lives in. `system` is "gl" or
/// "heis" for local elements and "gl-global" or "heis-global" for restricted
/// products, where p is absent and the primes live inside the keys.
template <class Key>
struct ElementDoc {
  std::string system;
  std::optional<int> r;
  std::optional<std::int64_t> p;
  HeckeElement<Key> element;

  json to_json() const {
    json j = {{"schema", kElementSchema}, {"engine", kEngineVersion}, {"system", system}};
    if (r) j["r"] = *r;
    if (p) j["p"] = *p;
    j["terms"] = terms_to_json(element);
    return j;
  }

  static ElementDoc from_json(const json& j) {
    if (j.at("schema").get<std::string>() != kElementSchema)
      throw std::invalid_argument("unsupported element schema " + j.at("schema").dump());
    ElementDoc d;
    d.system = j.at("system").get<std::string>();
    if (j.contains("r")) d.r = j.at("r").get<int>();
    if (j.contains("p")) d.p = j.at("p").get<std::int64_t>();
    d.element = terms_from_json<Key>(j.at("terms"));
    return d;
  }

  friend bool operator==(const ElementDoc&, const ElementDoc&) = default;
};

}  // namespace hecke
