#pragma once

// Structured rendering of keys, Hecke elements and verification reports.

#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hecke/hecke_element.hpp"
#include "hecke/integer.hpp"

namespace hecke {

using json = nlohmann::json;

inline constexpr const char* kEngineVersion = "hecke-engine 1.0.0";
inline constexpr const char* kElementSchema = "hecke.element/1";
inline constexpr const char* kReportSchema = "hecke.report/1";

/// Specialised per key type: `static json encode(const Key&)` and
/// `static Key decode(const json&)`.
template <class Key>
struct KeyCodec;

inline json coefficient_to_json(const PInt& c) {
  if (c >= std::numeric_limits<std::int64_t>::min() && c <= std::numeric_limits<std::int64_t>::max())
    return json(static_cast<std::int64_t>(c));
  return json(c.str());
}

inline PInt coefficient_from_json(const json& j) {
  if (j.is_number_integer()) return PInt(j.get<std::int64_t>());
  if (j.is_string()) return PInt(j.get<std::string>());
  throw std::invalid_argument("coefficient must be an integer or a decimal string");
}

template <class Key>
json terms_to_json(const HeckeElement<Key>& x) {
  json terms = json::array();
  for (const auto& [k, c] : x) terms.push_back({{"key", KeyCodec<Key>::encode(k)}, {"coeff", coefficient_to_json(c)}});
  return terms;
}

template <class Key>
HeckeElement<Key> terms_from_json(const json& terms) {
  if (!terms.is_array()) throw std::invalid_argument("terms must be an array");
  HeckeElement<Key> out;
  for (const auto& t : terms) out.add_term(KeyCodec<Key>::decode(t.at("key")), coefficient_from_json(t.at("coeff")));
  return out;
}

/// Raised by Report::require when an identity fails.
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CheckResult {
  std::string label;
  bool passed = true;
  json detail;  // residual on failure, null otherwise
};

/// Outcome of one identity check: one entry per coefficient (or pair) tested.
struct Report {
  std::string identity;
  json parameters = json::object();
  std::vector<CheckResult> checks;

  void add(std::string label, bool ok, json detail = nullptr) {
    checks.push_back({std::move(label), ok, ok ? json(nullptr) : std::move(detail)});
  }

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }

  const CheckResult* first_failure() const {
    for (const auto& c : checks)
      if (!c.passed) return &c;
    return nullptr;
  }

  void require() const {
    if (const auto* f = first_failure()) throw VerificationError(identity + ": first failure at " + f->label);
  }

  json to_json() const {
    json j = {{"identity", identity}, {"parameters", parameters}, {"passed", passed()}};
    json arr = json::array();
    for (const auto& c : checks) {
      json e = {{"check", c.label}, {"passed", c.passed}};
      if (!c.passed) e["residual"] = c.detail;
      arr.push_back(std::move(e));
    }
    j["checks"] = std::move(arr);
    if (const auto* f = first_failure()) j["first_failure"] = f->label;
    return j;
  }

  std::string to_text() const {
    std::ostringstream os;
    os << (passed() ? "PASS " : "FAIL ") << identity << ' ' << parameters.dump() << " (" << checks.size()
       << " checks)\n";
    for (const auto& c : checks) {
      os << "  " << (c.passed ? "ok   " : "FAIL ") << c.label << '\n';
      if (!c.passed) os << "       residual: " << c.detail.dump() << '\n';
    }
    return os.str();
  }
};

}  // namespace hecke
