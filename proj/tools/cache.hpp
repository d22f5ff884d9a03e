#pragma once

// On-disk structure-constant cache. One JSON file per product, named by the
// SHA-256 of its lookup key.

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <thread>

#include <openssl/evp.h>

#include "hecke/json.hpp"
#include "hecke/ring.hpp"

namespace hecke::cli {

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

/// $HECKE_CACHE_DIR, else $XDG_CACHE_HOME/hecke, else ~/.cache/hecke.
inline std::filesystem::path default_cache_dir() {
  if (const char* d = std::getenv("HECKE_CACHE_DIR"); d && *d) return d;
  if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return std::filesystem::path(x) / "hecke";
  if (const char* h = std::getenv("HOME"); h && *h) return std::filesystem::path(h) / ".cache" / "hecke";
  return std::filesystem::temp_directory_path() / "hecke-cache";
}

template <class Key>
class FileProductStore : public ProductStore<Key> {
 public:
  FileProductStore(std::filesystem::path dir, std::string system, std::int64_t p)
      : dir_(std::move(dir)), system_(std::move(system)), p_(p) {
    std::filesystem::create_directories(dir_);
  }

  json lookup(const Key& left, const Key& right) const {
    return {{"system", system_},
            {"p", p_},
            {"left", KeyCodec<Key>::encode(left)},
            {"right", KeyCodec<Key>::encode(right)},
            {"engine", kEngineVersion}};
  }

  std::filesystem::path path_for(const json& key) const { return dir_ / (sha256_hex(key.dump()) + ".json"); }

  std::optional<HeckeElement<Key>> load(const Key& left, const Key& right) override {
    const json key = lookup(left, right);
    const auto path = path_for(key);
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
      const json rec = json::parse(in);
      if (rec.at("lookup") != key) throw std::invalid_argument("lookup mismatch");
      ++hits_;
      return terms_from_json<Key>(rec.at("product"));
    } catch (const std::exception&) {
      in.close();
      std::error_code ec;
      std::filesystem::remove(path, ec);
      ++discarded_;
      return std::nullopt;
    }
  }

  void save(const Key& left, const Key& right, const HeckeElement<Key>& product) override {
    const json key = lookup(left, right);
    const auto path = path_for(key);
    std::ostringstream tmp_name;
    tmp_name << path.filename().string() << ".tmp." << std::this_thread::get_id() << '.' << counter_++;
    const auto tmp = dir_ / tmp_name.str();
    {
      std::ofstream out(tmp);
      if (!out) return;
      out << json{{"lookup", key}, {"product", terms_to_json(product)}}.dump() << '\n';
      if (!out) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        return;
      }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) std::filesystem::remove(tmp, ec);
  }

  std::size_t hits() const noexcept { return hits_; }
  std::size_t discarded() const noexcept { return discarded_; }

 private:
  std::filesystem::path dir_;
  std::string system_;
  std::int64_t p_;
  std::atomic<std::size_t> hits_{0}, discarded_{0}, counter_{0};
};

}  // namespace hecke::cli
