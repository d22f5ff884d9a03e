#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "cache.hpp"
#include "hecke/gl.hpp"
#include "hecke/heisenberg.hpp"

using namespace hecke;
namespace fs = std::filesystem;

namespace {

class CacheTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("hecke-cache-test-" + std::to_string(std::random_device{}()));
    fs::remove_all(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::size_t files() const {
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir)) n += e.is_regular_file();
    return n;
  }

  fs::path dir;
};

}  // namespace

TEST(Sha256, KnownVector) {
  EXPECT_EQ(cli::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(CacheTest, SaveThenLoad) {
  cli::FileProductStore<gl::Key> store(dir, "gl2", 3);
  const gl::Key a{{0, 1}};
  EXPECT_FALSE(store.load(a, a));
  const auto x = gl::Hecke::basis(gl::Key{{0, 2}}) + gl::Hecke::basis(gl::Key{{1, 1}}, pow_big(PInt(3), 50));
  store.save(a, a, x);
  EXPECT_EQ(files(), 1u);
  EXPECT_EQ(store.load(a, a), x);
  EXPECT_EQ(store.hits(), 1u);
}

TEST_F(CacheTest, LookupIncludesSystemAndPrime) {
  cli::FileProductStore<gl::Key> s3(dir, "gl2", 3), s5(dir, "gl2", 5), h3(dir, "gl3", 3);
  const gl::Key a{{0, 1}};
  s3.save(a, a, gl::Hecke::basis(a));
  EXPECT_FALSE(s5.load(a, a));
  EXPECT_FALSE(h3.load(a, a));
  EXPECT_NE(s3.path_for(s3.lookup(a, a)), s5.path_for(s5.lookup(a, a)));
}

TEST_F(CacheTest, CorruptRecordIsDiscarded) {
  cli::FileProductStore<gl::Key> store(dir, "gl2", 2);
  const gl::Key a{{0, 1}};
  store.save(a, a, gl::Hecke::basis(a));
  const auto path = store.path_for(store.lookup(a, a));
  {
    std::ofstream out(path, std::ios::trunc);
    out << "{\"lookup\": trunc";
  }
  EXPECT_FALSE(store.load(a, a));
  EXPECT_FALSE(fs::exists(path));
  EXPECT_EQ(store.discarded(), 1u);
}

TEST_F(CacheTest, MismatchedLookupIsDiscarded) {
  cli::FileProductStore<gl::Key> store(dir, "gl2", 2);
  const gl::Key a{{0, 1}}, b{{0, 2}};
  store.save(a, a, gl::Hecke::basis(a));
  // Move a valid record for (a, a) to the slot of (a, b).
  fs::rename(store.path_for(store.lookup(a, a)), store.path_for(store.lookup(a, b)));
  EXPECT_FALSE(store.load(a, b));
  EXPECT_EQ(store.discarded(), 1u);
}

TEST_F(CacheTest, WarmRingMatchesColdRing) {
  auto cold_store = std::make_shared<cli::FileProductStore<heis::Element>>(dir, "heis", 2);
  heis::Ring cold{heis::System(2)};
  cold.attach_store(cold_store);
  const auto s = cold.series(4);
  std::vector<std::pair<heis::Element, heis::Element>> pairs;
  for (int i = 0; i <= 4; ++i)
    for (const auto& [a, _] : s[i])
      for (int j = 0; i + j <= 4; ++j)
        for (const auto& [b, __] : s[j]) pairs.emplace_back(a, b);
  std::vector<heis::Hecke> first;
  for (const auto& [a, b] : pairs) first.push_back(cold.key_product(a, b));
  EXPECT_EQ(files(), pairs.size());

  auto warm_store = std::make_shared<cli::FileProductStore<heis::Element>>(dir, "heis", 2);
  heis::Ring warm{heis::System(2)};
  warm.attach_store(warm_store);
  for (std::size_t i = 0; i < pairs.size(); ++i) EXPECT_EQ(warm.key_product(pairs[i].first, pairs[i].second), first[i]);
  EXPECT_EQ(warm_store->hits(), pairs.size());
}
