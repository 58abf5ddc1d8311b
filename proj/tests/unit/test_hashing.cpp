#include <gtest/gtest.h>

#include <fstream>

#include "convser/hashing.hpp"
#include "test_support.hpp"

using namespace convser;

TEST(Hashing, Fnv1aKnownVectors) {
  EXPECT_EQ(to_hex(fnv1a64("")), "cbf29ce484222325");
  EXPECT_EQ(to_hex(fnv1a64("a")), "af63dc4c8601ec8c");
  EXPECT_EQ(to_hex(fnv1a64("foobar")), "85944171f73967e8");
}

TEST(Hashing, FileHashMatchesBytes) {
  testing_support::TempDir dir;
  {
    std::ofstream f(dir / "x.bin", std::ios::binary);
    f << "foobar";
  }
  EXPECT_EQ(hash_file(dir / "x.bin"), fnv1a64("foobar"));
}

TEST(Hashing, DerivedSeedsDiffer) {
  EXPECT_EQ(derive_seed(42, "s001"), derive_seed(42, "s001"));
  EXPECT_NE(derive_seed(42, "s001"), derive_seed(42, "s002"));
  EXPECT_NE(derive_seed(42, "s001"), derive_seed(43, "s001"));
  EXPECT_NE(derive_seed(42, std::uint64_t{0}), derive_seed(42, std::uint64_t{1}));
}
