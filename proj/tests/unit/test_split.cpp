#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "convser/errors.hpp"
#include "convser/split.hpp"

using namespace convser;

namespace {

std::vector<std::string> groups_of(int n_groups, int per_group) {
  std::vector<std::string> g;
  for (int i = 0; i < n_groups; ++i)
    for (int k = 0; k < per_group; ++k) g.push_back("g" + std::to_string(i));
  return g;
}

void expect_partition(const Split& s, std::size_t n) {
  std::vector<std::size_t> all = s.train;
  all.insert(all.end(), s.validation.begin(), s.validation.end());
  std::sort(all.begin(), all.end());
  ASSERT_EQ(all.size(), n);
  for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(all[i], i);
}

}  // namespace

TEST(Split, PaperModeSizes) {
  std::vector<std::string> ids(100);
  for (int i = 0; i < 100; ++i) ids[i] = std::to_string(i);
  const Split s = split_indices(ids, 0.7, SplitMode::Paper, 1);
  EXPECT_EQ(s.train.size(), 70u);
  EXPECT_EQ(s.validation.size(), 30u);
  expect_partition(s, 100);
}

TEST(Split, PaperModeScattersGroups) {
  const auto g = groups_of(38, 8);
  const Split s = split_indices(g, 0.7, SplitMode::Paper, 3);
  EXPECT_EQ(s.train.size(), static_cast<std::size_t>(0.7 * 304));
  std::set<std::string> tr, va;
  for (auto i : s.train) tr.insert(g[i]);
  for (auto i : s.validation) va.insert(g[i]);
  std::vector<std::string> both;
  std::set_intersection(tr.begin(), tr.end(), va.begin(), va.end(), std::back_inserter(both));
  EXPECT_FALSE(both.empty());
}

TEST(Split, GroupedModeKeepsGroupsWhole) {
  const auto g = groups_of(38, 8);
  for (std::uint64_t seed : {1, 2, 3, 42}) {
    const Split s = split_indices(g, 0.7, SplitMode::Grouped, seed);
    expect_partition(s, g.size());
    std::set<std::string> tr;
    for (auto i : s.train) tr.insert(g[i]);
    for (auto i : s.validation) EXPECT_FALSE(tr.count(g[i])) << g[i];
    EXPECT_GE(static_cast<double>(s.train.size()), 0.7 * g.size());
    EXPECT_FALSE(s.validation.empty());
  }
}

TEST(Split, SeedDeterminism) {
  const auto g = groups_of(20, 3);
  for (auto mode : {SplitMode::Paper, SplitMode::Grouped}) {
    const Split a = split_indices(g, 0.7, mode, 9);
    const Split b = split_indices(g, 0.7, mode, 9);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.validation, b.validation);
    const Split c = split_indices(g, 0.7, mode, 10);
    const Split d = split_indices(g, 0.7, mode, 11);
    EXPECT_FALSE(a.validation == c.validation && c.validation == d.validation);
  }
}

TEST(Split, Errors) {
  EXPECT_THROW(split_indices(groups_of(1, 5), 0.7, SplitMode::Grouped, 1), ParameterError);
  EXPECT_THROW(split_indices(groups_of(3, 1), 1.0, SplitMode::Paper, 1), ParameterError);
  EXPECT_THROW(split_indices(std::vector<std::string>{}, 0.7, SplitMode::Paper, 1), ParameterError);
  EXPECT_THROW(parse_split_mode("random"), ParameterError);
  EXPECT_EQ(parse_split_mode(to_string(SplitMode::Grouped)), SplitMode::Grouped);
}

TEST(Split, TwoRecordsLeaveOneEachSide) {
  const Split s = split_indices(groups_of(2, 1), 0.7, SplitMode::Paper, 1);
  EXPECT_EQ(s.train.size(), 1u);
  EXPECT_EQ(s.validation.size(), 1u);
}
