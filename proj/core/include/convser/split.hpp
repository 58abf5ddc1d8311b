#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "convser/manifest.hpp"

namespace convser {

// paper: every record shuffled independently (augmented variants included).
// grouped: whole group_ids are assigned to one side.
enum class SplitMode { Paper, Grouped };

std::string_view to_string(SplitMode m);
SplitMode parse_split_mode(std::string_view s);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Indices refer to positions in group_ids. Paper mode puts the first
// floor(ratio * n) shuffled records in train (at least one on each side when
// n >= 2). Grouped mode adds shuffled groups to train until it holds at least
// ratio * n records, always leaving one group for validation; a single group
// throws ParameterError.
Split split_indices(std::span<const std::string> group_ids, double ratio, SplitMode mode,
                    std::uint64_t seed);

Split split_dataset(const DatasetManifest& manifest, double ratio, SplitMode mode,
                    std::uint64_t seed);

}  // namespace convser
