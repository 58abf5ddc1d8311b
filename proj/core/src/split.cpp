#include "convser/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "convser/errors.hpp"

namespace convser {

std::string_view to_string(SplitMode m) { return m == SplitMode::Paper ? "paper" : "grouped"; }

SplitMode parse_split_mode(std::string_view s) {
  if (s == "paper") return SplitMode::Paper;
  if (s == "grouped") return SplitMode::Grouped;
  throw ParameterError("unknown split mode '" + std::string(s) + "'");
}

Split split_indices(std::span<const std::string> group_ids, double ratio, SplitMode mode,
                    std::uint64_t seed) {
  const std::size_t n = group_ids.size();
  if (n == 0) throw ParameterError("split: no records");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ParameterError("split: ratio must lie in (0, 1)");
  std::mt19937_64 rng(seed);
  Split split;

  if (mode == SplitMode::Paper) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
    if (n >= 2) n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    return split;
  }

  // std::map gives a deterministic, sorted group order before shuffling.
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[group_ids[i]].push_back(i);
  if (groups.size() < 2) throw ParameterError("split: grouped mode needs at least two groups");
  std::vector<const std::vector<std::size_t>*> order;
  for (const auto& [id, members] : groups) order.push_back(&members);
  std::shuffle(order.begin(), order.end(), rng);

  const double target = ratio * static_cast<double>(n);
  std::size_t g = 0;
  for (; g + 1 < order.size() && static_cast<double>(split.train.size()) < target; ++g)
    split.train.insert(split.train.end(), order[g]->begin(), order[g]->end());
  for (; g < order.size(); ++g)
    split.validation.insert(split.validation.end(), order[g]->begin(), order[g]->end());
  return split;
}

Split split_dataset(const DatasetManifest& manifest, double ratio, SplitMode mode,
                    std::uint64_t seed) {
  std::vector<std::string> groups;
  groups.reserve(manifest.size());
  for (const auto& r : manifest.records) groups.push_back(r.group_id);
  return split_indices(groups, ratio, mode, seed);
}

}  // namespace convser
