#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace convser {

// 64-bit FNV-1a. Used for config hashes, content hashes and seed derivation;
// not a cryptographic hash.
std::uint64_t fnv1a64(std::span<const std::byte> bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(std::string_view text);

std::uint64_t hash_file(const std::filesystem::path& path);

// Lower-case 16 hex digits.
std::string to_hex(std::uint64_t value);

// Derives an independent stream seed from a base seed and a label.
std::uint64_t derive_seed(std::uint64_t base, std::string_view label);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace convser
