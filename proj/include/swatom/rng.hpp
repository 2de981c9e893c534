#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace swatom {

/// 64-bit FNV-1a, used to turn stream names into stable seed words.
constexpr std::uint64_t fnv1a(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Independent generator for (root seed, named stream, member index).
///
/// Every stochastic choice draws from its own stream, so results do not depend on how work is
/// split between threads.
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::string_view stream, std::uint64_t index) {
  const std::uint64_t name = fnv1a(stream);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(name), static_cast<std::uint32_t>(name >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

inline constexpr std::string_view kRngDiscipline =
    "mt19937_64 per (seed, stream, index) via std::seed_seq over seed, fnv1a(stream), index";

}  // namespace swatom
