#pragma once

#include <cstdint>
#include <random>

namespace biobench {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Counter-based stream splitting: the child seed depends only on the parent
// seed and the stream index, never on how many draws other streams made.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed) noexcept { return seed; }

template <typename... Rest>
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, Rest... rest) noexcept {
  return derive_seed(splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL)), rest...);
}

template <typename... Streams>
Rng make_rng(std::uint64_t seed, Streams... streams) {
  return Rng(derive_seed(seed, static_cast<std::uint64_t>(streams)...));
}

// Stream tags used across modules.
namespace stream {
inline constexpr std::uint64_t reference = 1;
inline constexpr std::uint64_t layout = 2;
inline constexpr std::uint64_t patient = 3;
inline constexpr std::uint64_t controls = 4;
inline constexpr std::uint64_t plant = 5;
inline constexpr std::uint64_t init = 10;
inline constexpr std::uint64_t consensus = 11;
inline constexpr std::uint64_t restart = 12;
inline constexpr std::uint64_t chain = 13;
inline constexpr std::uint64_t train = 14;
inline constexpr std::uint64_t algorithm = 20;
} // namespace stream

} // namespace biobench
