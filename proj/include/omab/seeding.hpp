#pragma once

#include <cstdint>
#include <string_view>

namespace omab {

/// splitmix64 finalizer; stable across platforms.
std::uint64_t splitmix64(std::uint64_t x);

/// FNV-1a over the raw bytes of s.
std::uint64_t fnv1a64(std::string_view s);

/// Stable per-cell seed: derive_seed(base, stream, index) =
/// splitmix64(splitmix64(base ^ fnv1a64(stream)) + index).
/// Every (policy, seed-index) cell of an experiment grid draws its RNG seed
/// through this, so no run shares entropy and no run touches ambient state.
std::uint64_t derive_seed(std::uint64_t base, std::string_view stream, std::uint64_t index);

}  // namespace omab
