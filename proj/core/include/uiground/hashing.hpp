#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace uiground {

std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::string& path);

std::string base64_encode(std::string_view data);

/// Stable 64-bit hash (FNV-1a followed by a splitmix64 finalizer) used for
/// seeded sampling decisions. Independent of platform and standard library.
std::uint64_t stable_hash(std::uint64_t seed, std::string_view key) noexcept;
std::uint64_t stable_hash(std::uint64_t seed, std::string_view key, std::uint64_t index) noexcept;

/// Maps a 64-bit hash to [0,1) using its top 53 bits.
inline double unit_interval(std::uint64_t h) noexcept {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace uiground
