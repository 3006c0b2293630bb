#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace mrc {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char b : s) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

/// The 64-byte (512-bit) per-library filter consulted before any symbol
/// table is opened. Two bits per name: h mod 512 and (h >> 17) mod 512.
/// False positives possible, false negatives never.
struct BloomFilter {
  static constexpr std::size_t k_bits = 512;
  std::array<std::uint8_t, 64> bytes{};

  static std::pair<std::uint32_t, std::uint32_t> bits_for(std::string_view name) {
    std::uint64_t h = fnv1a64(name);
    return {static_cast<std::uint32_t>(h % k_bits),
            static_cast<std::uint32_t>((h >> 17) % k_bits)};
  }

  void set_bit(std::uint32_t i) { bytes[i >> 3] |= static_cast<std::uint8_t>(1u << (i & 7)); }
  bool test_bit(std::uint32_t i) const { return (bytes[i >> 3] >> (i & 7)) & 1u; }

  void insert(std::string_view name) {
    auto [b1, b2] = bits_for(name);
    set_bit(b1);
    set_bit(b2);
  }

  bool probe(std::string_view name) const {
    auto [b1, b2] = bits_for(name);
    return test_bit(b1) && test_bit(b2);
  }

  friend bool operator==(const BloomFilter&, const BloomFilter&) = default;
};

}  // namespace mrc
