#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace burrscan {

inline constexpr std::size_t kMaxLabelBytes = 63;
inline constexpr std::size_t kMaxNameBytes = 255;
inline constexpr int kMaxPointerHops = 127;

struct DecodedName {
  std::string qname;
  std::size_t next_offset = 0;  // first byte after the name at the original position
};

// Decodes an RFC 1035 name starting at `offset`, following compression
// pointers. Throws MalformedName.
DecodedName decode_qname(std::span<const std::uint8_t> message, std::size_t offset);

// Inverse of decode_qname for a normalized name (%xx escapes are unescaped).
// Throws MalformedName for empty inner labels or size limits.
std::vector<std::uint8_t> encode_qname(std::string_view qname);

}  // namespace burrscan
