#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace burrscan {

// One observed DNS question. The name is stored in normalized presentation
// form: lowercase ASCII, no trailing root dot, bytes outside the printable
// range (and ',' '"') written as %xx.
struct QueryRecord {
  std::int64_t timestamp_us = 0;
  std::string qname;
  std::uint16_t qtype = 1;
  std::optional<std::string> src;

  // Length used by every histogram: characters of the normalized name,
  // dots included.
  int qname_len() const noexcept { return static_cast<int>(qname.size()); }

  // Builds a record from a name as it appeared in a log or capture.
  static QueryRecord make(std::int64_t timestamp_us, std::string_view raw_name,
                          std::uint16_t qtype = 1,
                          std::optional<std::string> src = std::nullopt);

  friend bool operator==(const QueryRecord&, const QueryRecord&) = default;
};

// Normalizes a presentation-format name. '%' is kept literally so that an
// already normalized name is a fixed point.
std::string normalize_qname(std::string_view raw);

// True when `name` satisfies the QueryRecord name invariants.
bool is_normalized_qname(std::string_view name) noexcept;

// Appends one byte in normalized form (used by the wire decoder, which also
// escapes '.' and '%' found inside a label).
void append_normalized_byte(std::string& out, unsigned char byte, bool in_wire_label);

}  // namespace burrscan
