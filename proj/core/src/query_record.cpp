#include "burrscan/query_record.hpp"

#include <stdexcept>

namespace burrscan {

namespace {

constexpr char kHex[] = "0123456789abcdef";

bool needs_escape(unsigned char c) noexcept {
  return c < 0x21 || c > 0x7e || c == ',' || c == '"';
}

}  // namespace

void append_normalized_byte(std::string& out, unsigned char byte, bool in_wire_label) {
  const bool escape = needs_escape(byte) || (in_wire_label && (byte == '.' || byte == '%'));
  if (escape) {
    out.push_back('%');
    out.push_back(kHex[byte >> 4]);
    out.push_back(kHex[byte & 0x0f]);
  } else if (byte >= 'A' && byte <= 'Z') {
    out.push_back(static_cast<char>(byte - 'A' + 'a'));
  } else {
    out.push_back(static_cast<char>(byte));
  }
}

std::string normalize_qname(std::string_view raw) {
  while (!raw.empty() && raw.back() == '.') raw.remove_suffix(1);
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) append_normalized_byte(out, static_cast<unsigned char>(c), false);
  return out;
}

bool is_normalized_qname(std::string_view name) noexcept {
  if (!name.empty() && name.back() == '.') return false;
  for (char ch : name) {
    const auto c = static_cast<unsigned char>(ch);
    if (needs_escape(c)) return false;
    if (c >= 'A' && c <= 'Z') return false;
  }
  return true;
}

QueryRecord QueryRecord::make(std::int64_t timestamp_us, std::string_view raw_name,
                              std::uint16_t qtype, std::optional<std::string> src) {
  if (timestamp_us < 0) throw std::invalid_argument("negative timestamp");
  return QueryRecord{timestamp_us, normalize_qname(raw_name), qtype, std::move(src)};
}

}  // namespace burrscan
