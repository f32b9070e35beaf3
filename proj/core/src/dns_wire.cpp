#include "burrscan/dns_wire.hpp"

#include "burrscan/errors.hpp"
#include "burrscan/query_record.hpp"

namespace burrscan {

namespace {

int hex_value(char c) noexcept {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

void encode_label(std::string_view text, std::vector<std::uint8_t>& out) {
  const std::size_t len_pos = out.size();
  out.push_back(0);
  std::size_t len = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    auto byte = static_cast<std::uint8_t>(text[i]);
    if (text[i] == '%' && i + 2 < text.size()) {
      const int hi = hex_value(text[i + 1]);
      const int lo = hex_value(text[i + 2]);
      if (hi >= 0 && lo >= 0) {
        byte = static_cast<std::uint8_t>(hi * 16 + lo);
        i += 2;
      }
    }
    out.push_back(byte);
    ++len;
  }
  if (len == 0) throw MalformedName("empty label in '" + std::string(text) + "'");
  if (len > kMaxLabelBytes) throw MalformedName("label longer than 63 bytes");
  out[len_pos] = static_cast<std::uint8_t>(len);
}

}  // namespace

DecodedName decode_qname(std::span<const std::uint8_t> message, std::size_t offset) {
  DecodedName result;
  std::size_t pos = offset;
  std::size_t wire_len = 0;
  bool jumped = false;
  int hops = 0;

  for (;;) {
    if (pos >= message.size()) throw MalformedName("name runs past end of message");
    const std::uint8_t len = message[pos];

    if ((len & 0xc0) == 0xc0) {
      if (pos + 1 >= message.size()) throw MalformedName("truncated compression pointer");
      const std::size_t target = (static_cast<std::size_t>(len & 0x3f) << 8) | message[pos + 1];
      if (!jumped) result.next_offset = pos + 2;
      jumped = true;
      if (++hops > kMaxPointerHops) throw MalformedName("compression pointer loop");
      if (target >= message.size()) throw MalformedName("compression pointer out of bounds");
      pos = target;
      continue;
    }
    if ((len & 0xc0) != 0) throw MalformedName("reserved label type");

    if (len == 0) {
      if (!jumped) result.next_offset = pos + 1;
      break;
    }

    wire_len += 1 + len;
    if (wire_len + 1 > kMaxNameBytes) throw MalformedName("name longer than 255 bytes");
    if (pos + 1 + len > message.size()) throw MalformedName("label runs past end of message");
    if (!result.qname.empty()) result.qname.push_back('.');
    for (std::size_t i = 0; i < len; ++i) {
      append_normalized_byte(result.qname, message[pos + 1 + i], true);
    }
    pos += 1 + len;
  }
  return result;
}

std::vector<std::uint8_t> encode_qname(std::string_view qname) {
  std::vector<std::uint8_t> out;
  while (!qname.empty() && qname.back() == '.') qname.remove_suffix(1);
  while (!qname.empty()) {
    const auto dot = qname.find('.');
    encode_label(qname.substr(0, dot), out);
    if (dot == std::string_view::npos) break;
    qname.remove_prefix(dot + 1);
    if (qname.empty()) throw MalformedName("empty trailing label");
  }
  out.push_back(0);
  if (out.size() > kMaxNameBytes) throw MalformedName("name longer than 255 bytes");
  return out;
}

}  // namespace burrscan
