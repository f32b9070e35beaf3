#include "burrscan/capture.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <istream>
#include <sstream>

#include "burrscan/dns_wire.hpp"
#include "burrscan/errors.hpp"

namespace burrscan {

namespace {

constexpr std::uint32_t kMagicMicros = 0xa1b2c3d4;
constexpr std::uint32_t kMagicNanos = 0xa1b23c4d;
constexpr std::size_t kGlobalHeaderSize = 24;
constexpr std::size_t kRecordHeaderSize = 16;
constexpr std::uint32_t kMaxRecordBytes = 262144;

constexpr std::uint16_t kEtherIpv4 = 0x0800;
constexpr std::uint16_t kEtherIpv6 = 0x86dd;
constexpr std::uint16_t kEtherVlan = 0x8100;
constexpr std::uint16_t kEtherQinQ = 0x88a8;
constexpr std::uint8_t kProtoUdp = 17;

std::uint32_t bswap32(std::uint32_t v) noexcept {
  return (v >> 24) | ((v >> 8) & 0xff00) | ((v << 8) & 0xff0000) | (v << 24);
}

std::uint32_t load_le32(const std::uint8_t* p) noexcept {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t load_be16(const std::uint8_t* p) noexcept {
  return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

void store_le32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

void push_be16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

std::string ipv4_text(const std::uint8_t* p) {
  char buf[INET_ADDRSTRLEN] = {};
  inet_ntop(AF_INET, p, buf, sizeof(buf));
  return buf;
}

std::string ipv6_text(const std::uint8_t* p) {
  char buf[INET6_ADDRSTRLEN] = {};
  inet_ntop(AF_INET6, p, buf, sizeof(buf));
  return buf;
}

}  // namespace

IngestStats& IngestStats::operator+=(const IngestStats& other) noexcept {
  packets_seen += other.packets_seen;
  dns_messages += other.dns_messages;
  queries_emitted += other.queries_emitted;
  malformed_skipped += other.malformed_skipped;
  responses_skipped += other.responses_skipped;
  empty_skipped += other.empty_skipped;
  unsupported_skipped += other.unsupported_skipped;
  return *this;
}

CaptureReader::CaptureReader(std::unique_ptr<std::istream> in, std::uint16_t port)
    : in_(std::move(in)), port_(port) {
  std::array<std::uint8_t, kGlobalHeaderSize> header{};
  in_->read(reinterpret_cast<char*>(header.data()), header.size());
  if (static_cast<std::size_t>(in_->gcount()) != header.size()) {
    throw BadMagic("file too short for a capture header");
  }
  const std::uint32_t magic = load_le32(header.data());
  if (magic == kMagicMicros || magic == kMagicNanos) {
    swapped_ = false;
  } else if (bswap32(magic) == kMagicMicros || bswap32(magic) == kMagicNanos) {
    swapped_ = true;
  } else {
    std::ostringstream msg;
    msg << "unrecognized capture magic 0x" << std::hex << magic;
    throw BadMagic(msg.str());
  }
  nanos_ = fix32(magic) == kMagicNanos;
  link_type_ = fix32(load_le32(header.data() + 20)) & 0x0fffffff;
}

CaptureReader::~CaptureReader() = default;
CaptureReader::CaptureReader(CaptureReader&&) noexcept = default;
CaptureReader& CaptureReader::operator=(CaptureReader&&) noexcept = default;

CaptureReader CaptureReader::open(const std::filesystem::path& path, std::uint16_t port) {
  auto file = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*file) throw IoError("cannot open capture '" + path.string() + "'");
  return CaptureReader(std::move(file), port);
}

CaptureReader CaptureReader::from_bytes(std::span<const std::uint8_t> bytes, std::uint16_t port) {
  auto stream = std::make_unique<std::istringstream>(
      std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()), std::ios::binary);
  return CaptureReader(std::move(stream), port);
}

std::uint32_t CaptureReader::fix32(std::uint32_t v) const noexcept {
  return swapped_ ? bswap32(v) : v;
}

bool CaptureReader::read_record(std::vector<std::uint8_t>& packet, std::int64_t& ts_us) {
  std::array<std::uint8_t, kRecordHeaderSize> header{};
  in_->read(reinterpret_cast<char*>(header.data()), header.size());
  const auto got = static_cast<std::size_t>(in_->gcount());
  if (got == 0) return false;
  if (got != header.size()) {
    // Trailing garbage shorter than a record header.
    ++stats_.packets_seen;
    ++stats_.malformed_skipped;
    return false;
  }
  const std::uint32_t ts_sec = fix32(load_le32(header.data()));
  const std::uint32_t ts_frac = fix32(load_le32(header.data() + 4));
  const std::uint32_t incl_len = fix32(load_le32(header.data() + 8));

  ++stats_.packets_seen;
  if (incl_len > kMaxRecordBytes) {
    // The framing is lost; nothing after this point can be trusted.
    ++stats_.malformed_skipped;
    return false;
  }
  packet.resize(incl_len);
  in_->read(reinterpret_cast<char*>(packet.data()), incl_len);
  if (static_cast<std::uint32_t>(in_->gcount()) != incl_len) {
    ++stats_.malformed_skipped;
    return false;
  }
  ts_us = static_cast<std::int64_t>(ts_sec) * 1'000'000 +
          static_cast<std::int64_t>(nanos_ ? ts_frac / 1000 : ts_frac);
  return true;
}

CaptureReader::Outcome CaptureReader::decode_packet(std::span<const std::uint8_t> p,
                                                    std::int64_t ts_us, QueryRecord& out) {
  std::size_t off = 0;
  std::uint16_t ether_type = 0;

  switch (link_type_) {
    case static_cast<std::uint32_t>(LinkType::kEthernet):
      if (p.size() < 14) return Outcome::kMalformed;
      ether_type = load_be16(&p[12]);
      off = 14;
      while (ether_type == kEtherVlan || ether_type == kEtherQinQ) {
        if (p.size() < off + 4) return Outcome::kMalformed;
        ether_type = load_be16(&p[off + 2]);
        off += 4;
      }
      break;
    case static_cast<std::uint32_t>(LinkType::kLinuxSll):
      if (p.size() < 16) return Outcome::kMalformed;
      ether_type = load_be16(&p[14]);
      off = 16;
      break;
    case static_cast<std::uint32_t>(LinkType::kLinuxSll2):
      if (p.size() < 20) return Outcome::kMalformed;
      ether_type = load_be16(&p[0]);
      off = 20;
      break;
    default:
      return Outcome::kUnsupported;
  }

  std::size_t end = p.size();
  std::string src;
  if (ether_type == kEtherIpv4) {
    if (p.size() < off + 20) return Outcome::kMalformed;
    const std::uint8_t* ip = &p[off];
    if ((ip[0] >> 4) != 4) return Outcome::kMalformed;
    const std::size_t ihl = static_cast<std::size_t>(ip[0] & 0x0f) * 4;
    const std::size_t total = load_be16(ip + 2);
    if (ihl < 20 || total < ihl || p.size() < off + ihl) return Outcome::kMalformed;
    if (ip[9] != kProtoUdp) return Outcome::kUnsupported;
    const std::uint16_t frag = load_be16(ip + 6);
    if ((frag & 0x3fff) != 0) return Outcome::kUnsupported;  // fragments
    end = std::min(end, off + total);
    src = ipv4_text(ip + 12);
    off += ihl;
  } else if (ether_type == kEtherIpv6) {
    if (p.size() < off + 40) return Outcome::kMalformed;
    const std::uint8_t* ip = &p[off];
    if ((ip[0] >> 4) != 6) return Outcome::kMalformed;
    if (ip[6] != kProtoUdp) return Outcome::kUnsupported;
    end = std::min(end, off + 40 + load_be16(ip + 4));
    src = ipv6_text(ip + 8);
    off += 40;
  } else {
    return Outcome::kUnsupported;
  }

  if (end < off + 8) return Outcome::kMalformed;
  const std::uint16_t sport = load_be16(&p[off]);
  const std::uint16_t dport = load_be16(&p[off + 2]);
  const std::size_t udp_len = load_be16(&p[off + 4]);
  if (sport != port_ && dport != port_) return Outcome::kUnsupported;

  ++stats_.dns_messages;
  if (udp_len < 8) return Outcome::kMalformed;
  end = std::min(end, off + udp_len);
  const auto dns = p.subspan(off + 8, end - (off + 8));

  if (dns.size() < 12) return Outcome::kMalformed;
  if (dns[2] & 0x80) return Outcome::kResponse;
  const std::uint16_t qdcount = load_be16(&dns[4]);
  if (qdcount == 0) return Outcome::kEmpty;
  if (qdcount > 1) return Outcome::kMalformed;  // RFC 9619: one question per query

  try {
    auto name = decode_qname(dns, 12);
    if (name.next_offset + 4 > dns.size()) return Outcome::kMalformed;
    out.timestamp_us = ts_us;
    out.qname = std::move(name.qname);
    out.qtype = load_be16(&dns[name.next_offset]);
    out.src = std::move(src);
  } catch (const MalformedName&) {
    return Outcome::kMalformed;
  }
  return Outcome::kQuery;
}

std::optional<QueryRecord> CaptureReader::next() {
  std::int64_t ts_us = 0;
  while (!done_) {
    if (!read_record(buffer_, ts_us)) {
      done_ = true;
      break;
    }
    QueryRecord record;
    switch (decode_packet(buffer_, ts_us, record)) {
      case Outcome::kQuery:
        ++stats_.queries_emitted;
        return record;
      case Outcome::kResponse:
        ++stats_.responses_skipped;
        break;
      case Outcome::kEmpty:
        ++stats_.empty_skipped;
        break;
      case Outcome::kMalformed:
        ++stats_.malformed_skipped;
        break;
      case Outcome::kUnsupported:
        ++stats_.unsupported_skipped;
        break;
    }
  }
  return std::nullopt;
}

CaptureResult parse_capture(const std::filesystem::path& path, std::uint16_t port) {
  auto reader = CaptureReader::open(path, port);
  CaptureResult result;
  while (auto record = reader.next()) result.records.push_back(std::move(*record));
  result.stats = reader.stats();
  return result;
}

bool looks_like_capture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::array<std::uint8_t, 4> magic{};
  in.read(reinterpret_cast<char*>(magic.data()), magic.size());
  if (in.gcount() != 4) return false;
  const std::uint32_t m = load_le32(magic.data());
  return m == kMagicMicros || m == kMagicNanos || bswap32(m) == kMagicMicros ||
         bswap32(m) == kMagicNanos;
}

// --- writing ----------------------------------------------------------------

std::vector<std::uint8_t> build_dns_query(std::uint16_t id, std::string_view qname,
                                          std::uint16_t qtype) {
  std::vector<std::uint8_t> msg;
  push_be16(msg, id);
  push_be16(msg, 0x0100);  // RD
  push_be16(msg, 1);
  push_be16(msg, 0);
  push_be16(msg, 0);
  push_be16(msg, 0);
  const auto name = encode_qname(qname);
  msg.insert(msg.end(), name.begin(), name.end());
  push_be16(msg, qtype);
  push_be16(msg, 1);  // IN
  return msg;
}

std::vector<std::uint8_t> build_udp_frame(std::array<std::uint8_t, 4> src_ip,
                                          std::array<std::uint8_t, 4> dst_ip,
                                          std::uint16_t src_port, std::uint16_t dst_port,
                                          std::span<const std::uint8_t> payload) {
  std::vector<std::uint8_t> f;
  f.reserve(42 + payload.size());
  const std::uint8_t dst_mac[6] = {0x02, 0, 0, 0, 0, 0x01};
  const std::uint8_t src_mac[6] = {0x02, 0, 0, 0, 0, 0x02};
  f.insert(f.end(), dst_mac, dst_mac + 6);
  f.insert(f.end(), src_mac, src_mac + 6);
  push_be16(f, kEtherIpv4);

  const std::size_t ip_start = f.size();
  const auto total = static_cast<std::uint16_t>(20 + 8 + payload.size());
  f.push_back(0x45);
  f.push_back(0);
  push_be16(f, total);
  push_be16(f, 0);
  push_be16(f, 0x4000);  // DF
  f.push_back(64);
  f.push_back(kProtoUdp);
  push_be16(f, 0);  // checksum, filled below
  f.insert(f.end(), src_ip.begin(), src_ip.end());
  f.insert(f.end(), dst_ip.begin(), dst_ip.end());
  std::uint32_t sum = 0;
  for (std::size_t i = ip_start; i < ip_start + 20; i += 2) sum += load_be16(&f[i]);
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  const auto checksum = static_cast<std::uint16_t>(~sum);
  f[ip_start + 10] = static_cast<std::uint8_t>(checksum >> 8);
  f[ip_start + 11] = static_cast<std::uint8_t>(checksum & 0xff);

  push_be16(f, src_port);
  push_be16(f, dst_port);
  push_be16(f, static_cast<std::uint16_t>(8 + payload.size()));
  push_be16(f, 0);  // UDP checksum optional over IPv4
  f.insert(f.end(), payload.begin(), payload.end());
  return f;
}

CaptureWriter::CaptureWriter(std::ostream& out, LinkType link, std::uint32_t snaplen) : out_(out) {
  store_le32(out_, kMagicMicros);
  const char version[4] = {2, 0, 4, 0};
  out_.write(version, 4);
  store_le32(out_, 0);
  store_le32(out_, 0);
  store_le32(out_, snaplen);
  store_le32(out_, static_cast<std::uint32_t>(link));
}

void CaptureWriter::write_packet(std::int64_t timestamp_us, std::span<const std::uint8_t> frame) {
  write_truncated(timestamp_us, frame, frame.size());
}

void CaptureWriter::write_truncated(std::int64_t timestamp_us, std::span<const std::uint8_t> frame,
                                    std::size_t captured) {
  captured = std::min(captured, frame.size());
  store_le32(out_, static_cast<std::uint32_t>(timestamp_us / 1'000'000));
  store_le32(out_, static_cast<std::uint32_t>(timestamp_us % 1'000'000));
  store_le32(out_, static_cast<std::uint32_t>(captured));
  store_le32(out_, static_cast<std::uint32_t>(frame.size()));
  out_.write(reinterpret_cast<const char*>(frame.data()), static_cast<std::streamsize>(captured));
}

void write_query_capture(const std::filesystem::path& path, std::span<const QueryRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write capture '" + path.string() + "'");
  CaptureWriter writer(out);
  const std::array<std::uint8_t, 4> resolver = {10, 0, 0, 53};
  std::uint16_t id = 0;
  for (const auto& r : records) {
    std::array<std::uint8_t, 4> client = {10, 0, 0, 1};
    if (r.src) {
      in_addr addr{};
      if (inet_pton(AF_INET, r.src->c_str(), &addr) == 1) {
        std::memcpy(client.data(), &addr, 4);
      }
    }
    const auto msg = build_dns_query(id++, r.qname, r.qtype);
    const auto sport = static_cast<std::uint16_t>(1024 + (id % 60000));
    writer.write_packet(r.timestamp_us, build_udp_frame(client, resolver, sport, 53, msg));
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace burrscan
