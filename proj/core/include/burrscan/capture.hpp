#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "burrscan/query_record.hpp"

namespace burrscan {

// Every packet read ends up in exactly one of the *_skipped buckets or in
// queries_emitted, so
//   packets_seen == unsupported + malformed + responses + empty + queries.
// dns_messages counts UDP datagrams on the filtered port.
struct IngestStats {
  std::uint64_t packets_seen = 0;
  std::uint64_t dns_messages = 0;
  std::uint64_t queries_emitted = 0;
  std::uint64_t malformed_skipped = 0;
  std::uint64_t responses_skipped = 0;
  std::uint64_t empty_skipped = 0;
  std::uint64_t unsupported_skipped = 0;

  IngestStats& operator+=(const IngestStats& other) noexcept;
  friend bool operator==(const IngestStats&, const IngestStats&) = default;
};

enum class LinkType : std::uint32_t {
  kEthernet = 1,
  kLinuxSll = 113,
  kLinuxSll2 = 276,
};

// Streaming reader for classic pcap files (both byte orders, micro- and
// nanosecond variants). Emits one record per DNS query datagram on the port.
class CaptureReader {
 public:
  // Throws BadMagic when the global header is not a pcap header.
  explicit CaptureReader(std::unique_ptr<std::istream> in, std::uint16_t port = 53);
  ~CaptureReader();
  CaptureReader(CaptureReader&&) noexcept;
  CaptureReader& operator=(CaptureReader&&) noexcept;

  static CaptureReader open(const std::filesystem::path& path, std::uint16_t port = 53);
  static CaptureReader from_bytes(std::span<const std::uint8_t> bytes, std::uint16_t port = 53);

  std::optional<QueryRecord> next();

  const IngestStats& stats() const noexcept { return stats_; }
  std::uint32_t link_type() const noexcept { return link_type_; }
  bool nanosecond_timestamps() const noexcept { return nanos_; }

 private:
  enum class Outcome { kQuery, kResponse, kEmpty, kMalformed, kUnsupported };

  bool read_record(std::vector<std::uint8_t>& packet, std::int64_t& ts_us);
  Outcome decode_packet(std::span<const std::uint8_t> packet, std::int64_t ts_us, QueryRecord& out);
  std::uint32_t fix32(std::uint32_t v) const noexcept;

  std::unique_ptr<std::istream> in_;
  std::uint16_t port_;
  bool swapped_ = false;
  bool nanos_ = false;
  bool done_ = false;
  std::uint32_t link_type_ = 0;
  IngestStats stats_;
  std::vector<std::uint8_t> buffer_;
};

struct CaptureResult {
  std::vector<QueryRecord> records;
  IngestStats stats;
};

CaptureResult parse_capture(const std::filesystem::path& path, std::uint16_t port = 53);

// True when the first four bytes of the file are a pcap magic number.
bool looks_like_capture(const std::filesystem::path& path);

// --- Fixture and dataset writing -------------------------------------------

// A DNS query message with one question (RD set).
std::vector<std::uint8_t> build_dns_query(std::uint16_t id, std::string_view qname,
                                          std::uint16_t qtype = 1);

// Ethernet II + IPv4 + UDP frame around `payload`.
std::vector<std::uint8_t> build_udp_frame(std::array<std::uint8_t, 4> src_ip,
                                          std::array<std::uint8_t, 4> dst_ip,
                                          std::uint16_t src_port, std::uint16_t dst_port,
                                          std::span<const std::uint8_t> payload);

// Writes a little-endian microsecond pcap stream.
class CaptureWriter {
 public:
  explicit CaptureWriter(std::ostream& out, LinkType link = LinkType::kEthernet,
                         std::uint32_t snaplen = 65535);

  void write_packet(std::int64_t timestamp_us, std::span<const std::uint8_t> frame);
  // Writes `frame` but records only the first `captured` bytes.
  void write_truncated(std::int64_t timestamp_us, std::span<const std::uint8_t> frame,
                       std::size_t captured);

 private:
  std::ostream& out_;
};

// Convenience: one Ethernet/IPv4/UDP query frame per record, client address
// taken from record.src when it parses as dotted IPv4.
void write_query_capture(const std::filesystem::path& path, std::span<const QueryRecord> records);

}  // namespace burrscan
