#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "burrscan/query_record.hpp"
#include "burrscan/window.hpp"

namespace burrscan {

enum class TrafficLabel { kBenign, kTunnel };

std::string_view to_string(TrafficLabel label) noexcept;
TrafficLabel parse_traffic_label(std::string_view text);

struct LabeledQuery {
  QueryRecord record;
  TrafficLabel label = TrafficLabel::kBenign;

  friend bool operator==(const LabeledQuery&, const LabeledQuery&) = default;
};

// Benign traffic: name lengths ~ round(Normal(mu, sigma)) clamped to
// [clip_min, clip_max]; every distinct name is queried Uniform{1..max_visits}
// times at uniform instants over [start_us, start_us + span).
struct BenignModel {
  std::uint64_t unique_names = 50'000;
  double mu = 15.0;
  double sigma = 5.0;
  int clip_min = 4;
  int clip_max = 60;
  std::uint32_t max_visits = 20;
  std::int64_t start_us = 1'600'000'000'000'000;
  Micros span = 30 * kDay;
  std::uint64_t seed = 1;

  void validate() const;  // std::invalid_argument
};

enum class TunnelEncoder { kBase32Like, kHexLike };

std::string_view to_string(TunnelEncoder encoder) noexcept;
TunnelEncoder parse_tunnel_encoder(std::string_view text);

// `query_count` queries of exactly `qname_len` characters under `suffix`,
// random encoded payload labels, timestamps inside the burst interval.
struct TunnelModel {
  std::string suffix = "b.tunnel.com";
  int qname_len = 67;
  std::uint64_t query_count = 5'000;
  std::int64_t burst_start_us = 1'600'000'000'000'000;
  Micros burst_span = kDay;
  TunnelEncoder encoder = TunnelEncoder::kBase32Like;
  std::uint64_t seed = 1;

  void validate() const;  // std::invalid_argument
};

// Deterministic per seed; sorted by timestamp.
std::vector<LabeledQuery> generate_benign(const BenignModel& model);

// Appends the tunnel queries and re-sorts the merged stream by timestamp.
std::vector<LabeledQuery> inject_tunnel(std::vector<LabeledQuery> records, const TunnelModel& model);

// Payload text that pads the name to model.qname_len (exposed for tests).
std::string encode_tunnel_name(const TunnelModel& model, std::uint64_t draw);

std::vector<QueryRecord> records_of(std::span<const LabeledQuery> queries);

// qname -> label; a name seen under both labels is a tunnel name.
std::map<std::string, TrafficLabel> labels_of(std::span<const LabeledQuery> queries);

// Sidecar `qname,label`.
void write_labels_csv(const std::map<std::string, TrafficLabel>& labels, const std::filesystem::path& path);
std::map<std::string, TrafficLabel> read_labels_csv(const std::filesystem::path& path);

}  // namespace burrscan
