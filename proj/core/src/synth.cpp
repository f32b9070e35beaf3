#include "burrscan/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "burrscan/dns_wire.hpp"
#include "burrscan/errors.hpp"
#include "burrscan/query_log.hpp"

namespace burrscan {

namespace {

// Eleven letters keep benign labels below 3.46 bits/char.
constexpr std::string_view kVowels = "aeiou";
constexpr std::string_view kConsonants = "klmnrt";

struct Suffix {
  std::string_view text;
  int weight;
};

constexpr std::array<Suffix, 12> kSuffixPool = {{
    {"com", 40}, {"net", 10}, {"org", 8}, {"cn", 10}, {"io", 3}, {"de", 3},
    {"com.cn", 8}, {"edu.cn", 3}, {"co.uk", 3}, {"info", 4}, {"cloud", 4}, {"tech", 4},
}};

constexpr std::string_view kBase32 = "abcdefghijklmnopqrstuvwxyz234567";
constexpr std::string_view kHex = "0123456789abcdef";

using Rng = std::mt19937_64;

std::uint64_t uniform(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

std::string pronounceable(Rng& rng, std::size_t len) {
  std::string out;
  out.reserve(len);
  bool vowel = uniform(rng, 0, 1) == 0;
  for (std::size_t i = 0; i < len; ++i) {
    const auto& set = vowel ? kVowels : kConsonants;
    out.push_back(set[uniform(rng, 0, set.size() - 1)]);
    // Mostly alternate, sometimes double up.
    if (uniform(rng, 0, 4) != 0) vowel = !vowel;
  }
  return out;
}

std::string benign_name(Rng& rng, int length) {
  int total_weight = 0;
  for (const auto& s : kSuffixPool) {
    if (static_cast<int>(s.text.size()) + 2 <= length) total_weight += s.weight;
  }
  if (total_weight == 0) return pronounceable(rng, static_cast<std::size_t>(length));

  auto pick = static_cast<int>(uniform(rng, 0, static_cast<std::uint64_t>(total_weight - 1)));
  std::string_view suffix;
  for (const auto& s : kSuffixPool) {
    if (static_cast<int>(s.text.size()) + 2 > length) continue;
    if (pick < s.weight) {
      suffix = s.text;
      break;
    }
    pick -= s.weight;
  }

  const int left = length - static_cast<int>(suffix.size()) - 1;
  std::string name;
  if (left >= 9 && left <= 60 && uniform(rng, 0, 1) == 0) {
    const int host = static_cast<int>(uniform(rng, 2, static_cast<std::uint64_t>(left - 6)));
    name = pronounceable(rng, static_cast<std::size_t>(host)) + "." +
           pronounceable(rng, static_cast<std::size_t>(left - host - 1));
  } else {
    // Long hosts are split into labels of at most 40 characters.
    for (int remaining = left; remaining > 0;) {
      const int take = remaining > 40 ? std::min(40, remaining - 2) : remaining;
      if (!name.empty()) name.push_back('.');
      name += pronounceable(rng, static_cast<std::size_t>(take));
      remaining -= take + (remaining > take ? 1 : 0);
    }
  }
  name.push_back('.');
  name.append(suffix);
  return name;
}

std::string client_address(Rng& rng) {
  return "10.0." + std::to_string(uniform(rng, 0, 255)) + "." + std::to_string(uniform(rng, 1, 254));
}

void sort_by_time(std::vector<LabeledQuery>& records) {
  std::stable_sort(records.begin(), records.end(), [](const LabeledQuery& a, const LabeledQuery& b) {
    return a.record.timestamp_us < b.record.timestamp_us;
  });
}

}  // namespace

std::string_view to_string(TrafficLabel label) noexcept {
  return label == TrafficLabel::kTunnel ? "tunnel" : "benign";
}

TrafficLabel parse_traffic_label(std::string_view text) {
  if (text == "benign") return TrafficLabel::kBenign;
  if (text == "tunnel") return TrafficLabel::kTunnel;
  throw SchemaError("unknown label '" + std::string(text) + "' (expected benign or tunnel)");
}

std::string_view to_string(TunnelEncoder encoder) noexcept {
  return encoder == TunnelEncoder::kHexLike ? "hexlike" : "base32like";
}

TunnelEncoder parse_tunnel_encoder(std::string_view text) {
  if (text == "base32like") return TunnelEncoder::kBase32Like;
  if (text == "hexlike") return TunnelEncoder::kHexLike;
  throw SchemaError("unknown encoder '" + std::string(text) + "' (expected base32like or hexlike)");
}

void BenignModel::validate() const {
  if (max_visits < 1) throw std::invalid_argument("max_visits must be >= 1");
  if (clip_min < 1 || clip_min >= clip_max) throw std::invalid_argument("need 1 <= clip_min < clip_max");
  if (clip_max > 253) throw std::invalid_argument("clip_max exceeds the longest encodable name");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (span.count() <= 0) throw std::invalid_argument("span must be positive");
  if (start_us < 0) throw std::invalid_argument("start_us must be >= 0");
}

void TunnelModel::validate() const {
  if (query_count < 1) throw std::invalid_argument("tunnel query_count must be >= 1");
  if (suffix.empty()) throw std::invalid_argument("tunnel suffix is empty");
  if (qname_len < static_cast<int>(suffix.size()) + 2) {
    throw std::invalid_argument("qname_len leaves no room for a payload label");
  }
  if (qname_len > 253) throw std::invalid_argument("qname_len exceeds the longest encodable name");
  if (burst_span.count() <= 0) throw std::invalid_argument("burst_span must be positive");
  if (burst_start_us < 0) throw std::invalid_argument("burst_start_us must be >= 0");
}

std::vector<LabeledQuery> generate_benign(const BenignModel& model) {
  model.validate();
  Rng rng(model.seed);
  std::normal_distribution<double> length_law(model.mu, model.sigma);
  std::unordered_set<std::string> used;
  used.reserve(model.unique_names * 2);

  struct Visitor {
    std::string name;
    std::string src;
    std::uint16_t qtype = 1;
  };
  struct Visit {
    std::int64_t ts;
    std::uint32_t visitor;
  };
  std::vector<Visitor> visitors;
  visitors.reserve(model.unique_names);
  std::vector<Visit> visits;
  visits.reserve(model.unique_names * (model.max_visits + 1) / 2);
  const auto span = static_cast<std::uint64_t>(model.span.count());

  for (std::uint64_t i = 0; i < model.unique_names; ++i) {
    const int length = std::clamp(static_cast<int>(std::lround(length_law(rng))), model.clip_min, model.clip_max);
    std::string name;
    for (int attempt = 0;; ++attempt) {
      name = attempt < 32 ? benign_name(rng, length) : pronounceable(rng, static_cast<std::size_t>(length));
      if (used.insert(name).second) break;
      if (attempt > 10'000) throw std::runtime_error("benign name space exhausted at length " + std::to_string(length));
    }
    const auto count = uniform(rng, 1, model.max_visits);
    const std::uint16_t qtype = uniform(rng, 0, 4) == 0 ? 28 : 1;
    visitors.push_back({std::move(name), client_address(rng), qtype});
    for (std::uint64_t v = 0; v < count; ++v) {
      const auto ts = model.start_us + static_cast<std::int64_t>(uniform(rng, 0, span - 1));
      visits.push_back({ts, static_cast<std::uint32_t>(i)});
    }
  }
  // Sorting the small visit entries keeps the order a stable sort of the
  // full records would give without moving strings around.
  std::stable_sort(visits.begin(), visits.end(), [](const Visit& a, const Visit& b) { return a.ts < b.ts; });

  std::vector<LabeledQuery> out;
  out.reserve(visits.size());
  for (const auto& v : visits) {
    const Visitor& who = visitors[v.visitor];
    out.push_back({QueryRecord{v.ts, who.name, who.qtype, who.src}, TrafficLabel::kBenign});
  }
  return out;
}

std::string encode_tunnel_name(const TunnelModel& model, std::uint64_t draw) {
  Rng rng(model.seed ^ (0x9e3779b97f4a7c15ULL * (draw + 1)));
  const auto& alphabet = model.encoder == TunnelEncoder::kHexLike ? kHex : kBase32;
  int remaining = model.qname_len - static_cast<int>(model.suffix.size()) - 1;
  std::string name;
  name.reserve(static_cast<std::size_t>(model.qname_len));
  while (remaining > 0) {
    const int take = remaining > static_cast<int>(kMaxLabelBytes)
                         ? std::min(static_cast<int>(kMaxLabelBytes), remaining - 2)
                         : remaining;
    for (int i = 0; i < take; ++i) name.push_back(alphabet[uniform(rng, 0, alphabet.size() - 1)]);
    name.push_back('.');
    remaining -= take + 1;
  }
  name.append(model.suffix);
  return name;
}

std::vector<LabeledQuery> inject_tunnel(std::vector<LabeledQuery> records, const TunnelModel& model) {
  model.validate();
  Rng rng(model.seed);
  const auto span = static_cast<std::uint64_t>(model.burst_span.count());
  const std::string suffix = normalize_qname(model.suffix);
  TunnelModel normalized = model;
  normalized.suffix = suffix;
  records.reserve(records.size() + model.query_count);
  const std::string src = "10.9.9." + std::to_string(uniform(rng, 1, 254));
  for (std::uint64_t i = 0; i < model.query_count; ++i) {
    const auto ts = model.burst_start_us + static_cast<std::int64_t>(uniform(rng, 0, span - 1));
    const std::uint16_t qtype = uniform(rng, 0, 3) == 0 ? 16 : 10;  // TXT / NULL, iodine-style
    records.push_back({QueryRecord{ts, encode_tunnel_name(normalized, i), qtype, src}, TrafficLabel::kTunnel});
  }
  sort_by_time(records);
  return records;
}

std::vector<QueryRecord> records_of(std::span<const LabeledQuery> queries) {
  std::vector<QueryRecord> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(q.record);
  return out;
}

std::map<std::string, TrafficLabel> labels_of(std::span<const LabeledQuery> queries) {
  std::map<std::string, TrafficLabel> labels;
  for (const auto& q : queries) {
    auto [it, inserted] = labels.emplace(q.record.qname, q.label);
    if (!inserted && q.label == TrafficLabel::kTunnel) it->second = TrafficLabel::kTunnel;
  }
  return labels;
}

void write_labels_csv(const std::map<std::string, TrafficLabel>& labels, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write labels '" + path.string() + "'");
  out << "qname,label\n";
  for (const auto& [name, label] : labels) out << name << ',' << to_string(label) << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::map<std::string, TrafficLabel> read_labels_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read labels '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("labels file '" + path.string() + "' is empty");
  const auto header = csv::split_line(line);
  if (header.size() < 2 || header[0] != "qname" || header[1] != "label") {
    throw SchemaError("labels header must be 'qname,label'");
  }
  std::map<std::string, TrafficLabel> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = csv::split_line(line);
    if (fields.size() < 2) throw SchemaError("labels line " + std::to_string(line_no) + ": missing column 'label'");
    labels[normalize_qname(fields[0])] = parse_traffic_label(fields[1]);
  }
  return labels;
}

}  // namespace burrscan
