#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "burrscan/burr.hpp"

namespace burrscan {

// Registered-domain suffixes that are never reported. One suffix per line,
// '#' starts a comment; `rank,domain` rows from top-sites lists are accepted.
class Whitelist {
 public:
  Whitelist() = default;
  explicit Whitelist(std::string source) : source_(std::move(source)) {}

  static Whitelist load(const std::filesystem::path& path);  // IoError when unreadable
  static Whitelist parse(std::istream& in, std::string source);

  void add(std::string_view suffix);
  // True when `family` equals an entry or is a subdomain of one.
  bool covers(std::string_view family) const;

  std::size_t size() const noexcept { return entries_.size(); }
  const std::string& source() const noexcept { return source_; }
  const std::set<std::string, std::less<>>& entries() const noexcept { return entries_; }

 private:
  std::set<std::string, std::less<>> entries_;
  std::string source_;
};

// Family key: last two labels, or last three when the last two form a known
// public suffix (co.uk, com.cn, in-addr.arpa, ...).
std::string registered_suffix(std::string_view qname);

// The part of `qname` left of its registered suffix; the leftmost label when
// the name is the registered domain itself.
std::string_view subdomain_part(std::string_view qname);

// Bits per character over `text`, dots excluded. Throws EmptyLabel.
double shannon_entropy(std::string_view text);

struct DomainEvidence {
  std::string family;     // registered suffix
  std::string qname;      // representative member (longest, then lexicographic)
  std::uint64_t access_count = 0;
  double entropy_bits_per_char = 0.0;
  double nonalpha_ratio = 0.0;
  int longest_label_len = 0;
  int total_len = 0;
  std::uint64_t distinct_subdomains_in_family = 0;
  std::vector<DomainCount> members;
};

// One evidence record per family, ordered by family.
std::vector<DomainEvidence> build_evidence(std::span<const DomainCount> domains);

struct Thresholds {
  double len_rule = 52;
  double entropy_rule = 3.5;
  double nonalpha_rule = 0.35;
  std::uint64_t fanout_subdomains = 10;
  std::uint64_t fanout_queries = 100;

  // `{len_rule, entropy_rule, nonalpha_rule, fanout_rule: {subdomains, queries}}`;
  // missing keys keep their defaults. Throws SchemaError.
  static Thresholds from_json(const nlohmann::json& j);
  static Thresholds load(const std::filesystem::path& path);
};

void to_json(nlohmann::json& j, const Thresholds& t);

enum class Classification { kBenign, kSuspicious, kTunnel };
std::string_view to_string(Classification c) noexcept;

struct RuleHit {
  std::string rule;  // R1..R4, whitelist, or ext:<verifier>
  double value = 0.0;
};

struct Verdict {
  std::string family;
  Classification classification = Classification::kBenign;
  std::vector<RuleHit> reasons;
  std::vector<DomainCount> members;
};

// Slot for out-of-band checks (e.g. sandbox replay against a resolver). A
// verifier that returns a value counts as a payload finding.
class Verifier {
 public:
  virtual ~Verifier() = default;
  virtual std::string name() const = 0;
  virtual std::optional<double> inspect(const DomainEvidence& evidence) const = 0;
};

// Whitelisted families are benign. Otherwise
//   R1 total_len > len_rule, R2 entropy > entropy_rule,
//   R3 nonalpha_ratio > nonalpha_rule,
//   R4 distinct subdomains >= fanout_subdomains and access_count >= fanout_queries;
// tunnel when (R2 or R3) and (R1 or R4), suspicious when one side fires.
Verdict classify(const DomainEvidence& evidence, const Whitelist& whitelist, const Thresholds& thresholds,
                 std::span<const Verifier* const> verifiers = {});

void to_json(nlohmann::json& j, const Verdict& v);

}  // namespace burrscan
