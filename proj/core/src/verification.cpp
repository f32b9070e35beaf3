#include "burrscan/verification.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>

#include <nlohmann/json.hpp>

#include "burrscan/errors.hpp"

namespace burrscan {

namespace {

constexpr std::array<std::string_view, 26> kPublicSuffixes = {
    "co.uk",  "ac.uk",  "gov.uk", "org.uk", "com.cn", "net.cn", "org.cn", "gov.cn", "edu.cn",
    "ac.cn",  "com.au", "net.au", "org.au", "co.jp",  "ne.jp",  "or.jp",  "com.br", "co.in",
    "co.kr",  "com.tw", "com.hk", "com.sg", "co.nz",  "com.mx", "in-addr.arpa", "ip6.arpa",
};

bool is_public_suffix(std::string_view s) {
  return std::find(kPublicSuffixes.begin(), kPublicSuffixes.end(), s) != kPublicSuffixes.end();
}

// Start offset of the n-th label counted from the right (n = 1 is the TLD).
std::size_t label_start_from_right(std::string_view qname, int n) {
  std::size_t pos = qname.size();
  for (int i = 0; i < n; ++i) {
    const auto dot = pos == 0 ? std::string_view::npos : qname.rfind('.', pos - 1);
    if (dot == std::string_view::npos) return 0;
    pos = dot;
  }
  return pos + 1;
}

std::string normalize_suffix(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n.");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n.");
  std::string out(text.substr(first, last - first + 1));
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

Whitelist Whitelist::parse(std::istream& in, std::string source) {
  Whitelist wl(std::move(source));
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    if (const auto comma = view.rfind(','); comma != std::string_view::npos) view = view.substr(comma + 1);
    wl.add(view);
  }
  return wl;
}

Whitelist Whitelist::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read whitelist '" + path.string() + "'");
  return parse(in, path.string());
}

void Whitelist::add(std::string_view suffix) {
  auto s = normalize_suffix(suffix);
  if (!s.empty()) entries_.insert(std::move(s));
}

bool Whitelist::covers(std::string_view family) const {
  for (std::size_t pos = 0;;) {
    if (entries_.find(family.substr(pos)) != entries_.end()) return true;
    const auto dot = family.find('.', pos);
    if (dot == std::string_view::npos) return false;
    pos = dot + 1;
  }
}

std::string registered_suffix(std::string_view qname) {
  const std::size_t two = label_start_from_right(qname, 2);
  if (two > 0 && is_public_suffix(qname.substr(two))) {
    return std::string(qname.substr(label_start_from_right(qname, 3)));
  }
  return std::string(qname.substr(two));
}

std::string_view subdomain_part(std::string_view qname) {
  const auto suffix = registered_suffix(qname);
  if (qname.size() > suffix.size() + 1) return qname.substr(0, qname.size() - suffix.size() - 1);
  return qname.substr(0, qname.find('.'));
}

double shannon_entropy(std::string_view text) {
  std::array<std::uint64_t, 256> freq{};
  std::uint64_t total = 0;
  for (char c : text) {
    if (c == '.') continue;
    ++freq[static_cast<unsigned char>(c)];
    ++total;
  }
  if (total == 0) throw EmptyLabel("entropy of an empty label");
  double h = 0.0;
  for (auto f : freq) {
    if (f == 0) continue;
    const double p = static_cast<double>(f) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

std::vector<DomainEvidence> build_evidence(std::span<const DomainCount> domains) {
  std::map<std::string, DomainEvidence> families;
  for (const auto& d : domains) {
    const auto family = registered_suffix(d.qname);
    auto& ev = families[family];
    ev.family = family;
    ev.access_count += d.count;
    ev.members.push_back(d);

    const auto sub = subdomain_part(d.qname);
    std::uint64_t chars = 0, nonalpha = 0;
    for (char c : sub) {
      if (c == '.') continue;
      ++chars;
      if (c < 'a' || c > 'z') ++nonalpha;
    }
    if (chars > 0) {
      ev.entropy_bits_per_char = std::max(ev.entropy_bits_per_char, shannon_entropy(sub));
      ev.nonalpha_ratio = std::max(ev.nonalpha_ratio, static_cast<double>(nonalpha) / static_cast<double>(chars));
    }
    std::string_view rest(d.qname);
    while (!rest.empty()) {
      const auto dot = rest.find('.');
      ev.longest_label_len = std::max(ev.longest_label_len, static_cast<int>(rest.substr(0, dot).size()));
      if (dot == std::string_view::npos) break;
      rest.remove_prefix(dot + 1);
    }
    const int len = static_cast<int>(d.qname.size());
    if (len > ev.total_len || (len == ev.total_len && d.qname < ev.qname)) ev.qname = d.qname;
    ev.total_len = std::max(ev.total_len, len);
  }

  std::vector<DomainEvidence> out;
  out.reserve(families.size());
  for (auto& [family, ev] : families) {
    std::sort(ev.members.begin(), ev.members.end());
    ev.members.erase(std::unique(ev.members.begin(), ev.members.end(),
                                 [](const DomainCount& a, const DomainCount& b) { return a.qname == b.qname; }),
                     ev.members.end());
    ev.distinct_subdomains_in_family = ev.members.size();
    out.push_back(std::move(ev));
  }
  return out;
}

Thresholds Thresholds::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("thresholds must be a JSON object");
  Thresholds t;
  auto number = [&](const nlohmann::json& obj, const char* key, auto& field) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw SchemaError(std::string("thresholds: '") + key + "' must be a number");
    if (v.template get<double>() < 0) throw SchemaError(std::string("thresholds: '") + key + "' must be >= 0");
    field = v.template get<std::remove_reference_t<decltype(field)>>();
  };
  for (const auto& [key, value] : j.items()) {
    if (key != "len_rule" && key != "entropy_rule" && key != "nonalpha_rule" && key != "fanout_rule") {
      throw SchemaError("thresholds: unknown key '" + key + "'");
    }
  }
  number(j, "len_rule", t.len_rule);
  number(j, "entropy_rule", t.entropy_rule);
  number(j, "nonalpha_rule", t.nonalpha_rule);
  if (j.contains("fanout_rule")) {
    const auto& f = j.at("fanout_rule");
    if (!f.is_object()) throw SchemaError("thresholds: 'fanout_rule' must be an object");
    number(f, "subdomains", t.fanout_subdomains);
    number(f, "queries", t.fanout_queries);
  }
  return t;
}

Thresholds Thresholds::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read thresholds '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("thresholds '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

void to_json(nlohmann::json& j, const Thresholds& t) {
  j = nlohmann::json{{"len_rule", t.len_rule},
                     {"entropy_rule", t.entropy_rule},
                     {"nonalpha_rule", t.nonalpha_rule},
                     {"fanout_rule", {{"subdomains", t.fanout_subdomains}, {"queries", t.fanout_queries}}}};
}

std::string_view to_string(Classification c) noexcept {
  switch (c) {
    case Classification::kBenign:
      return "benign";
    case Classification::kSuspicious:
      return "suspicious";
    case Classification::kTunnel:
      return "tunnel";
  }
  return "benign";
}

Verdict classify(const DomainEvidence& ev, const Whitelist& whitelist, const Thresholds& t,
                 std::span<const Verifier* const> verifiers) {
  Verdict v;
  v.family = ev.family;
  v.members = ev.members;
  if (whitelist.covers(ev.family)) {
    v.reasons.push_back({"whitelist", 1.0});
    return v;
  }

  bool payload = false;
  bool traffic = false;
  if (ev.total_len > t.len_rule) {
    v.reasons.push_back({"R1", static_cast<double>(ev.total_len)});
    traffic = true;
  }
  if (ev.entropy_bits_per_char > t.entropy_rule) {
    v.reasons.push_back({"R2", ev.entropy_bits_per_char});
    payload = true;
  }
  if (ev.nonalpha_ratio > t.nonalpha_rule) {
    v.reasons.push_back({"R3", ev.nonalpha_ratio});
    payload = true;
  }
  if (ev.distinct_subdomains_in_family >= t.fanout_subdomains && ev.access_count >= t.fanout_queries) {
    v.reasons.push_back({"R4", static_cast<double>(ev.distinct_subdomains_in_family)});
    traffic = true;
  }
  for (const Verifier* verifier : verifiers) {
    if (auto score = verifier->inspect(ev)) {
      v.reasons.push_back({"ext:" + verifier->name(), *score});
      payload = true;
    }
  }

  if (payload && traffic) {
    v.classification = Classification::kTunnel;
  } else if (payload || traffic) {
    v.classification = Classification::kSuspicious;
  }
  return v;
}

void to_json(nlohmann::json& j, const Verdict& v) {
  auto reasons = nlohmann::json::array();
  for (const auto& r : v.reasons) reasons.push_back({{"rule", r.rule}, {"value", r.value}});
  auto members = nlohmann::json::array();
  for (const auto& m : v.members) members.push_back({{"qname", m.qname}, {"count", m.count}});
  j = nlohmann::json{{"family", v.family},
                     {"classification", std::string(to_string(v.classification))},
                     {"reasons", std::move(reasons)},
                     {"members", std::move(members)}};
}

}  // namespace burrscan
