#include "burrscan/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "burrscan/errors.hpp"
#include "burrscan/log.hpp"
#include "burrscan/query_log.hpp"

namespace burrscan {

namespace fs = std::filesystem;
using nlohmann::json;

bool PipelineResult::has_tunnel() const noexcept { return count(Classification::kTunnel) > 0; }

std::size_t PipelineResult::count(Classification c) const noexcept {
  return static_cast<std::size_t>(std::count_if(verdicts.begin(), verdicts.end(),
                                                [c](const WindowVerdict& v) { return v.verdict.classification == c; }));
}

PipelineResult run_pipeline(std::vector<QueryRecord> records, const PipelineSettings& settings,
                            std::span<const Verifier* const> verifiers) {
  PipelineResult out;
  WindowPlan plan = cut_windows(std::move(records), settings.window, settings.stride);
  out.notices = plan.notices;

  out.windows = analyze_windows(plan, settings.analysis, settings.threads);
  for (const auto& w : out.windows) {
    if (!w.unfit) continue;
    const std::string& why = w.dnss.fit ? w.adnss.fit_error : w.dnss.fit_error;
    std::string msg = "window " + std::to_string(w.window.index) + " could not be fitted: " + why;
    out.notices.push_back(std::move(msg));
  }

  out.heatmap = burr_matrix(out.windows);
  out.sudden = sudden_burr_series(out.windows);

  // Only names that newly appear at a burr length are verified; the first
  // window is the baseline.
  for (const auto& report : out.sudden) {
    std::vector<DomainCount> fresh;
    for (const auto& e : report.entries) fresh.insert(fresh.end(), e.new_domains.begin(), e.new_domains.end());
    if (fresh.empty()) continue;
    for (auto& ev : build_evidence(fresh)) {
      Verdict v = classify(ev, settings.whitelist, settings.thresholds, verifiers);
      if (v.classification == Classification::kBenign) continue;
      out.verdicts.push_back({report.to_window, std::move(ev), std::move(v)});
    }
  }
  return out;
}

void RunConfig::validate() const {
  if (inputs.empty()) throw ConfigError("at least one --input is required");
  if (window.count() <= 0) throw ConfigError("window duration must be positive");
  if (stride && stride->count() <= 0) throw ConfigError("window stride must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (out_dir.empty()) throw ConfigError("an output directory (--out) is required");
  if (fs::exists(out_dir) && !fs::is_directory(out_dir))
    throw ConfigError("output path exists and is not a directory: " + out_dir.string());
}

void to_json(json& j, const RunConfig& c) {
  json inputs = json::array();
  for (const auto& p : c.inputs) inputs.push_back(p.string());
  j = json{{"inputs", inputs},
           {"window_us", c.window.count()},
           {"stride_us", c.stride ? json(c.stride->count()) : json(nullptr)},
           {"alpha", c.alpha},
           {"mode", to_string(c.mode)},
           {"whitelist", c.whitelist ? json(c.whitelist->string()) : json(nullptr)},
           {"thresholds", c.thresholds ? json(c.thresholds->string()) : json(nullptr)},
           {"out", c.out_dir.string()},
           {"port", c.port}};
}

namespace {

void require_file(const fs::path& path, std::string_view what) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw IoError(std::string(what) + " not found: " + path.string());
}

}  // namespace

RunReport cmd_analyze(const RunConfig& config, std::span<const Verifier* const> verifiers) {
  config.validate();

  RunReport report;
  report.config = config;

  PipelineSettings settings;
  settings.window = config.window;
  settings.stride = config.stride;
  settings.analysis.alpha = config.alpha;
  settings.analysis.mode = config.mode;
  settings.threads = config.threads;
  if (config.whitelist) {
    require_file(*config.whitelist, "whitelist file");
    settings.whitelist = Whitelist::load(*config.whitelist);
  }
  if (config.thresholds) {
    require_file(*config.thresholds, "thresholds file");
    settings.thresholds = Thresholds::load(*config.thresholds);
  }

  std::vector<QueryRecord> records;
  for (const auto& input : config.inputs) {
    require_file(input, "input file");
    if (looks_like_capture(input)) {
      CaptureResult cap = parse_capture(input, config.port);
      report.ingest += cap.stats;
      log::info(input.string() + ": " + std::to_string(cap.records.size()) + " queries from capture");
      records.insert(records.end(), std::make_move_iterator(cap.records.begin()),
                     std::make_move_iterator(cap.records.end()));
    } else {
      QueryLog qlog = read_query_log(input);
      report.log_rows_rejected += qlog.errors.size();
      for (const auto& e : qlog.errors)
        log::warn(input.string() + ":" + std::to_string(e.line) + ": " + e.message);
      records.insert(records.end(), std::make_move_iterator(qlog.records.begin()),
                     std::make_move_iterator(qlog.records.end()));
    }
  }
  if (records.empty()) throw EmptyInput("inputs contain no DNS queries");

  report.result = run_pipeline(std::move(records), settings, verifiers);
  write_report(report, config.out_dir);
  return report;
}

// --- synth ------------------------------------------------------------------

namespace {

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw SchemaError(std::string(where) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw SchemaError("unknown key '" + key + "' in " + std::string(where));
  }
}

template <typename T>
void read_number(const json& j, const char* key, std::string_view where, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_number()) throw SchemaError(std::string(where) + "." + key + " must be a number");
  if constexpr (std::is_unsigned_v<T>) {
    if (it->is_number_float() || it->get<std::int64_t>() < 0)
      throw SchemaError(std::string(where) + "." + key + " must be a non-negative integer");
  } else if constexpr (std::is_integral_v<T>) {
    if (it->is_number_float()) throw SchemaError(std::string(where) + "." + key + " must be an integer");
  }
  out = it->get<T>();
}

Micros days(double d) { return Micros(static_cast<std::int64_t>(d * static_cast<double>(kDay.count()))); }

}  // namespace

SynthSpec SynthSpec::defaults() {
  SynthSpec spec;
  spec.benign.unique_names = 14'286;
  spec.benign.span = 90 * kDay;
  TunnelModel t;
  t.burst_start_us = spec.benign.start_us + (40 * kDay).count();
  spec.tunnels.push_back(t);
  return spec;
}

SynthSpec SynthSpec::from_json(const json& j) {
  check_keys(j, "spec", {"seed", "benign", "tunnels", "pcap"});
  SynthSpec spec = defaults();
  read_number(j, "seed", "spec", spec.seed);
  spec.benign.seed = spec.seed;
  if (auto it = j.find("pcap"); it != j.end()) {
    if (!it->is_boolean()) throw SchemaError("spec.pcap must be a boolean");
    spec.write_capture = it->get<bool>();
  }

  if (auto it = j.find("benign"); it != j.end()) {
    const json& b = *it;
    check_keys(b, "benign",
               {"unique_names", "mu", "sigma", "max_visits", "clip_min", "clip_max", "start_us", "span_days"});
    read_number(b, "unique_names", "benign", spec.benign.unique_names);
    read_number(b, "mu", "benign", spec.benign.mu);
    read_number(b, "sigma", "benign", spec.benign.sigma);
    read_number(b, "max_visits", "benign", spec.benign.max_visits);
    read_number(b, "clip_min", "benign", spec.benign.clip_min);
    read_number(b, "clip_max", "benign", spec.benign.clip_max);
    read_number(b, "start_us", "benign", spec.benign.start_us);
    double span_days = static_cast<double>(spec.benign.span.count()) / static_cast<double>(kDay.count());
    read_number(b, "span_days", "benign", span_days);
    if (!(span_days > 0)) throw SchemaError("benign.span_days must be positive");
    spec.benign.span = days(span_days);
  }

  spec.tunnels.clear();
  if (auto it = j.find("tunnels"); it != j.end()) {
    if (!it->is_array()) throw SchemaError("spec.tunnels must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& t = (*it)[i];
      const std::string where = "tunnels[" + std::to_string(i) + "]";
      check_keys(t, where,
                 {"suffix", "qname_len", "query_count", "burst_start_day", "burst_span_days", "encoder", "seed"});
      TunnelModel m;
      m.seed = spec.seed + 1 + i;
      if (auto s = t.find("suffix"); s != t.end()) {
        if (!s->is_string()) throw SchemaError(where + ".suffix must be a string");
        m.suffix = normalize_qname(s->get<std::string>());
      }
      read_number(t, "qname_len", where, m.qname_len);
      read_number(t, "query_count", where, m.query_count);
      read_number(t, "seed", where, m.seed);
      double start_day = 40, span_days = 1;
      read_number(t, "burst_start_day", where, start_day);
      read_number(t, "burst_span_days", where, span_days);
      if (start_day < 0 || !(span_days > 0)) throw SchemaError(where + " burst interval is invalid");
      m.burst_start_us = spec.benign.start_us + days(start_day).count();
      m.burst_span = days(span_days);
      if (auto e = t.find("encoder"); e != t.end()) {
        if (!e->is_string()) throw SchemaError(where + ".encoder must be a string");
        try {
          m.encoder = parse_tunnel_encoder(e->get<std::string>());
        } catch (const std::invalid_argument& ex) {
          throw SchemaError(where + ": " + ex.what());
        }
      }
      spec.tunnels.push_back(std::move(m));
    }
  }

  try {
    spec.benign.validate();
    for (const auto& t : spec.tunnels) t.validate();
  } catch (const std::invalid_argument& ex) {
    throw SchemaError(ex.what());
  }
  return spec;
}

SynthSpec SynthSpec::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open spec file: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& ex) {
    throw SchemaError(path.string() + ": " + ex.what());
  }
  return from_json(j);
}

std::vector<LabeledQuery> synthesize(const SynthSpec& spec) {
  std::vector<LabeledQuery> out = generate_benign(spec.benign);
  for (const auto& t : spec.tunnels) out = inject_tunnel(std::move(out), t);
  return out;
}

SynthOutput cmd_synth(const SynthSpec& spec, const fs::path& out_dir) {
  const std::vector<LabeledQuery> queries = synthesize(spec);
  const std::vector<QueryRecord> records = records_of(queries);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  SynthOutput out;
  out.queries_csv = out_dir / "queries.csv";
  out.labels_csv = out_dir / "labels.csv";
  write_query_log(records, out.queries_csv);
  write_labels_csv(labels_of(queries), out.labels_csv);
  if (spec.write_capture) {
    out.capture = out_dir / "queries.pcap";
    write_query_capture(*out.capture, records);
  }
  for (const auto& q : queries) (q.label == TrafficLabel::kTunnel ? out.tunnel_queries : out.benign_queries)++;
  return out;
}

// --- eval -------------------------------------------------------------------

EvalReport evaluate(const std::vector<Verdict>& verdicts, const std::map<std::string, TrafficLabel>& labels) {
  std::set<std::string, std::less<>> flagged;
  std::vector<std::string> unlabeled;
  for (const auto& v : verdicts) {
    for (const auto& m : v.members) {
      if (!labels.contains(m.qname)) {
        unlabeled.push_back(m.qname);
        continue;
      }
      if (v.classification == Classification::kTunnel) flagged.insert(m.qname);
    }
  }
  if (!unlabeled.empty()) {
    std::sort(unlabeled.begin(), unlabeled.end());
    unlabeled.erase(std::unique(unlabeled.begin(), unlabeled.end()), unlabeled.end());
    throw UnlabeledName(std::move(unlabeled));
  }

  ConfusionCounts c;
  for (const auto& [name, label] : labels) {
    const bool predicted = flagged.contains(name);
    if (label == TrafficLabel::kTunnel)
      (predicted ? c.tp : c.fn)++;
    else
      (predicted ? c.fp : c.tn)++;
  }
  EvalReport r;
  r.rows.push_back({"tunnel-positive", c, confusion_metrics(c)});
  r.rows.push_back({"normal-positive", c.flipped(), confusion_metrics(c.flipped())});
  return r;
}

EvalReport cmd_eval(const fs::path& report_dir, const fs::path& labels_csv) {
  const fs::path verdicts_path = report_dir / "verdicts.json";
  std::ifstream in(verdicts_path);
  if (!in) throw IoError("cannot open " + verdicts_path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& ex) {
    throw SchemaError(verdicts_path.string() + ": " + ex.what());
  }
  if (!j.is_array()) throw SchemaError(verdicts_path.string() + ": expected an array");

  std::vector<Verdict> verdicts;
  try {
    for (const auto& item : j) {
      Verdict v;
      v.family = item.at("family").get<std::string>();
      const std::string cls = item.at("classification").get<std::string>();
      v.classification = cls == "tunnel"       ? Classification::kTunnel
                         : cls == "suspicious" ? Classification::kSuspicious
                                               : Classification::kBenign;
      for (const auto& m : item.at("members"))
        v.members.push_back({m.at("qname").get<std::string>(), m.at("count").get<std::uint64_t>()});
      verdicts.push_back(std::move(v));
    }
  } catch (const json::exception& ex) {
    throw SchemaError(verdicts_path.string() + ": " + ex.what());
  }
  return evaluate(verdicts, read_labels_csv(labels_csv));
}

namespace {

std::string metric_text(const std::optional<double>& v, int precision) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", precision, *v);
  return buf;
}

}  // namespace

void write_eval_csv(const EvalReport& report, std::ostream& out) {
  out << "polarity,accuracy,precision,recall,f1,tp,fn,fp,tn\n";
  for (const auto& r : report.rows) {
    out << r.polarity << ',' << metric_text(r.metrics.accuracy, 6) << ',' << metric_text(r.metrics.precision, 6)
        << ',' << metric_text(r.metrics.recall, 6) << ',' << metric_text(r.metrics.f1, 6) << ',' << r.counts.tp
        << ',' << r.counts.fn << ',' << r.counts.fp << ',' << r.counts.tn << '\n';
  }
}

void print_eval_table(const EvalReport& report, std::ostream& out) {
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %9s %9s %9s %9s %8s %8s %8s %8s\n", "polarity", "accuracy",
                "precision", "recall", "f1", "tp", "fn", "fp", "tn");
  out << line;
  const auto cell = [](const std::optional<double>& v) { return v ? metric_text(v, 4) : std::string("n/a"); };
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof line, "%-16s %9s %9s %9s %9s %8llu %8llu %8llu %8llu\n", r.polarity.c_str(),
                  cell(r.metrics.accuracy).c_str(), cell(r.metrics.precision).c_str(),
                  cell(r.metrics.recall).c_str(), cell(r.metrics.f1).c_str(),
                  static_cast<unsigned long long>(r.counts.tp), static_cast<unsigned long long>(r.counts.fn),
                  static_cast<unsigned long long>(r.counts.fp), static_cast<unsigned long long>(r.counts.tn));
    out << line;
  }
}

}  // namespace burrscan
