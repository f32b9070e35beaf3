#include <fstream>

#include <nlohmann/json.hpp>

#include "burrscan/errors.hpp"
#include "burrscan/pipeline.hpp"

namespace burrscan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json burrs_json(const std::vector<BurrPoint>& burrs) {
  json out = json::array();
  for (const auto& b : burrs) {
    out.push_back({{"length", b.length},
                   {"observed", b.observed},
                   {"expected", b.expected},
                   {"lower", b.lower},
                   {"upper", b.upper},
                   {"excess", b.excess},
                   {"side", b.side == BurrSide::kAbove ? "above" : "below"}});
  }
  return out;
}

json space_json(const SpaceAnalysis& s) {
  json j{{"kind", std::string(to_string(s.kind))}, {"n", s.hist.n()}};
  j["fit"] = s.fit ? json(*s.fit) : json(nullptr);
  if (!s.fit) j["fit_error"] = s.fit_error;
  if (s.band) j["ks_d"] = s.band->d;
  j["burrs"] = burrs_json(s.burrs);
  return j;
}

json stats_json(const IngestStats& s) {
  return {{"packets_seen", s.packets_seen},           {"dns_messages", s.dns_messages},
          {"queries_emitted", s.queries_emitted},     {"malformed_skipped", s.malformed_skipped},
          {"responses_skipped", s.responses_skipped}, {"empty_skipped", s.empty_skipped},
          {"unsupported_skipped", s.unsupported_skipped}};
}

json verdicts_json(const std::vector<WindowVerdict>& verdicts) {
  json out = json::array();
  for (const auto& v : verdicts) {
    json j = v.verdict;
    j["window"] = v.window;
    j["representative"] = v.evidence.qname;
    j["access_count"] = v.evidence.access_count;
    j["distinct_subdomains"] = v.evidence.distinct_subdomains_in_family;
    out.push_back(std::move(j));
  }
  return out;
}

class Sink {
 public:
  explicit Sink(const fs::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot write " + path.string());
  }
  std::ostream& stream() { return out_; }
  void close() {
    out_.close();
    if (!out_) throw IoError("write failed: " + path_.string());
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

void write_json(const fs::path& path, const json& j) {
  Sink s(path);
  s.stream() << j.dump(2) << '\n';
  s.close();
}

void write_space_files(const fs::path& dir, std::size_t index, const SpaceAnalysis& s) {
  const std::string stem = "window_" + std::to_string(index) + "_" + std::string(to_string(s.kind));
  {
    Sink hist(dir / (stem + "_hist.csv"));
    write_histogram_csv(s.hist, hist.stream());
    hist.close();
  }
  if (s.band) {
    Sink band(dir / (stem + "_band.csv"));
    write_band_csv(s.hist, *s.band, s.burrs, band.stream());
    band.close();
  }
}

}  // namespace

json report_json(const RunReport& report) {
  const PipelineResult& r = report.result;
  json windows = json::array();
  for (const auto& w : r.windows) {
    windows.push_back({{"index", w.window.index},
                       {"start_us", w.window.start_us},
                       {"end_us", w.window.end_us},
                       {"coverage", w.window.coverage},
                       {"records", w.record_count},
                       {"dnss_size", w.dnss_size()},
                       {"adnss_size", w.adnss_size()},
                       {"unfit", w.unfit},
                       {"burr_lengths", w.burr_lengths},
                       {"dnss", space_json(w.dnss)},
                       {"adnss", space_json(w.adnss)}});
  }
  json sudden = json::array();
  for (const auto& s : r.sudden) {
    std::size_t names = 0;
    json lengths = json::array();
    for (const auto& e : s.entries) {
      names += e.new_domains.size();
      lengths.push_back(e.length);
    }
    sudden.push_back({{"from", s.from_window}, {"to", s.to_window}, {"lengths", lengths}, {"new_names", names}});
  }

  return json{{"tool", kToolName},
              {"version", kToolVersion},
              {"config", report.config},
              {"ingest", stats_json(report.ingest)},
              {"log_rows_rejected", report.log_rows_rejected},
              {"notices", r.notices},
              {"windows", std::move(windows)},
              {"sudden_burrs", std::move(sudden)},
              {"verdict_counts",
               {{"suspicious", r.count(Classification::kSuspicious)}, {"tunnel", r.count(Classification::kTunnel)}}},
              {"exit_code", report.exit_code()}};
}

void write_report(const RunReport& report, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  const PipelineResult& r = report.result;
  write_json(out_dir / "report.json", report_json(report));
  {
    Sink heat(out_dir / "heatmap.csv");
    write_heatmap_csv(r.heatmap, heat.stream());
    heat.close();
  }
  write_json(out_dir / "sudden_burrs.json", sudden_burrs_json(r.sudden));
  write_json(out_dir / "verdicts.json", verdicts_json(r.verdicts));

  for (const auto& w : r.windows) {
    write_space_files(out_dir, w.window.index, w.dnss);
    write_space_files(out_dir, w.window.index, w.adnss);
    json fits{{"window", w.window.index},
              {"dnss", w.dnss.fit ? json(*w.dnss.fit) : json(nullptr)},
              {"adnss", w.adnss.fit ? json(*w.adnss.fit) : json(nullptr)}};
    write_json(out_dir / ("window_" + std::to_string(w.window.index) + "_fit.json"), fits);
  }
}

}  // namespace burrscan
