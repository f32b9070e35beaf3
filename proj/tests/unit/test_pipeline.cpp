#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "burrscan/errors.hpp"
#include "burrscan/pipeline.hpp"
#include "burrscan/query_log.hpp"
#include "fixtures.hpp"

namespace {

using namespace burrscan;
namespace fs = std::filesystem;

SynthSpec benign_spec(std::uint64_t seed) {
  SynthSpec spec = SynthSpec::defaults();
  spec.seed = seed;
  spec.benign.seed = seed;
  spec.tunnels.clear();
  return spec;
}

RunConfig config_for(const fs::path& input, const fs::path& out) {
  RunConfig c;
  c.inputs = {input};
  c.out_dir = out;
  return c;
}

TEST(RunPipeline, ThreeMonthFixtureFlagsOnlyTheInjectedFamily) {
  const auto records = records_of(synthesize(SynthSpec::defaults()));
  const PipelineResult r = run_pipeline(records, {});
  ASSERT_EQ(r.windows.size(), 3u);
  std::set<std::string> tunnel_families;
  for (const auto& v : r.verdicts) {
    if (v.verdict.classification != Classification::kTunnel) continue;
    tunnel_families.insert(v.verdict.family);
    EXPECT_EQ(v.window, 1u);
  }
  EXPECT_EQ(tunnel_families, std::set<std::string>{"tunnel.com"});
  EXPECT_TRUE(r.has_tunnel());
  EXPECT_EQ(r.heatmap.windows.size(), 3u);
  ASSERT_EQ(r.sudden.size(), 2u);
}

TEST(RunPipeline, BenignRunsAreClean) {
  int clean = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const PipelineResult r = run_pipeline(records_of(synthesize(benign_spec(seed))), {});
    if (r.verdicts.empty() && !r.has_tunnel()) ++clean;
  }
  EXPECT_GE(clean, 9);
}

TEST(RunPipeline, WhitelistedFamilyIsNotReported) {
  PipelineSettings s;
  s.whitelist.add("tunnel.com");
  const PipelineResult r = run_pipeline(records_of(synthesize(SynthSpec::defaults())), s);
  EXPECT_FALSE(r.has_tunnel());
}

TEST(CmdAnalyze, MissingWhitelistFailsBeforeWriting) {
  fixtures::TempDir dir;
  SynthSpec spec = benign_spec(3);
  spec.benign.unique_names = 500;
  const auto synth = cmd_synth(spec, dir / "data");
  RunConfig c = config_for(synth.queries_csv, dir / "out");
  c.whitelist = dir / "absent.txt";
  try {
    cmd_analyze(c);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find((dir / "absent.txt").string()), std::string::npos);
  }
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(CmdAnalyze, InvalidConfiguration) {
  fixtures::TempDir dir;
  RunConfig c;
  c.out_dir = dir / "out";
  EXPECT_THROW(cmd_analyze(c), ConfigError);
  c = config_for(dir / "missing.csv", dir / "out");
  EXPECT_THROW(cmd_analyze(c), IoError);
  c.alpha = 0;
  EXPECT_THROW(cmd_analyze(c), ConfigError);
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(CmdAnalyze, EmptyInput) {
  fixtures::TempDir dir;
  std::ofstream(dir / "empty.csv") << "ts_us,qname,qtype,src\n";
  EXPECT_THROW(cmd_analyze(config_for(dir / "empty.csv", dir / "out")), EmptyInput);
}

TEST(CmdAnalyze, ReportsAreIdempotent) {
  fixtures::TempDir dir;
  const auto synth = cmd_synth(SynthSpec::defaults(), dir / "data");
  const RunReport a = cmd_analyze(config_for(synth.queries_csv, dir / "a"));
  const RunReport b = cmd_analyze(config_for(synth.queries_csv, dir / "b"));
  EXPECT_EQ(a.exit_code(), kExitTunnel);
  EXPECT_EQ(b.exit_code(), kExitTunnel);

  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(dir / "a")) names.insert(e.path().filename().string());
  for (const char* f : {"report.json", "heatmap.csv", "sudden_burrs.json", "verdicts.json", "window_0_fit.json",
                        "window_1_dnss_hist.csv", "window_2_adnss_band.csv"})
    EXPECT_TRUE(names.contains(f)) << f;
  for (const auto& n : names) {
    if (n == "report.json") continue;
    EXPECT_EQ(fixtures::read_file(dir / "a" / n), fixtures::read_file(dir / "b" / n)) << n;
  }
  auto ja = nlohmann::json::parse(fixtures::read_file(dir / "a" / "report.json"));
  auto jb = nlohmann::json::parse(fixtures::read_file(dir / "b" / "report.json"));
  ja["config"].erase("out");
  jb["config"].erase("out");
  EXPECT_EQ(ja, jb);
  EXPECT_EQ(ja["exit_code"], 2);
  EXPECT_EQ(ja["verdict_counts"]["tunnel"], 1);
}

TEST(CmdAnalyze, ShortWindowsCarryGuidance) {
  fixtures::TempDir dir;
  SynthSpec spec = benign_spec(5);
  spec.benign.unique_names = 3000;
  spec.benign.span = 10 * kDay;
  const auto synth = cmd_synth(spec, dir / "data");

  RunConfig c = config_for(synth.queries_csv, dir / "caution");
  c.window = 10 * kDay;
  auto r = cmd_analyze(c);
  EXPECT_NE(std::find(r.result.notices.begin(), r.result.notices.end(), std::string(kShortWindowCaution)),
            r.result.notices.end());

  c = config_for(synth.queries_csv, dir / "warning");
  c.window = 5 * kDay;
  r = cmd_analyze(c);
  EXPECT_NE(std::find(r.result.notices.begin(), r.result.notices.end(), std::string(kShortWindowWarning)),
            r.result.notices.end());
  const auto j = nlohmann::json::parse(fixtures::read_file(dir / "warning" / "report.json"));
  EXPECT_EQ(j["notices"][0], std::string(kShortWindowWarning));

  c = config_for(synth.queries_csv, dir / "ok");
  c.window = 14 * kDay;
  r = cmd_analyze(c);
  for (const auto& n : r.result.notices) {
    EXPECT_NE(n, kShortWindowCaution);
    EXPECT_NE(n, kShortWindowWarning);
  }
}

TEST(CmdAnalyze, CaptureAndLogInputsAgree) {
  fixtures::TempDir dir;
  SynthSpec spec = SynthSpec::defaults();
  spec.write_capture = true;
  const auto synth = cmd_synth(spec, dir / "data");
  ASSERT_TRUE(synth.capture);
  const auto a = cmd_analyze(config_for(synth.queries_csv, dir / "log"));
  const auto b = cmd_analyze(config_for(*synth.capture, dir / "pcap"));
  EXPECT_EQ(b.ingest.queries_emitted, synth.benign_queries + synth.tunnel_queries);
  EXPECT_EQ(fixtures::read_file(dir / "log" / "verdicts.json"), fixtures::read_file(dir / "pcap" / "verdicts.json"));
  EXPECT_EQ(fixtures::read_file(dir / "log" / "heatmap.csv"), fixtures::read_file(dir / "pcap" / "heatmap.csv"));
}

TEST(CmdSynth, DeterministicOutput) {
  fixtures::TempDir dir;
  const auto a = cmd_synth(SynthSpec::defaults(), dir / "a");
  const auto b = cmd_synth(SynthSpec::defaults(), dir / "b");
  EXPECT_EQ(fixtures::read_file(a.queries_csv), fixtures::read_file(b.queries_csv));
  EXPECT_EQ(fixtures::read_file(a.labels_csv), fixtures::read_file(b.labels_csv));
  EXPECT_EQ(a.tunnel_queries, 5000u);
  EXPECT_GT(a.benign_queries, 100'000u);
}

TEST(CmdSynth, NoTunnelsMeansAllBenign) {
  fixtures::TempDir dir;
  const auto spec = SynthSpec::from_json(nlohmann::json{{"seed", 4}, {"benign", {{"unique_names", 800}}}});
  EXPECT_TRUE(spec.tunnels.empty());
  const auto out = cmd_synth(spec, dir / "d");
  EXPECT_EQ(out.tunnel_queries, 0u);
  for (const auto& [name, label] : read_labels_csv(out.labels_csv)) EXPECT_EQ(label, TrafficLabel::kBenign) << name;
}

TEST(SynthSpecTest, Schema) {
  EXPECT_THROW(SynthSpec::from_json(nlohmann::json{{"sed", 1}}), SchemaError);
  EXPECT_THROW(SynthSpec::from_json(nlohmann::json{{"benign", {{"sigma", "five"}}}}), SchemaError);
  EXPECT_THROW(SynthSpec::from_json(nlohmann::json{{"tunnels", {{{"query_count", 0}}}}}), SchemaError);
  EXPECT_THROW(SynthSpec::from_json(nlohmann::json{{"tunnels", {{{"encoder", "rot13"}}}}}), SchemaError);
  const auto spec = SynthSpec::from_json(
      nlohmann::json{{"seed", 9}, {"tunnels", {{{"suffix", "X.Example.ORG"}, {"burst_start_day", 2}}}}});
  ASSERT_EQ(spec.tunnels.size(), 1u);
  EXPECT_EQ(spec.tunnels[0].suffix, "x.example.org");
  EXPECT_EQ(spec.tunnels[0].seed, 10u);
  EXPECT_EQ(spec.tunnels[0].burst_start_us, spec.benign.start_us + (2 * kDay).count());
}

Verdict verdict(std::string family, Classification c, std::vector<std::string> members) {
  Verdict v;
  v.family = std::move(family);
  v.classification = c;
  for (auto& m : members) v.members.push_back({std::move(m), 1});
  return v;
}

TEST(Evaluate, PerfectDetector) {
  const std::map<std::string, TrafficLabel> labels{{"a.t.com", TrafficLabel::kTunnel},
                                                   {"b.t.com", TrafficLabel::kTunnel},
                                                   {"www.x.com", TrafficLabel::kBenign}};
  const auto r = evaluate({verdict("t.com", Classification::kTunnel, {"a.t.com", "b.t.com"})}, labels);
  ASSERT_EQ(r.rows.size(), 2u);
  for (const auto& row : r.rows) {
    EXPECT_EQ(*row.metrics.accuracy, 1.0);
    EXPECT_EQ(*row.metrics.precision, 1.0);
    EXPECT_EQ(*row.metrics.recall, 1.0);
    EXPECT_EQ(*row.metrics.f1, 1.0);
  }
  EXPECT_EQ(r.rows[0].polarity, "tunnel-positive");
  EXPECT_EQ(r.rows[1].polarity, "normal-positive");
}

TEST(Evaluate, SilentDetector) {
  const std::map<std::string, TrafficLabel> labels{{"a.t.com", TrafficLabel::kTunnel},
                                                   {"www.x.com", TrafficLabel::kBenign}};
  const auto r = evaluate({verdict("t.com", Classification::kSuspicious, {"a.t.com"})}, labels);
  EXPECT_EQ(*r.rows[0].metrics.recall, 0.0);
  EXPECT_THROW(require_metric(r.rows[0].metrics.precision, "precision"), UndefinedMetric);
}

TEST(Evaluate, HandCountedFixture) {
  // 8 tunnel names, 12 benign; the detector reports 6 tunnel names and 2
  // benign names as tunnel.
  std::map<std::string, TrafficLabel> labels;
  std::vector<std::string> flagged;
  for (int i = 0; i < 8; ++i) {
    const std::string n = "t" + std::to_string(i) + ".bad.com";
    labels[n] = TrafficLabel::kTunnel;
    if (i < 6) flagged.push_back(n);
  }
  for (int i = 0; i < 12; ++i) {
    const std::string n = "h" + std::to_string(i) + ".good.com";
    labels[n] = TrafficLabel::kBenign;
    if (i < 2) flagged.push_back(n);
  }
  const auto r = evaluate({verdict("mixed", Classification::kTunnel, flagged)}, labels);
  EXPECT_EQ(r.rows[0].counts, (ConfusionCounts{6, 2, 2, 10}));
  EXPECT_DOUBLE_EQ(*r.rows[0].metrics.accuracy, 0.8);
  EXPECT_DOUBLE_EQ(*r.rows[0].metrics.precision, 0.75);
  EXPECT_DOUBLE_EQ(*r.rows[0].metrics.recall, 0.75);
  EXPECT_EQ(r.rows[1].counts, (ConfusionCounts{10, 2, 2, 6}));
  EXPECT_DOUBLE_EQ(*r.rows[1].metrics.recall, 10.0 / 12.0);

  std::ostringstream csv;
  write_eval_csv(r, csv);
  EXPECT_EQ(csv.str(),
            "polarity,accuracy,precision,recall,f1,tp,fn,fp,tn\n"
            "tunnel-positive,0.800000,0.750000,0.750000,0.750000,6,2,2,10\n"
            "normal-positive,0.800000,0.833333,0.833333,0.833333,10,2,2,6\n");
}

TEST(Evaluate, UnlabeledMember) {
  const std::map<std::string, TrafficLabel> labels{{"a.t.com", TrafficLabel::kTunnel}};
  try {
    evaluate({verdict("t.com", Classification::kTunnel, {"a.t.com", "z.t.com"})}, labels);
    FAIL() << "expected UnlabeledName";
  } catch (const UnlabeledName& e) {
    EXPECT_EQ(e.names(), std::vector<std::string>{"z.t.com"});
  }
}

TEST(Evaluate, ClosedLoop) {
  fixtures::TempDir dir;
  const auto synth = cmd_synth(SynthSpec::defaults(), dir / "data");
  cmd_analyze(config_for(synth.queries_csv, dir / "out"));
  const auto r = cmd_eval(dir / "out", synth.labels_csv);
  const auto& tp = r.rows[0];
  EXPECT_EQ(*tp.metrics.recall, 1.0);
  EXPECT_EQ(*tp.metrics.precision, 1.0);
}

}  // namespace
