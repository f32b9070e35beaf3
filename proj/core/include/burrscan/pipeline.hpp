#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "burrscan/capture.hpp"
#include "burrscan/metrics.hpp"
#include "burrscan/synth.hpp"
#include "burrscan/verification.hpp"
#include "burrscan/window.hpp"

namespace burrscan {

inline constexpr std::string_view kToolName = "burrscan";
inline constexpr std::string_view kToolVersion = "0.3.0";

// Exit status of `analyze`: 0 clean, 2 when any family is classified tunnel.
inline constexpr int kExitClean = 0;
inline constexpr int kExitTunnel = 2;

struct PipelineSettings {
  Micros window = 30 * kDay;
  std::optional<Micros> stride;
  AnalysisOptions analysis;
  Whitelist whitelist;
  Thresholds thresholds;
  unsigned threads = 0;
};

struct WindowVerdict {
  std::size_t window = 0;  // the later window of the sudden-burr pair
  DomainEvidence evidence;
  Verdict verdict;
};

struct PipelineResult {
  std::vector<std::string> notices;
  std::vector<WindowResult> windows;
  BurrMatrix heatmap;
  std::vector<SuddenBurrReport> sudden;
  std::vector<WindowVerdict> verdicts;

  bool has_tunnel() const noexcept;
  std::size_t count(Classification c) const noexcept;
};

// windows -> per-window model -> heat map -> sudden burrs -> verification.
PipelineResult run_pipeline(std::vector<QueryRecord> records, const PipelineSettings& settings,
                            std::span<const Verifier* const> verifiers = {});

struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  Micros window = 30 * kDay;
  std::optional<Micros> stride;
  double alpha = 0.05;
  BurrMode mode = BurrMode::kUpperOnly;
  std::optional<std::filesystem::path> whitelist;
  std::optional<std::filesystem::path> thresholds;
  std::filesystem::path out_dir;
  std::uint16_t port = 53;
  unsigned threads = 0;

  void validate() const;  // ConfigError
};

void to_json(nlohmann::json& j, const RunConfig& config);

struct RunReport {
  RunConfig config;
  IngestStats ingest;
  std::size_t log_rows_rejected = 0;
  PipelineResult result;

  int exit_code() const noexcept { return result.has_tunnel() ? kExitTunnel : kExitClean; }
};

// Loads every input (pcap or query-log CSV, detected by magic), runs the
// pipeline and writes all artifacts to config.out_dir. Configuration and input
// errors are raised before anything is written.
RunReport cmd_analyze(const RunConfig& config, std::span<const Verifier* const> verifiers = {});

// Artifact writers used by cmd_analyze.
nlohmann::json report_json(const RunReport& report);
void write_report(const RunReport& report, const std::filesystem::path& out_dir);

// Dataset description for `synth`.
struct SynthSpec {
  std::uint64_t seed = 1;
  BenignModel benign;
  std::vector<TunnelModel> tunnels;
  bool write_capture = false;

  // Three 30-day windows of benign traffic (~50k queries each) with one
  // base32 tunnel family of 5000 length-67 queries in the second window.
  static SynthSpec defaults();
  // Missing keys take the defaults() values; a missing "tunnels" key means no
  // tunnels. Throws SchemaError.
  static SynthSpec from_json(const nlohmann::json& j);
  static SynthSpec load(const std::filesystem::path& path);
};

struct SynthOutput {
  std::filesystem::path queries_csv;
  std::filesystem::path labels_csv;
  std::optional<std::filesystem::path> capture;
  std::uint64_t benign_queries = 0;
  std::uint64_t tunnel_queries = 0;
};

std::vector<LabeledQuery> synthesize(const SynthSpec& spec);
SynthOutput cmd_synth(const SynthSpec& spec, const std::filesystem::path& out_dir);

struct EvalRow {
  std::string polarity;  // "tunnel-positive" or "normal-positive"
  ConfusionCounts counts;
  MetricSet metrics;
};

struct EvalReport {
  std::vector<EvalRow> rows;
};

// Name-level evaluation: a name is predicted tunnel when it is a member of a
// family with a tunnel verdict. Throws UnlabeledName when a reported member
// has no label.
EvalReport evaluate(const std::vector<Verdict>& verdicts, const std::map<std::string, TrafficLabel>& labels);
EvalReport cmd_eval(const std::filesystem::path& report_dir, const std::filesystem::path& labels_csv);

void write_eval_csv(const EvalReport& report, std::ostream& out);
void print_eval_table(const EvalReport& report, std::ostream& out);

}  // namespace burrscan
