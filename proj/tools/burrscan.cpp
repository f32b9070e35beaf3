// burrscan: length-distribution burr analysis of DNS query traffic.
//
//   burrscan analyze --input q.pcap --input q.csv --window-days 30 --out report/
//   burrscan synth --spec spec.json --out data/
//   burrscan eval --report report/ --labels data/labels.csv

#include <cmath>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "burrscan/errors.hpp"
#include "burrscan/log.hpp"
#include "burrscan/pipeline.hpp"

namespace {

using namespace burrscan;

constexpr int kExitError = 1;

burrscan::Micros days_to_micros(double d) {
  return burrscan::Micros(static_cast<std::int64_t>(std::llround(d * static_cast<double>(kDay.count()))));
}

int run_analyze(const RunConfig& config) {
  const RunReport report = cmd_analyze(config);
  for (const auto& n : report.result.notices) std::cerr << n << '\n';
  const auto& r = report.result;
  std::cout << "windows: " << r.windows.size() << ", sudden-burr pairs: " << r.sudden.size()
            << ", suspicious: " << r.count(Classification::kSuspicious)
            << ", tunnel: " << r.count(Classification::kTunnel) << '\n';
  for (const auto& v : r.verdicts) {
    if (v.verdict.classification != Classification::kTunnel) continue;
    std::cout << "tunnel  window " << v.window << "  " << v.verdict.family << "  (" << v.verdict.members.size()
              << " names)\n";
  }
  std::cout << "report written to " << config.out_dir.string() << '\n';
  return report.exit_code();
}

int run_synth(const std::filesystem::path& spec_path, const std::filesystem::path& out) {
  const SynthSpec spec = spec_path.empty() ? SynthSpec::defaults() : SynthSpec::load(spec_path);
  const SynthOutput o = cmd_synth(spec, out);
  std::cout << "benign queries: " << o.benign_queries << ", tunnel queries: " << o.tunnel_queries << '\n'
            << "wrote " << o.queries_csv.string() << " and " << o.labels_csv.string() << '\n';
  if (o.capture) std::cout << "wrote " << o.capture->string() << '\n';
  return 0;
}

int run_eval(const std::filesystem::path& report_dir, const std::filesystem::path& labels) {
  const EvalReport r = cmd_eval(report_dir, labels);
  const auto csv_path = report_dir / "eval.csv";
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("cannot write " + csv_path.string());
  write_eval_csv(r, csv);
  print_eval_table(r, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  burrscan::log::configure_from_env();

  CLI::App app{"Length-distribution burr analysis of DNS query traffic"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  RunConfig config;
  double window_days = 30;
  double stride_days = 0;
  std::string mode = "upper";
  std::string whitelist, thresholds;
  auto* analyze = app.add_subcommand("analyze", "Detect burrs and classify newly appearing names");
  analyze->add_option("--input", config.inputs, "pcap capture or query-log CSV (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("--window-days", window_days, "Window duration in days")->capture_default_str();
  analyze->add_option("--stride-days", stride_days, "Window stride in days (default: tumbling)");
  analyze->add_option("--alpha", config.alpha, "KS significance level (0.10, 0.05 or 0.01)")
      ->capture_default_str();
  analyze->add_option("--mode", mode, "Burr side: upper or two-sided")
      ->check(CLI::IsMember({"upper", "two-sided"}))
      ->capture_default_str();
  analyze->add_option("--whitelist", whitelist, "Suffix whitelist file");
  analyze->add_option("--thresholds", thresholds, "Verification thresholds JSON");
  analyze->add_option("--out", config.out_dir, "Output directory")->required();
  analyze->add_option("--port", config.port, "UDP port of DNS traffic in captures")->capture_default_str();
  analyze->add_option("--threads", config.threads, "Worker threads (0 = hardware)");

  std::filesystem::path spec_path, synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
  synth->add_option("--spec", spec_path, "Dataset spec JSON (default spec when omitted)")
      ->check(CLI::ExistingFile);
  synth->add_option("--out", synth_out, "Output directory")->required();

  std::filesystem::path report_dir, labels;
  auto* eval = app.add_subcommand("eval", "Score verdicts against labels");
  eval->add_option("--report", report_dir, "Directory written by analyze")->required();
  eval->add_option("--labels", labels, "labels.csv (qname,label)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) {
      config.window = days_to_micros(window_days);
      if (stride_days > 0) config.stride = days_to_micros(stride_days);
      config.mode = parse_burr_mode(mode);
      if (!whitelist.empty()) config.whitelist = whitelist;
      if (!thresholds.empty()) config.thresholds = thresholds;
      return run_analyze(config);
    }
    if (*synth) return run_synth(spec_path, synth_out);
    if (*eval) return run_eval(report_dir, labels);
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    for (const auto& row : e.rows()) std::cerr << "  line " << row.line << ": " << row.message << '\n';
    return kExitError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
