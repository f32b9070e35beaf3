#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "burrscan/burr.hpp"
#include "burrscan/gaussian_fit.hpp"
#include "burrscan/query_record.hpp"
#include "burrscan/sample_space.hpp"

namespace burrscan {

using Micros = std::chrono::microseconds;

inline constexpr Micros kDay = std::chrono::duration_cast<Micros>(std::chrono::hours(24));

// Half-open [start_us, end_us).
struct TimeWindow {
  std::size_t index = 0;
  std::int64_t start_us = 0;
  std::int64_t end_us = 0;
  // Fraction of the window covered by the capture span (< 1 for a window the
  // capture ends inside).
  double coverage = 1.0;

  bool partial() const noexcept { return coverage < 1.0; }
};

struct WindowSlice {
  TimeWindow window;
  std::vector<QueryRecord> records;
};

enum class WindowGuidance { kOk, kCaution, kWarning };

inline constexpr std::string_view kShortWindowWarning =
    "warning: window duration is shorter than 7 days; the length distribution is difficult to fit";
inline constexpr std::string_view kShortWindowCaution =
    "caution: window duration is shorter than 14 days; fits are more reliable with windows of two weeks or more";

WindowGuidance window_guidance(Micros duration) noexcept;
// Empty for kOk, otherwise kShortWindowWarning / kShortWindowCaution.
std::string_view guidance_notice(WindowGuidance guidance) noexcept;

struct WindowPlan {
  std::vector<WindowSlice> slices;
  WindowGuidance guidance = WindowGuidance::kOk;
  std::vector<std::string> notices;
};

// Windows start at the earliest timestamp and advance by `stride` (defaults to
// `duration`, i.e. tumbling windows). A record on a boundary belongs to the
// later window. Throws EmptyInput.
WindowPlan cut_windows(std::vector<QueryRecord> records, Micros duration,
                       std::optional<Micros> stride = std::nullopt);

struct AnalysisOptions {
  double alpha = 0.05;
  BurrMode mode = BurrMode::kUpperOnly;
  FitOptions fit;
};

// Detection model applied to one sample space.
struct SpaceAnalysis {
  SpaceKind kind = SpaceKind::kDnss;
  LengthHistogram hist;
  std::optional<GaussianFit> fit;
  std::string fit_error;  // set when fit is empty
  std::optional<ToleranceBand> band;
  std::vector<BurrPoint> burrs;
};

SpaceAnalysis analyze_space(const DomainSampleSpace& space, const AnalysisOptions& options);

struct WindowResult {
  TimeWindow window;
  std::size_t record_count = 0;
  SpaceAnalysis dnss;
  SpaceAnalysis adnss;
  bool unfit = false;
  std::vector<int> burr_lengths;  // union over both spaces, ascending
  std::map<int, std::vector<DomainCount>> domains_at;
  DomainSampleSpace space{SpaceKind::kAdnss};

  std::uint64_t dnss_size() const noexcept { return space.size(); }
  std::uint64_t adnss_size() const noexcept { return space.capacity(); }
  bool is_burr(int length) const noexcept;
};

WindowResult analyze_window(const WindowSlice& slice, const AnalysisOptions& options = {});

// Independent windows are analyzed on up to `threads` workers (0 = hardware).
std::vector<WindowResult> analyze_windows(const WindowPlan& plan, const AnalysisOptions& options = {},
                                          unsigned threads = 0);

struct BurrMatrix {
  std::vector<int> lengths;           // rows, ascending
  std::vector<std::size_t> windows;   // columns, ascending window index
  std::vector<std::vector<std::uint8_t>> cells;  // cells[row][col]

  bool empty() const noexcept { return lengths.empty(); }
};

BurrMatrix burr_matrix(std::span<const WindowResult> results);
void write_heatmap_csv(const BurrMatrix& matrix, std::ostream& out);

struct SuddenBurrEntry {
  int length = 0;
  std::vector<DomainCount> new_domains;
};

struct SuddenBurrReport {
  std::size_t from_window = 0;
  std::size_t to_window = 0;
  std::vector<SuddenBurrEntry> entries;
};

// Requires cur.window.index == prev.window.index + 1 (NonAdjacentWindows).
SuddenBurrReport sudden_burrs(const WindowResult& prev, const WindowResult& cur);
// Same difference without the adjacency check.
SuddenBurrReport burr_difference(const WindowResult& prev, const WindowResult& cur);

// Reports for every adjacent pair, in index order.
std::vector<SuddenBurrReport> sudden_burr_series(std::span<const WindowResult> results);

// `[{from, to, length, new_domains: [{qname, count}]}]`, one element per entry.
nlohmann::json sudden_burrs_json(std::span<const SuddenBurrReport> reports);

}  // namespace burrscan
