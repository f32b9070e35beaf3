#include "burrscan/window.hpp"

#include <algorithm>
#include <atomic>
#include <ostream>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "burrscan/errors.hpp"

namespace burrscan {

WindowGuidance window_guidance(Micros duration) noexcept {
  if (duration < 7 * kDay) return WindowGuidance::kWarning;
  if (duration < 14 * kDay) return WindowGuidance::kCaution;
  return WindowGuidance::kOk;
}

std::string_view guidance_notice(WindowGuidance guidance) noexcept {
  switch (guidance) {
    case WindowGuidance::kWarning:
      return kShortWindowWarning;
    case WindowGuidance::kCaution:
      return kShortWindowCaution;
    case WindowGuidance::kOk:
      break;
  }
  return {};
}

WindowPlan cut_windows(std::vector<QueryRecord> records, Micros duration, std::optional<Micros> stride) {
  if (duration.count() <= 0) throw std::invalid_argument("window duration must be positive");
  const Micros step = stride.value_or(duration);
  if (step.count() <= 0) throw std::invalid_argument("window stride must be positive");
  if (records.empty()) throw EmptyInput("no records to cut into windows");

  std::stable_sort(records.begin(), records.end(),
                   [](const QueryRecord& a, const QueryRecord& b) { return a.timestamp_us < b.timestamp_us; });
  const std::int64_t first = records.front().timestamp_us;
  const std::int64_t last = records.back().timestamp_us;

  WindowPlan plan;
  plan.guidance = window_guidance(duration);
  if (plan.guidance != WindowGuidance::kOk) plan.notices.emplace_back(guidance_notice(plan.guidance));

  const auto by_ts = [](const QueryRecord& r, std::int64_t t) { return r.timestamp_us < t; };
  for (std::size_t k = 0;; ++k) {
    const std::int64_t start = first + static_cast<std::int64_t>(k) * step.count();
    if (start > last) break;
    const std::int64_t end = start + duration.count();
    auto lo = std::lower_bound(records.begin(), records.end(), start, by_ts);
    auto hi = std::lower_bound(lo, records.end(), end, by_ts);

    WindowSlice slice;
    slice.window.index = k;
    slice.window.start_us = start;
    slice.window.end_us = end;
    const std::int64_t covered_end = std::min(end, last + 1);
    slice.window.coverage = static_cast<double>(covered_end - start) / static_cast<double>(duration.count());
    slice.records.assign(lo, hi);
    if (slice.window.partial()) {
      plan.notices.push_back("window " + std::to_string(k) + " is partial (" +
                             std::to_string(static_cast<int>(slice.window.coverage * 100.0)) +
                             "% of the duration covered)");
    }
    plan.slices.push_back(std::move(slice));
  }
  return plan;
}

SpaceAnalysis analyze_space(const DomainSampleSpace& space, const AnalysisOptions& options) {
  SpaceAnalysis out;
  out.kind = space.kind();
  out.hist = length_histogram(space);
  try {
    out.fit = fit_gaussian(out.hist, options.fit);
    out.band = delineation_band(out.hist, *out.fit, options.alpha);
    out.burrs = detect_burrs(out.hist, *out.band, options.mode);
  } catch (const InsufficientSupport& e) {
    out.fit_error = e.what();
  } catch (const DegenerateFit& e) {
    out.fit_error = e.what();
  } catch (const FitUnavailable& e) {
    out.fit_error = e.what();
  } catch (const EmptyHistogram& e) {
    out.fit_error = e.what();
  }
  if (!out.fit_error.empty()) {
    out.band.reset();
    out.burrs.clear();
  }
  return out;
}

bool WindowResult::is_burr(int length) const noexcept {
  return std::binary_search(burr_lengths.begin(), burr_lengths.end(), length);
}

WindowResult analyze_window(const WindowSlice& slice, const AnalysisOptions& options) {
  WindowResult result;
  result.window = slice.window;
  result.record_count = slice.records.size();
  result.space = build_space(slice.records, SpaceKind::kAdnss);
  result.adnss = analyze_space(result.space, options);
  result.dnss = analyze_space(result.space.to_dnss(), options);
  result.unfit = !result.dnss.fit_error.empty() || !result.adnss.fit_error.empty();
  if (result.unfit) {
    result.dnss.burrs.clear();
    result.adnss.burrs.clear();
    return result;
  }

  std::set<int> lengths;
  for (const auto& b : result.dnss.burrs) lengths.insert(b.length);
  for (const auto& b : result.adnss.burrs) lengths.insert(b.length);
  result.burr_lengths.assign(lengths.begin(), lengths.end());
  for (int length : result.burr_lengths) result.domains_at[length] = burr_domains(result.space, length);
  return result;
}

std::vector<WindowResult> analyze_windows(const WindowPlan& plan, const AnalysisOptions& options,
                                          unsigned threads) {
  std::vector<WindowResult> results(plan.slices.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(plan.slices.size()));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < plan.slices.size(); i = next++) {
      results[i] = analyze_window(plan.slices[i], options);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return results;
}

BurrMatrix burr_matrix(std::span<const WindowResult> results) {
  BurrMatrix m;
  std::set<int> lengths;
  for (const auto& r : results) {
    lengths.insert(r.burr_lengths.begin(), r.burr_lengths.end());
    m.windows.push_back(r.window.index);
  }
  std::vector<std::size_t> order(results.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return results[a].window.index < results[b].window.index; });
  std::sort(m.windows.begin(), m.windows.end());

  m.lengths.assign(lengths.begin(), lengths.end());
  for (int length : m.lengths) {
    std::vector<std::uint8_t> row;
    row.reserve(order.size());
    for (std::size_t idx : order) row.push_back(results[idx].is_burr(length) ? 1 : 0);
    m.cells.push_back(std::move(row));
  }
  return m;
}

void write_heatmap_csv(const BurrMatrix& matrix, std::ostream& out) {
  out << "burr_length";
  for (auto w : matrix.windows) out << ',' << w;
  out << '\n';
  for (std::size_t r = 0; r < matrix.lengths.size(); ++r) {
    out << matrix.lengths[r];
    for (auto cell : matrix.cells[r]) out << ',' << static_cast<int>(cell);
    out << '\n';
  }
}

SuddenBurrReport burr_difference(const WindowResult& prev, const WindowResult& cur) {
  SuddenBurrReport report;
  report.from_window = prev.window.index;
  report.to_window = cur.window.index;
  for (int length : cur.burr_lengths) {
    const auto cur_it = cur.domains_at.find(length);
    if (cur_it == cur.domains_at.end()) continue;

    SuddenBurrEntry entry;
    entry.length = length;
    if (prev.is_burr(length)) {
      const auto prev_it = prev.domains_at.find(length);
      for (const auto& d : cur_it->second) {
        const bool seen = prev_it != prev.domains_at.end() &&
                          std::binary_search(prev_it->second.begin(), prev_it->second.end(), d,
                                             [](const DomainCount& a, const DomainCount& b) { return a.qname < b.qname; });
        if (!seen) entry.new_domains.push_back(d);
      }
    } else {
      for (const auto& d : cur_it->second) {
        if (!prev.space.contains(d.qname)) entry.new_domains.push_back(d);
      }
    }
    if (!entry.new_domains.empty()) report.entries.push_back(std::move(entry));
  }
  return report;
}

SuddenBurrReport sudden_burrs(const WindowResult& prev, const WindowResult& cur) {
  if (cur.window.index != prev.window.index + 1) {
    throw NonAdjacentWindows("sudden burrs compare adjacent windows; got " +
                             std::to_string(prev.window.index) + " and " + std::to_string(cur.window.index));
  }
  return burr_difference(prev, cur);
}

std::vector<SuddenBurrReport> sudden_burr_series(std::span<const WindowResult> results) {
  std::vector<const WindowResult*> ordered;
  for (const auto& r : results) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(),
            [](const WindowResult* a, const WindowResult* b) { return a->window.index < b->window.index; });
  std::vector<SuddenBurrReport> reports;
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    if (ordered[i]->window.index != ordered[i - 1]->window.index + 1) continue;
    reports.push_back(sudden_burrs(*ordered[i - 1], *ordered[i]));
  }
  return reports;
}

nlohmann::json sudden_burrs_json(std::span<const SuddenBurrReport> reports) {
  auto out = nlohmann::json::array();
  for (const auto& report : reports) {
    for (const auto& entry : report.entries) {
      auto domains = nlohmann::json::array();
      for (const auto& d : entry.new_domains) domains.push_back({{"qname", d.qname}, {"count", d.count}});
      out.push_back({{"from", report.from_window},
                     {"to", report.to_window},
                     {"length", entry.length},
                     {"new_domains", std::move(domains)}});
    }
  }
  return out;
}

}  // namespace burrscan
