#include <gtest/gtest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "burrscan/errors.hpp"
#include "burrscan/synth.hpp"
#include "burrscan/window.hpp"
#include "fixtures.hpp"

namespace {

using namespace burrscan;

constexpr std::int64_t kT0 = 1'600'000'000'000'000;
const std::int64_t kDayUs = kDay.count();

std::vector<QueryRecord> spread(int days, int per_day) {
  std::vector<QueryRecord> out;
  for (int d = 0; d < days; ++d)
    for (int i = 0; i < per_day; ++i)
      out.push_back(QueryRecord::make(kT0 + d * kDayUs + i * 1000, "n" + std::to_string(i) + ".example.com"));
  return out;
}

TEST(CutWindows, NinetyDaysIntoThreeMonths) {
  auto records = spread(90, 3);
  const auto plan = cut_windows(records, 30 * kDay);
  ASSERT_EQ(plan.slices.size(), 3u);
  std::size_t total = 0;
  for (std::size_t i = 0; i < plan.slices.size(); ++i) {
    const auto& w = plan.slices[i].window;
    EXPECT_EQ(w.index, i);
    EXPECT_EQ(w.end_us - w.start_us, 30 * kDayUs);
    if (i > 0) {
      EXPECT_EQ(w.start_us, plan.slices[i - 1].window.end_us);
    }
    for (const auto& r : plan.slices[i].records) {
      EXPECT_GE(r.timestamp_us, w.start_us);
      EXPECT_LT(r.timestamp_us, w.end_us);
    }
    total += plan.slices[i].records.size();
  }
  EXPECT_EQ(total, records.size());
  EXPECT_EQ(plan.guidance, WindowGuidance::kOk);
}

TEST(CutWindows, BoundaryRecordGoesToLaterWindow) {
  std::vector<QueryRecord> r{QueryRecord::make(kT0, "a.com"), QueryRecord::make(kT0 + 10 * kDayUs, "b.com"),
                             QueryRecord::make(kT0 + 10 * kDayUs - 1, "c.com")};
  const auto plan = cut_windows(r, 10 * kDay);
  ASSERT_EQ(plan.slices.size(), 2u);
  ASSERT_EQ(plan.slices[1].records.size(), 1u);
  EXPECT_EQ(plan.slices[1].records[0].qname, "b.com");
  EXPECT_EQ(plan.slices[0].records.size(), 2u);
}

TEST(CutWindows, ShortCaptureIsOnePartialWindow) {
  const auto plan = cut_windows(spread(3, 2), 30 * kDay);
  ASSERT_EQ(plan.slices.size(), 1u);
  EXPECT_TRUE(plan.slices[0].window.partial());
  EXPECT_LT(plan.slices[0].window.coverage, 0.11);
  ASSERT_EQ(plan.notices.size(), 1u);
  EXPECT_NE(plan.notices[0].find("partial"), std::string::npos);
}

TEST(CutWindows, GuidanceThresholds) {
  EXPECT_EQ(window_guidance(6 * kDay), WindowGuidance::kWarning);
  EXPECT_EQ(window_guidance(7 * kDay), WindowGuidance::kCaution);
  EXPECT_EQ(window_guidance(13 * kDay), WindowGuidance::kCaution);
  EXPECT_EQ(window_guidance(14 * kDay), WindowGuidance::kOk);
  const auto plan = cut_windows(spread(20, 1), 5 * kDay);
  ASSERT_FALSE(plan.notices.empty());
  EXPECT_EQ(plan.notices[0], kShortWindowWarning);
  EXPECT_EQ(cut_windows(spread(20, 1), 10 * kDay).notices.at(0), kShortWindowCaution);
}

TEST(CutWindows, StrideAndErrors) {
  const auto plan = cut_windows(spread(30, 1), 20 * kDay, 10 * kDay);
  ASSERT_EQ(plan.slices.size(), 3u);
  EXPECT_EQ(plan.slices[1].window.start_us, kT0 + 10 * kDayUs);
  EXPECT_EQ(plan.slices[0].records.size(), 20u);
  EXPECT_EQ(plan.slices[1].records.size(), 20u);
  EXPECT_THROW(cut_windows({}, kDay), EmptyInput);
  EXPECT_THROW(cut_windows(spread(1, 1), Micros(0)), std::invalid_argument);
}

WindowSlice benign_slice(std::uint64_t seed, std::uint64_t names = 4762) {
  auto model = fixtures::benign_model(seed, names);
  WindowSlice slice;
  slice.window = {0, model.start_us, model.start_us + model.span.count(), 1.0};
  slice.records = records_of(generate_benign(model));
  return slice;
}

TEST(AnalyzeWindow, BenignTrafficHasNoBurrs) {
  int clean = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = analyze_window(benign_slice(seed));
    EXPECT_FALSE(r.unfit);
    if (r.burr_lengths.empty()) ++clean;
  }
  EXPECT_GE(clean, 18) << "clean benign windows: " << clean << "/20";
}

TEST(AnalyzeWindow, InjectedTunnelBurst) {
  auto slice = benign_slice(2);
  TunnelModel t;
  t.burst_start_us = slice.window.start_us + 10 * kDayUs;
  auto labeled = inject_tunnel(generate_benign(fixtures::benign_model(2, 4762)), t);
  slice.records = records_of(labeled);
  const auto r = analyze_window(slice);
  ASSERT_FALSE(r.unfit);
  EXPECT_TRUE(r.is_burr(67));
  const auto& at67 = r.domains_at.at(67);
  std::size_t tunnel_names = 0;
  for (const auto& d : at67) tunnel_names += d.qname.ends_with(".b.tunnel.com");
  EXPECT_EQ(tunnel_names, 5000u);
  for (const auto& [len, _] : r.domains_at) EXPECT_TRUE(r.is_burr(len));
  EXPECT_EQ(r.adnss_size(), slice.records.size());
}

TEST(AnalyzeWindow, TooFewLengthsIsUnfit) {
  WindowSlice s;
  s.window = {0, 0, kDayUs, 1.0};
  for (const char* n : {"a.com", "bb.com", "ccc.com"}) s.records.push_back(QueryRecord::make(5, n));
  const auto r = analyze_window(s);
  EXPECT_TRUE(r.unfit);
  EXPECT_TRUE(r.burr_lengths.empty());
  EXPECT_FALSE(r.dnss.fit_error.empty());
}

TEST(AnalyzeWindows, ParallelMatchesSerial) {
  std::vector<QueryRecord> all;
  for (std::uint64_t s = 1; s <= 3; ++s) {
    auto part = benign_slice(s, 1500).records;
    for (auto& r : part) r.timestamp_us += static_cast<std::int64_t>(s - 1) * 30 * kDayUs;
    all.insert(all.end(), part.begin(), part.end());
  }
  const auto plan = cut_windows(all, 30 * kDay);
  const auto serial = analyze_windows(plan, {}, 1);
  const auto parallel = analyze_windows(plan, {}, 4);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].burr_lengths, parallel[i].burr_lengths);
    EXPECT_EQ(serial[i].record_count, parallel[i].record_count);
    ASSERT_EQ(serial[i].adnss.fit.has_value(), parallel[i].adnss.fit.has_value());
    if (serial[i].adnss.fit) {
      EXPECT_EQ(serial[i].adnss.fit->mu, parallel[i].adnss.fit->mu);
    }
  }
}

WindowResult fake_window(std::size_t index, std::vector<int> burrs,
                         std::map<int, std::vector<DomainCount>> domains = {},
                         std::vector<DomainCount> extra = {}) {
  WindowResult r;
  r.window.index = index;
  r.burr_lengths = std::move(burrs);
  r.domains_at = std::move(domains);
  for (const auto& [len, ds] : r.domains_at)
    for (const auto& d : ds) r.space.add(d.qname, d.count);
  for (const auto& d : extra) r.space.add(d.qname, d.count);
  return r;
}

TEST(BurrMatrixTest, Rows) {
  const std::vector<WindowResult> ws{fake_window(0, {30}), fake_window(1, {30, 67}), fake_window(2, {30})};
  const auto m = burr_matrix(ws);
  EXPECT_EQ(m.lengths, (std::vector<int>{30, 67}));
  EXPECT_EQ(m.cells[0], (std::vector<std::uint8_t>{1, 1, 1}));
  EXPECT_EQ(m.cells[1], (std::vector<std::uint8_t>{0, 1, 0}));
  std::ostringstream out;
  write_heatmap_csv(m, out);
  EXPECT_EQ(out.str(), "burr_length,0,1,2\n30,1,1,1\n67,0,1,0\n");
}

TEST(BurrMatrixTest, EmptyAndColumnwise) {
  const std::vector<WindowResult> none{fake_window(0, {}), fake_window(1, {})};
  EXPECT_TRUE(burr_matrix(none).empty());

  const std::vector<WindowResult> ws{fake_window(0, {12, 40}), fake_window(1, {18}), fake_window(2, {12, 18, 67})};
  const auto m = burr_matrix(ws);
  for (std::size_t j = 0; j < ws.size(); ++j) {
    for (std::size_t r = 0; r < m.lengths.size(); ++r) EXPECT_EQ(m.cells[r][j], ws[j].is_burr(m.lengths[r]) ? 1 : 0);
  }
}

TEST(SuddenBurrs, NewTunnelLength) {
  const auto prev = fake_window(0, {30}, {{30, {{"1.0.0.10.in-addr.arpa", 4}}}});
  const auto cur = fake_window(1, {30, 67},
                               {{30, {{"1.0.0.10.in-addr.arpa", 5}}},
                                {67, {{"t1.b.tunnel.com", 1}}}});
  const auto rep = sudden_burrs(prev, cur);
  EXPECT_EQ(rep.from_window, 0u);
  EXPECT_EQ(rep.to_window, 1u);
  ASSERT_EQ(rep.entries.size(), 1u);
  EXPECT_EQ(rep.entries[0].length, 67);
  EXPECT_EQ(rep.entries[0].new_domains, (std::vector<DomainCount>{{"t1.b.tunnel.com", 1}}));

  const std::vector<SuddenBurrReport> reps{rep};
  const auto j = sudden_burrs_json(reps);
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["from"], 0);
  EXPECT_EQ(j[0]["to"], 1);
  EXPECT_EQ(j[0]["length"], 67);
  EXPECT_EQ(j[0]["new_domains"][0]["qname"], "t1.b.tunnel.com");
}

TEST(SuddenBurrs, IdenticalWindowsAndSelfComparison) {
  const std::map<int, std::vector<DomainCount>> d{{21, {{"hot.site.com", 900}}}, {30, {{"x.y.z.w.in-addr.arpa", 3}}}};
  const auto a = fake_window(0, {21, 30}, d);
  const auto b = fake_window(1, {21, 30}, d);
  EXPECT_TRUE(sudden_burrs(a, b).entries.empty());
  EXPECT_TRUE(burr_difference(b, b).entries.empty());
  EXPECT_THROW(sudden_burrs(a, a), NonAdjacentWindows);
  EXPECT_THROW(sudden_burrs(b, a), NonAdjacentWindows);
}

TEST(SuddenBurrs, LengthNewlyBurrExcludesNamesSeenBefore) {
  // 15 was not a burr in the previous window, but the hot name was queried there.
  const auto prev = fake_window(0, {}, {}, {{"hot.site.com.x1", 40}});
  const auto cur = fake_window(1, {15}, {{15, {{"hot.site.com.x1", 900}, {"new.site.com.x", 20}}}});
  const auto rep = sudden_burrs(prev, cur);
  ASSERT_EQ(rep.entries.size(), 1u);
  EXPECT_EQ(rep.entries[0].new_domains, (std::vector<DomainCount>{{"new.site.com.x", 20}}));
}

TEST(SuddenBurrs, RecurringHotDomainIsFilteredAcrossSeries) {
  std::vector<WindowResult> ws;
  for (std::size_t i = 0; i < 4; ++i) {
    std::map<int, std::vector<DomainCount>> d{{21, {{"cdn.popular.com.cn", 5000 + i}}}};
    if (i == 2) d[67] = {{"t0.b.tunnel.com", 3}};
    ws.push_back(fake_window(i, i == 2 ? std::vector<int>{21, 67} : std::vector<int>{21}, d));
  }
  const auto series = sudden_burr_series(ws);
  ASSERT_EQ(series.size(), 3u);
  for (const auto& rep : series)
    for (const auto& e : rep.entries)
      for (const auto& nd : e.new_domains) EXPECT_NE(nd.qname, "cdn.popular.com.cn");
  EXPECT_EQ(series[1].entries.size(), 1u);
}

}  // namespace
