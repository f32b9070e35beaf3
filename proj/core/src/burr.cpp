#include "burrscan/burr.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <stdexcept>

#include "burrscan/errors.hpp"
#include "burrscan/ks.hpp"

namespace burrscan {

const BandEntry* ToleranceBand::at(int length) const noexcept {
  if (entries.empty()) return nullptr;
  const int offset = length - entries.front().length;
  if (offset < 0 || offset >= static_cast<int>(entries.size())) return nullptr;
  return &entries[static_cast<std::size_t>(offset)];
}

std::string_view to_string(BurrMode mode) noexcept {
  return mode == BurrMode::kUpperOnly ? "upper" : "two-sided";
}

BurrMode parse_burr_mode(std::string_view text) {
  if (text == "upper" || text == "upper_only") return BurrMode::kUpperOnly;
  if (text == "two-sided" || text == "two_sided" || text == "both") return BurrMode::kTwoSided;
  throw ConfigError("unknown burr mode '" + std::string(text) + "' (expected upper or two-sided)");
}

double excess_bound(double cdf_at_x, double d) {
  if (!(cdf_at_x >= 0.0 && cdf_at_x <= 1.0)) throw std::invalid_argument("F(x) outside [0, 1]");
  if (d < 0.0) throw std::invalid_argument("negative tolerance constant");
  return d / (1.0 + d) * (1.0 - cdf_at_x);
}

ToleranceBand delineation_band(const LengthHistogram& hist, const GaussianFit& fit, double alpha) {
  if (!fit.converged) throw FitUnavailable("no converged fit; refusing to guess a band");
  if (hist.empty()) throw EmptyHistogram("band requested for an empty histogram");

  ToleranceBand band;
  band.alpha = alpha;
  band.n = hist.n();
  band.d = ks_critical_value(hist.n(), alpha);
  const auto n = static_cast<double>(hist.n());
  for (int x = hist.min_length(); x <= hist.max_length(); ++x) {
    BandEntry e;
    e.length = x;
    e.expected = fit.value_at(x);
    e.slack = n * excess_bound(theoretical_cdf(fit, x), band.d);
    e.upper = e.expected + e.slack;
    e.lower = std::max(0.0, e.expected - e.slack);
    band.entries.push_back(e);
  }
  return band;
}

std::vector<BurrPoint> detect_burrs(const LengthHistogram& hist, const ToleranceBand& band,
                                    BurrMode mode) {
  std::vector<BurrPoint> burrs;
  for (const auto& entry : band.entries) {
    const auto observed = hist.count(entry.length);
    const auto obs = static_cast<double>(observed);
    BurrPoint p{entry.length, observed, entry.expected, entry.lower, entry.upper, 0.0, BurrSide::kAbove};
    if (obs > entry.upper) {
      p.excess = obs - entry.upper;
      burrs.push_back(p);
    } else if (mode == BurrMode::kTwoSided && obs < entry.lower) {
      p.excess = entry.lower - obs;
      p.side = BurrSide::kBelow;
      burrs.push_back(p);
    }
  }
  for (const auto& [length, count] : hist.counts()) {
    if (band.at(length) == nullptr) {
      throw std::invalid_argument("band does not cover length " + std::to_string(length));
    }
  }
  std::sort(burrs.begin(), burrs.end(), [](const BurrPoint& a, const BurrPoint& b) {
    if (a.excess != b.excess) return a.excess > b.excess;
    return a.length < b.length;
  });
  return burrs;
}

std::vector<DomainCount> burr_domains(const DomainSampleSpace& space, int length) {
  std::vector<DomainCount> out;
  for (const auto& [name, count] : space.entries()) {
    if (static_cast<int>(name.size()) == length) out.push_back({name, count});
  }
  return out;
}

void write_band_csv(const LengthHistogram& hist, const ToleranceBand& band,
                    const std::vector<BurrPoint>& burrs, std::ostream& out) {
  std::set<int> burr_lengths;
  for (const auto& b : burrs) burr_lengths.insert(b.length);
  out << "length,observed,expected,lower,upper,is_burr\n";
  const auto old_precision = out.precision(10);
  for (const auto& e : band.entries) {
    out << e.length << ',' << hist.count(e.length) << ',' << e.expected << ',' << e.lower << ','
        << e.upper << ',' << (burr_lengths.count(e.length) ? 1 : 0) << '\n';
  }
  out.precision(old_precision);
}

}  // namespace burrscan
