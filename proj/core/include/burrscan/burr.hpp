#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "burrscan/gaussian_fit.hpp"
#include "burrscan/sample_space.hpp"

namespace burrscan {

struct BandEntry {
  int length = 0;
  double expected = 0.0;  // fitted curve value
  double slack = 0.0;     // n * excess_bound(F(x), d)
  double lower = 0.0;
  double upper = 0.0;
};

// Acceptable count interval for every length of the histogram hull.
struct ToleranceBand {
  std::vector<BandEntry> entries;  // contiguous, ascending length
  double alpha = 0.05;
  double d = 0.0;                  // KS tolerance constant
  std::uint64_t n = 0;

  // nullptr when `length` is outside the band.
  const BandEntry* at(int length) const noexcept;
};

enum class BurrMode { kUpperOnly, kTwoSided };
enum class BurrSide { kAbove, kBelow };

std::string_view to_string(BurrMode mode) noexcept;
BurrMode parse_burr_mode(std::string_view text);  // "upper" | "two-sided"

struct BurrPoint {
  int length = 0;
  std::uint64_t observed = 0;
  double expected = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  // Distance outside the band: observed - upper above it, lower - observed below.
  double excess = 0.0;
  BurrSide side = BurrSide::kAbove;
};

struct DomainCount {
  std::string qname;
  std::uint64_t count = 0;

  friend auto operator<=>(const DomainCount&, const DomainCount&) = default;
};

// (d / (1 + d)) * (1 - F): bound on the cumulative-frequency excess at x.
double excess_bound(double cdf_at_x, double d);

// d = ks_critical_value(hist.n, alpha); expected = fitted curve;
// slack = n * excess_bound(F(x), d); band = [max(0, expected - slack), expected + slack].
// Throws FitUnavailable when the fit did not converge.
ToleranceBand delineation_band(const LengthHistogram& hist, const GaussianFit& fit, double alpha);

// Lengths whose observed count leaves the band, by descending excess then
// ascending length.
std::vector<BurrPoint> detect_burrs(const LengthHistogram& hist, const ToleranceBand& band,
                                    BurrMode mode = BurrMode::kUpperOnly);

// Names of the space whose length equals `length`, sorted by name.
std::vector<DomainCount> burr_domains(const DomainSampleSpace& space, int length);
inline std::vector<DomainCount> burr_domains(const DomainSampleSpace& space, const BurrPoint& burr) {
  return burr_domains(space, burr.length);
}

// `length,observed,expected,lower,upper,is_burr` over the band.
void write_band_csv(const LengthHistogram& hist, const ToleranceBand& band,
                    const std::vector<BurrPoint>& burrs, std::ostream& out);

}  // namespace burrscan
