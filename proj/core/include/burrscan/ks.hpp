#pragma once

#include <cstdint>
#include <functional>

#include "burrscan/gaussian_fit.hpp"
#include "burrscan/sample_space.hpp"

namespace burrscan {

// Inclusive integer length range.
struct LengthRange {
  int first = 0;
  int last = 0;
};

struct KsResult {
  double d_stat = 0.0;
  int at_length = 0;  // smallest maximizer
};

// max over integer x in `support` of |F(x) - S(x)|.
KsResult ks_statistic(const EmpiricalCdf& empirical, const std::function<double(int)>& theoretical,
                      LengthRange support);

// Convenience: fitted Gaussian (continuity-corrected) over the histogram hull.
KsResult ks_statistic(const LengthHistogram& hist, const GaussianFit& fit);

// One-sample KS critical value. Tabulated for n <= 35, c(alpha)/sqrt(n) above.
// alpha must be 0.10, 0.05 or 0.01 (UnsupportedAlpha otherwise).
double ks_critical_value(std::uint64_t n, double alpha);

}  // namespace burrscan
