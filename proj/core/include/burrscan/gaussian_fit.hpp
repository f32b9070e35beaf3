#pragma once

#include <array>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "burrscan/sample_space.hpp"

namespace burrscan {

// amplitude * exp(-(x - mu)^2 / (2 sigma^2)); no vertical offset.
struct GaussianCurve {
  double mu = 0.0;
  double sigma = 1.0;
  double amplitude = 1.0;

  double operator()(double x) const noexcept;
};

struct GaussianFit {
  double mu = 0.0;
  double sigma = 1.0;
  double amplitude = 0.0;
  double rss = 0.0;
  double r2 = 0.0;
  bool converged = false;
  int iterations = 0;
  // Lengths left out of the final refit because their residual was an outlier.
  std::vector<int> masked_lengths;

  GaussianCurve curve() const noexcept { return {mu, sigma, amplitude}; }
  double value_at(double x) const noexcept { return curve()(x); }
};

struct FitOptions {
  int max_iterations = 200;
  double rss_tolerance = 1e-9;
  double step_tolerance = 1e-9;
  double min_sigma = 0.5;
  bool robust_refit = true;
  // Lengths whose residual exceeds mask_factor * sqrt(fitted count) are masked
  // for the refit.
  double mask_factor = 4.0;
};

struct CurveSample {
  double x = 0.0;
  double y = 0.0;
};

// Fits the curve to arbitrary (x, y) samples; the samples are used as given.
// Throws InsufficientSupport for fewer than 4 samples with y > 0.
GaussianFit fit_curve(std::span<const CurveSample> samples, const FitOptions& options = {});

// Least-squares fit of the count histogram over its support hull [min, max]
// (missing lengths count as zero) by damped Gauss-Newton (Levenberg-Marquardt).
// Throws InsufficientSupport for fewer than 4 nonzero lengths and
// DegenerateFit when sigma collapses below options.min_sigma.
GaussianFit fit_gaussian(const LengthHistogram& hist, const FitOptions& options = {});

// Objective and analytic gradient (d/d mu, d/d sigma, d/d amplitude) over the
// support hull, skipping `masked`.
double fit_rss(const LengthHistogram& hist, const GaussianCurve& curve,
               const std::vector<int>& masked = {});
std::array<double, 3> rss_gradient(const LengthHistogram& hist, const GaussianCurve& curve,
                                   const std::vector<int>& masked = {});

// Normal(mu, sigma) CDF at a real point.
double normal_cdf(double x, double mu, double sigma) noexcept;

// F(x) for an integer length, with continuity correction: Phi((x + 0.5 - mu) / sigma).
double theoretical_cdf(const GaussianFit& fit, int x) noexcept;

void to_json(nlohmann::json& j, const GaussianFit& fit);

}  // namespace burrscan
