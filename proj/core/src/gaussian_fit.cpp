#include "burrscan/gaussian_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "burrscan/errors.hpp"

namespace burrscan {

namespace {

using Point = CurveSample;

std::vector<Point> fit_points(const LengthHistogram& hist, const std::vector<int>& masked) {
  std::vector<Point> pts;
  const int lo = hist.min_length();
  const int hi = hist.max_length();
  pts.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int x = lo; x <= hi; ++x) {
    if (std::find(masked.begin(), masked.end(), x) != masked.end()) continue;
    pts.push_back({static_cast<double>(x), static_cast<double>(hist.count(x))});
  }
  return pts;
}

double rss_of(std::span<const Point> pts, const GaussianCurve& c) {
  double sum = 0.0;
  for (const auto& p : pts) {
    const double r = p.y - c(p.x);
    sum += r * r;
  }
  return sum;
}

GaussianCurve moment_start(std::span<const Point> pts) {
  double n = 0.0, mean = 0.0, peak = 0.0;
  for (const auto& p : pts) {
    n += p.y;
    mean += p.y * p.x;
    peak = std::max(peak, p.y);
  }
  mean /= n;
  double var = 0.0;
  for (const auto& p : pts) var += p.y * (p.x - mean) * (p.x - mean);
  var /= n;
  return {mean, std::max(std::sqrt(var), 1.0), peak};
}

double weighted_median(std::vector<std::pair<double, double>> values) {
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (const auto& v : values) total += v.second;
  double seen = 0.0;
  for (const auto& [x, w] : values) {
    seen += w;
    if (seen >= 0.5 * total) return x;
  }
  return values.back().first;
}

// Median and scaled MAD: a spike at one length, however tall, cannot drag the
// starting point out of the bulk the way moments would.
GaussianCurve robust_start(std::span<const Point> pts) {
  std::vector<std::pair<double, double>> weighted;
  weighted.reserve(pts.size());
  for (const auto& p : pts) {
    if (p.y > 0.0) weighted.emplace_back(p.x, p.y);
  }
  const double center = weighted_median(weighted);
  for (auto& w : weighted) w.first = std::abs(w.first - center);
  const double spread = std::max(1.4826 * weighted_median(weighted), 1.0);
  double peak = 0.0;
  for (const auto& p : pts) {
    if (std::abs(p.x - center) <= spread) peak = std::max(peak, p.y);
  }
  return {center, spread, peak};
}

struct LmOutcome {
  GaussianCurve curve;
  double rss = 0.0;
  bool converged = false;
  int iterations = 0;
};

LmOutcome levenberg_marquardt(std::span<const Point> pts, GaussianCurve start,
                              const FitOptions& opt) {
  LmOutcome out{start, rss_of(pts, start), false, 0};
  double lambda = 1e-3;
  Eigen::Matrix3d jtj;
  Eigen::Vector3d jtr;

  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    out.iterations = iter;
    const GaussianCurve& c = out.curve;
    jtj.setZero();
    jtr.setZero();
    for (const auto& p : pts) {
      const double dx = p.x - c.mu;
      const double e = std::exp(-dx * dx / (2.0 * c.sigma * c.sigma));
      const double g = c.amplitude * e;
      Eigen::Vector3d j(g * dx / (c.sigma * c.sigma), g * dx * dx / (c.sigma * c.sigma * c.sigma), e);
      jtj.noalias() += j * j.transpose();
      jtr.noalias() += j * (p.y - g);
    }

    bool accepted = false;
    while (!accepted) {
      Eigen::Matrix3d damped = jtj;
      for (int k = 0; k < 3; ++k) damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      const Eigen::Vector3d step = damped.ldlt().solve(jtr);
      const GaussianCurve trial{c.mu + step(0), c.sigma + step(1), c.amplitude + step(2)};
      const double trial_rss =
          (trial.sigma > 0.0 && std::isfinite(step.sum())) ? rss_of(pts, trial)
                                                            : std::numeric_limits<double>::infinity();
      if (trial_rss <= out.rss) {
        const double rel_change = (out.rss - trial_rss) / std::max(out.rss, 1e-300);
        const double rel_step = std::max({std::abs(step(0)) / std::max(1.0, std::abs(c.mu)),
                                          std::abs(step(1)) / std::max(1.0, std::abs(c.sigma)),
                                          std::abs(step(2)) / std::max(1.0, std::abs(c.amplitude))});
        out.curve = trial;
        out.rss = trial_rss;
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
        if (rel_change < opt.rss_tolerance && rel_step < opt.step_tolerance) {
          out.converged = true;
          return out;
        }
      } else {
        lambda *= 10.0;
        if (lambda > 1e15) {
          // No descent direction left at working precision.
          out.converged = true;
          return out;
        }
      }
    }
  }
  return out;
}

struct MaskedFit {
  LmOutcome lm;
  std::vector<int> masked;
  std::vector<Point> kept;
};

// A length is an outlier when its residual exceeds mask_factor standard
// deviations of the counting noise at the fitted value. Mask and refit until
// the mask is stable.
MaskedFit masked_fit(std::span<const Point> pts, GaussianCurve start, const FitOptions& opt) {
  MaskedFit out{levenberg_marquardt(pts, start, opt), {}, {}};
  for (int pass = 0; pass < 10; ++pass) {
    std::vector<int> next_masked;
    std::vector<Point> next_kept;
    for (const auto& p : pts) {
      const double fitted = out.lm.curve(p.x);
      if (std::abs(p.y - fitted) > opt.mask_factor * std::sqrt(std::max(fitted, 1.0)))
        next_masked.push_back(static_cast<int>(std::lround(p.x)));
      else
        next_kept.push_back(p);
    }
    const auto kept_support =
        std::count_if(next_kept.begin(), next_kept.end(), [](const Point& p) { return p.y > 0.0; });
    if (next_masked == out.masked || kept_support < 4) break;
    out.masked = std::move(next_masked);
    out.kept = std::move(next_kept);
    const int spent = out.lm.iterations;
    out.lm = levenberg_marquardt(out.kept, out.lm.curve, opt);
    out.lm.iterations += spent;
  }
  return out;
}

double noise_scaled_median(std::span<const Point> pts, const GaussianCurve& c) {
  std::vector<double> r;
  r.reserve(pts.size());
  for (const auto& p : pts) {
    const double fitted = c(p.x);
    r.push_back(std::abs(p.y - fitted) / std::sqrt(std::max(fitted, 1.0)));
  }
  const auto mid = r.begin() + static_cast<std::ptrdiff_t>(r.size() / 2);
  std::nth_element(r.begin(), mid, r.end());
  return *mid;
}

GaussianFit finish(std::span<const Point> pts, const LmOutcome& lm, std::vector<int> masked,
                   const FitOptions& opt) {
  const GaussianCurve& c = lm.curve;
  if (!std::isfinite(c.mu) || !std::isfinite(c.sigma) || c.sigma < opt.min_sigma) {
    throw DegenerateFit("fitted sigma " + std::to_string(c.sigma) + " is below " +
                        std::to_string(opt.min_sigma) + " characters");
  }
  double mean_y = 0.0;
  for (const auto& p : pts) mean_y += p.y;
  mean_y /= static_cast<double>(pts.size());
  double tss = 0.0;
  for (const auto& p : pts) tss += (p.y - mean_y) * (p.y - mean_y);

  GaussianFit fit;
  fit.mu = c.mu;
  fit.sigma = c.sigma;
  fit.amplitude = c.amplitude;
  fit.rss = lm.rss;
  fit.r2 = tss > 0.0 ? 1.0 - lm.rss / tss : (lm.rss == 0.0 ? 1.0 : 0.0);
  fit.converged = lm.converged;
  fit.iterations = lm.iterations;
  fit.masked_lengths = std::move(masked);
  return fit;
}

}  // namespace

double GaussianCurve::operator()(double x) const noexcept {
  const double z = (x - mu) / sigma;
  return amplitude * std::exp(-0.5 * z * z);
}

GaussianFit fit_curve(std::span<const CurveSample> samples, const FitOptions& opt) {
  const auto support = std::count_if(samples.begin(), samples.end(), [](const Point& p) { return p.y > 0.0; });
  if (support < 4) {
    throw InsufficientSupport("Gaussian fit needs at least 4 distinct lengths, got " + std::to_string(support));
  }
  const std::vector<Point> pts(samples.begin(), samples.end());
  if (!opt.robust_refit) return finish(pts, levenberg_marquardt(pts, robust_start(pts), opt), {}, opt);

  // One spike can hold most of the mass, so no single start is safe. Each
  // candidate is fitted and masked; the one that leaves the bulk of the
  // points closest to counting noise wins.
  std::vector<GaussianCurve> starts{robust_start(pts), moment_start(pts)};
  const auto tallest = std::max_element(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.y < b.y; });
  std::vector<Point> without_tallest;
  for (auto it = pts.begin(); it != pts.end(); ++it) {
    if (it != tallest) without_tallest.push_back(*it);
  }
  starts.push_back(robust_start(without_tallest));

  std::optional<MaskedFit> best;
  double best_score = 0.0;
  for (const auto& start : starts) {
    MaskedFit candidate = masked_fit(pts, start, opt);
    const GaussianCurve& c = candidate.lm.curve;
    // Degenerate candidates only survive when nothing else does, so that
    // finish() reports them.
    const bool usable = std::isfinite(c.mu) && std::isfinite(c.amplitude) && c.sigma >= opt.min_sigma;
    const double score = !usable ? std::numeric_limits<double>::infinity()
                                 : (candidate.lm.converged ? 0.0 : 1e6) + noise_scaled_median(pts, c);
    if (!best || score < best_score) {
      best = std::move(candidate);
      best_score = score;
    }
  }
  if (best->masked.empty()) return finish(pts, best->lm, {}, opt);
  return finish(best->kept, best->lm, std::move(best->masked), opt);
}

GaussianFit fit_gaussian(const LengthHistogram& hist, const FitOptions& opt) {
  if (hist.distinct_lengths() < 4) {
    throw InsufficientSupport("Gaussian fit needs at least 4 distinct lengths, got " +
                              std::to_string(hist.distinct_lengths()));
  }
  return fit_curve(fit_points(hist, {}), opt);
}

double fit_rss(const LengthHistogram& hist, const GaussianCurve& curve, const std::vector<int>& masked) {
  return rss_of(fit_points(hist, masked), curve);
}

std::array<double, 3> rss_gradient(const LengthHistogram& hist, const GaussianCurve& c,
                                   const std::vector<int>& masked) {
  std::array<double, 3> grad{0.0, 0.0, 0.0};
  for (const auto& p : fit_points(hist, masked)) {
    const double dx = p.x - c.mu;
    const double e = std::exp(-dx * dx / (2.0 * c.sigma * c.sigma));
    const double g = c.amplitude * e;
    const double r = p.y - g;
    grad[0] += -2.0 * r * g * dx / (c.sigma * c.sigma);
    grad[1] += -2.0 * r * g * dx * dx / (c.sigma * c.sigma * c.sigma);
    grad[2] += -2.0 * r * e;
  }
  return grad;
}

double normal_cdf(double x, double mu, double sigma) noexcept {
  return 0.5 * std::erfc(-(x - mu) / (sigma * std::sqrt(2.0)));
}

double theoretical_cdf(const GaussianFit& fit, int x) noexcept {
  return normal_cdf(static_cast<double>(x) + 0.5, fit.mu, fit.sigma);
}

void to_json(nlohmann::json& j, const GaussianFit& fit) {
  j = nlohmann::json{{"mu", fit.mu},
                     {"sigma", fit.sigma},
                     {"amplitude", fit.amplitude},
                     {"rss", fit.rss},
                     {"r2", fit.r2},
                     {"converged", fit.converged},
                     {"iterations", fit.iterations},
                     {"masked_lengths", fit.masked_lengths}};
}

}  // namespace burrscan
