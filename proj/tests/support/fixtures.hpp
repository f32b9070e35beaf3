#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "burrscan/gaussian_fit.hpp"
#include "burrscan/sample_space.hpp"
#include "burrscan/synth.hpp"

namespace burrscan::fixtures {

// Unique scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

LengthHistogram histogram_of(const std::map<int, std::uint64_t>& counts);

// Counts rounded from the curve at every integer in [first, last]; zero
// counts are skipped.
LengthHistogram rounded_curve(const GaussianCurve& curve, int first, int last);

// Lengths drawn from round(Normal(mu, sigma)) clamped to [lo, hi].
LengthHistogram sampled_lengths(std::uint64_t n, double mu, double sigma, std::uint64_t seed, int lo = 4,
                                int hi = 60);

// Benign model with the given seed and size, everything else default.
BenignModel benign_model(std::uint64_t seed, std::uint64_t unique_names = 50'000, std::uint32_t max_visits = 20);

std::string read_file(const std::filesystem::path& path);

}  // namespace burrscan::fixtures
