#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

namespace burrscan::fixtures {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::atomic<int> serial{0};
  path_ = fs::temp_directory_path() /
          ("burrscan-test-" + std::to_string(::getpid()) + "-" + std::to_string(serial++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

LengthHistogram histogram_of(const std::map<int, std::uint64_t>& counts) {
  LengthHistogram h;
  for (const auto& [len, c] : counts) h.add(len, c);
  return h;
}

LengthHistogram rounded_curve(const GaussianCurve& curve, int first, int last) {
  LengthHistogram h;
  for (int x = first; x <= last; ++x) {
    const auto c = static_cast<std::uint64_t>(std::llround(curve(x)));
    if (c > 0) h.add(x, c);
  }
  return h;
}

LengthHistogram sampled_lengths(std::uint64_t n, double mu, double sigma, std::uint64_t seed, int lo, int hi) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> law(mu, sigma);
  std::map<int, std::uint64_t> counts;
  for (std::uint64_t i = 0; i < n; ++i) counts[std::clamp(static_cast<int>(std::lround(law(rng))), lo, hi)]++;
  return histogram_of(counts);
}

BenignModel benign_model(std::uint64_t seed, std::uint64_t unique_names, std::uint32_t max_visits) {
  BenignModel m;
  m.seed = seed;
  m.unique_names = unique_names;
  m.max_visits = max_visits;
  return m;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace burrscan::fixtures
