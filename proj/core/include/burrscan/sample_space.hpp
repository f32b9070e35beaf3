#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "burrscan/query_record.hpp"

namespace burrscan {

// DNSS counts each distinct name once; ADNSS weights names by how often they
// were queried.
enum class SpaceKind { kDnss, kAdnss };

std::string_view to_string(SpaceKind kind) noexcept;

class DomainSampleSpace {
 public:
  explicit DomainSampleSpace(SpaceKind kind = SpaceKind::kDnss) : kind_(kind) {}

  // Adds `count` accesses of `qname`. In a DNSS the stored count stays 1.
  // The root name (empty) is ignored.
  void add(std::string_view qname, std::uint64_t count = 1);

  SpaceKind kind() const noexcept { return kind_; }
  const std::map<std::string, std::uint64_t, std::less<>>& entries() const noexcept { return entries_; }
  std::uint64_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  bool contains(std::string_view qname) const { return entries_.find(qname) != entries_.end(); }
  std::uint64_t count(std::string_view qname) const;

  // Same names, each counted once.
  DomainSampleSpace to_dnss() const;

 private:
  SpaceKind kind_;
  std::map<std::string, std::uint64_t, std::less<>> entries_;
  std::uint64_t capacity_ = 0;
};

DomainSampleSpace build_space(std::span<const QueryRecord> records, SpaceKind kind);

// Frequency of each name length. Only lengths with a nonzero count are keys.
class LengthHistogram {
 public:
  LengthHistogram() = default;

  // Throws std::invalid_argument for length < 1.
  void add(int length, std::uint64_t count = 1);

  std::uint64_t count(int length) const noexcept;
  std::uint64_t n() const noexcept { return n_; }
  bool empty() const noexcept { return n_ == 0; }
  const std::map<int, std::uint64_t>& counts() const noexcept { return counts_; }
  std::size_t distinct_lengths() const noexcept { return counts_.size(); }
  int min_length() const;
  int max_length() const;

  friend bool operator==(const LengthHistogram&, const LengthHistogram&) = default;

 private:
  std::map<int, std::uint64_t> counts_;
  std::uint64_t n_ = 0;
};

LengthHistogram length_histogram(const DomainSampleSpace& space);

// Writes `length,count`, one row per nonzero length.
void write_histogram_csv(const LengthHistogram& hist, std::ostream& out);

// Right-continuous step function S(x) = (#samples with length <= x) / n.
class EmpiricalCdf {
 public:
  // Throws EmptyHistogram when the histogram has no samples.
  explicit EmpiricalCdf(const LengthHistogram& hist);
  // Arbitrary integer support; used for direct construction in tests and tools.
  explicit EmpiricalCdf(const std::map<int, std::uint64_t>& counts);

  double operator()(int x) const noexcept;
  std::uint64_t cumulative_count(int x) const noexcept;
  std::uint64_t n() const noexcept { return n_; }
  int min_length() const noexcept { return steps_.front().first; }
  int max_length() const noexcept { return steps_.back().first; }

 private:
  std::vector<std::pair<int, std::uint64_t>> steps_;  // (length, cumulative count)
  std::uint64_t n_ = 0;
};

EmpiricalCdf empirical_cdf(const LengthHistogram& hist);

}  // namespace burrscan
