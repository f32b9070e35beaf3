#include "burrscan/sample_space.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "burrscan/errors.hpp"

namespace burrscan {

std::string_view to_string(SpaceKind kind) noexcept {
  return kind == SpaceKind::kDnss ? "dnss" : "adnss";
}

void DomainSampleSpace::add(std::string_view qname, std::uint64_t count) {
  if (count == 0 || qname.empty()) return;  // root queries carry no length
  auto it = entries_.find(qname);
  if (kind_ == SpaceKind::kDnss) {
    if (it == entries_.end()) {
      entries_.emplace(std::string(qname), 1);
      ++capacity_;
    }
    return;
  }
  if (it == entries_.end()) {
    entries_.emplace(std::string(qname), count);
  } else {
    it->second += count;
  }
  capacity_ += count;
}

std::uint64_t DomainSampleSpace::count(std::string_view qname) const {
  auto it = entries_.find(qname);
  return it == entries_.end() ? 0 : it->second;
}

DomainSampleSpace DomainSampleSpace::to_dnss() const {
  DomainSampleSpace out(SpaceKind::kDnss);
  for (const auto& [name, count] : entries_) out.add(name, count);
  return out;
}

DomainSampleSpace build_space(std::span<const QueryRecord> records, SpaceKind kind) {
  // Tally through a hash map first; the ordered map then sees each name once.
  std::unordered_map<std::string_view, std::uint64_t> tally;
  for (const auto& r : records) ++tally[r.qname];
  DomainSampleSpace space(kind);
  for (const auto& [name, count] : tally) space.add(name, count);
  return space;
}

void LengthHistogram::add(int length, std::uint64_t count) {
  if (length < 1) throw std::invalid_argument("histogram lengths start at 1");
  if (count == 0) return;
  counts_[length] += count;
  n_ += count;
}

std::uint64_t LengthHistogram::count(int length) const noexcept {
  auto it = counts_.find(length);
  return it == counts_.end() ? 0 : it->second;
}

int LengthHistogram::min_length() const {
  if (counts_.empty()) throw EmptyHistogram("histogram has no samples");
  return counts_.begin()->first;
}

int LengthHistogram::max_length() const {
  if (counts_.empty()) throw EmptyHistogram("histogram has no samples");
  return counts_.rbegin()->first;
}

LengthHistogram length_histogram(const DomainSampleSpace& space) {
  LengthHistogram hist;
  for (const auto& [name, count] : space.entries()) {
    hist.add(static_cast<int>(name.size()), count);
  }
  return hist;
}

void write_histogram_csv(const LengthHistogram& hist, std::ostream& out) {
  out << "length,count\n";
  for (const auto& [length, count] : hist.counts()) out << length << ',' << count << '\n';
}

EmpiricalCdf::EmpiricalCdf(const LengthHistogram& hist) : EmpiricalCdf(hist.counts()) {}

EmpiricalCdf::EmpiricalCdf(const std::map<int, std::uint64_t>& counts) {
  for (const auto& [x, c] : counts) {
    if (c == 0) continue;
    n_ += c;
    steps_.emplace_back(x, n_);
  }
  if (n_ == 0) throw EmptyHistogram("empirical CDF of an empty histogram");
}

std::uint64_t EmpiricalCdf::cumulative_count(int x) const noexcept {
  auto it = std::upper_bound(steps_.begin(), steps_.end(), x,
                             [](int value, const auto& step) { return value < step.first; });
  if (it == steps_.begin()) return 0;
  return std::prev(it)->second;
}

double EmpiricalCdf::operator()(int x) const noexcept {
  return static_cast<double>(cumulative_count(x)) / static_cast<double>(n_);
}

EmpiricalCdf empirical_cdf(const LengthHistogram& hist) { return EmpiricalCdf(hist); }

}  // namespace burrscan
