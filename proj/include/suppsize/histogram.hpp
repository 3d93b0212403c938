#ifndef SUPPSIZE_HISTOGRAM_HPP
#define SUPPSIZE_HISTOGRAM_HPP

#include "suppsize/distribution.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace suppsize {

// Occurrence counts N_i of a sample; absent ids have N_i = 0.
class SampleHistogram {
 public:
  SampleHistogram() = default;

  template <class Range>
  static SampleHistogram from_ids(const Range& ids) {
    SampleHistogram h;
    for (Id id : ids) h.add(id);
    return h;
  }

  void add(Id id, std::uint64_t times = 1) {
    if (times == 0) return;
    counts_[id] += times;
    total_ += times;
  }

  const std::map<Id, std::uint64_t>& counts() const { return counts_; }
  std::uint64_t total() const { return total_; }
  std::size_t distinct() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }

  // F_j = number of ids seen exactly j times, keyed by j ascending.
  std::map<std::uint64_t, std::uint64_t> fingerprint() const {
    std::map<std::uint64_t, std::uint64_t> f;
    for (const auto& [id, c] : counts_) ++f[c];
    return f;
  }

 private:
  std::map<Id, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

}  // namespace suppsize

#endif  // SUPPSIZE_HISTOGRAM_HPP
