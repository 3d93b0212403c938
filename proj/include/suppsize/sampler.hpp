#ifndef SUPPSIZE_SAMPLER_HPP
#define SUPPSIZE_SAMPLER_HPP

#include "suppsize/distribution.hpp"
#include "suppsize/histogram.hpp"
#include "suppsize/random.hpp"

#include <algorithm>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace suppsize {

// Source of i.i.d. samples from an unknown distribution. Every draw is
// counted in samples_drawn().
class Sampler {
 public:
  virtual ~Sampler() = default;

  virtual std::vector<Id> draw(std::uint64_t count) = 0;

  // Poissonized draw: count ~ Poi(mean), then that many i.i.d. samples.
  virtual SampleHistogram draw_poissonized(double mean) {
    return SampleHistogram::from_ids(draw(poisson(rng(), mean)));
  }

  virtual Rng& rng() = 0;
  virtual std::uint64_t samples_drawn() const = 0;
};

enum class PoissonizationMethod { per_atom, literal };

class DistributionSampler final : public Sampler {
 public:
  DistributionSampler(std::shared_ptr<const SparseDistribution> dist, std::uint64_t seed,
                      PoissonizationMethod method = PoissonizationMethod::per_atom)
      : dist_(std::move(dist)), rng_(seed), method_(method) {
    if (!dist_) throw std::invalid_argument("DistributionSampler: null distribution");
  }

  std::vector<Id> draw(std::uint64_t count) override {
    const auto& cum = dist_->cumulative();
    const auto& atoms = dist_->atoms();
    std::vector<Id> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      const double u = uniform01(rng_);
      auto it = std::upper_bound(cum.begin(), cum.end(), u);
      if (it == cum.end()) --it;
      out.push_back(atoms[static_cast<std::size_t>(it - cum.begin())].id);
    }
    drawn_ += count;
    return out;
  }

  // Per-atom mode draws N_i ~ Poi(mean p_i) independently, which has the
  // same joint law as the literal two-stage draw.
  SampleHistogram draw_poissonized(double mean) override {
    if (method_ == PoissonizationMethod::literal) return Sampler::draw_poissonized(mean);
    if (!(mean >= 0.0)) throw std::invalid_argument("draw_poissonized: negative mean");
    SampleHistogram h;
    const auto& masses = dist_->masses();
    const auto& atoms = dist_->atoms();
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const auto c = poisson(rng_, mean * masses[i]);
      h.add(atoms[i].id, c);
      drawn_ += c;
    }
    return h;
  }

  Rng& rng() override { return rng_; }
  std::uint64_t samples_drawn() const override { return drawn_; }
  const SparseDistribution& distribution() const { return *dist_; }

 private:
  std::shared_ptr<const SparseDistribution> dist_;
  Rng rng_;
  PoissonizationMethod method_;
  std::uint64_t drawn_ = 0;
};

// Replays a recorded sample of unknown origin, in order. Running out of
// recorded ids is an error; the Poisson count itself uses a seeded stream.
class RecordedSampler final : public Sampler {
 public:
  RecordedSampler(std::vector<Id> ids, std::uint64_t seed) : ids_(std::move(ids)), rng_(seed) {}

  std::vector<Id> draw(std::uint64_t count) override {
    if (count > ids_.size() - pos_)
      throw std::out_of_range("recorded sample exhausted: need " + std::to_string(count) + " more ids, " +
                              std::to_string(ids_.size() - pos_) + " left");
    std::vector<Id> out(ids_.begin() + static_cast<std::ptrdiff_t>(pos_),
                        ids_.begin() + static_cast<std::ptrdiff_t>(pos_ + count));
    pos_ += count;
    return out;
  }

  Rng& rng() override { return rng_; }
  std::uint64_t samples_drawn() const override { return pos_; }
  std::size_t available() const { return ids_.size() - pos_; }

 private:
  std::vector<Id> ids_;
  std::size_t pos_ = 0;
  Rng rng_;
};

}  // namespace suppsize

#endif  // SUPPSIZE_SAMPLER_HPP
