#ifndef SUPPSIZE_FUNCTIONS_HPP
#define SUPPSIZE_FUNCTIONS_HPP

// Sample-based testing of H_n = {f : |f^{-1}(1)| <= n} under an unknown
// distribution, and its equivalence with support-size testing.

#include "suppsize/distribution.hpp"
#include "suppsize/random.hpp"
#include "suppsize/sampler.hpp"
#include "suppsize/tester.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace suppsize {

struct FunctionDistributionPair {
  std::set<Id> ones;  // f^{-1}(1); may contain ids outside the support
  SparseDistribution dist;

  int label(Id id) const { return ones.count(id) ? 1 : 0; }
};

struct LabeledPoint {
  Id id;
  int label;
};

struct LabeledSample {
  std::vector<LabeledPoint> pairs;

  // Equal ids must carry equal labels.
  bool consistent() const {
    std::map<Id, int> seen;
    for (const auto& p : pairs) {
      if (p.label != 0 && p.label != 1) return false;
      auto [it, fresh] = seen.emplace(p.id, p.label);
      if (!fresh && it->second != p.label) return false;
    }
    return true;
  }
};

class LabeledSampler {
 public:
  virtual ~LabeledSampler() = default;
  virtual LabeledSample draw(std::uint64_t count) = 0;
  virtual Rng& rng() = 0;
  virtual std::uint64_t samples_drawn() const = 0;
};

class PairSampler final : public LabeledSampler {
 public:
  PairSampler(std::shared_ptr<const FunctionDistributionPair> pair, std::uint64_t seed)
      : pair_(std::move(pair)),
        inner_(std::shared_ptr<const SparseDistribution>(pair_, &pair_->dist), seed,
               PoissonizationMethod::literal) {}

  LabeledSample draw(std::uint64_t count) override {
    LabeledSample s;
    for (Id id : inner_.draw(count)) s.pairs.push_back({id, pair_->label(id)});
    return s;
  }
  Rng& rng() override { return inner_.rng(); }
  std::uint64_t samples_drawn() const override { return inner_.samples_drawn(); }

 private:
  std::shared_ptr<const FunctionDistributionPair> pair_;
  DistributionSampler inner_;
};

// Replays recorded (id, label) pairs in order.
class RecordedLabeledSampler final : public LabeledSampler {
 public:
  RecordedLabeledSampler(LabeledSample sample, std::uint64_t seed) : sample_(std::move(sample)), rng_(seed) {
    if (!sample_.consistent()) throw std::invalid_argument("labeled sample has inconsistent labels");
  }

  LabeledSample draw(std::uint64_t count) override {
    if (count > sample_.pairs.size() - pos_) throw std::out_of_range("recorded labeled sample exhausted");
    LabeledSample out;
    out.pairs.assign(sample_.pairs.begin() + static_cast<std::ptrdiff_t>(pos_),
                     sample_.pairs.begin() + static_cast<std::ptrdiff_t>(pos_ + count));
    pos_ += count;
    return out;
  }
  Rng& rng() override { return rng_; }
  std::uint64_t samples_drawn() const override { return pos_; }

 private:
  LabeledSample sample_;
  std::size_t pos_ = 0;
  Rng rng_;
};

// Distance of (f, p) to H_n: mass on ones minus the n heaviest masses on ones.
inline Rational farness_from_class(const FunctionDistributionPair& pair, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("farness_from_class: n < 0");
  std::vector<Atom> on_ones;
  for (const auto& a : pair.dist.atoms())
    if (pair.ones.count(a.id)) on_ones.push_back(a);
  std::sort(on_ones.begin(), on_ones.end(), [](const Atom& a, const Atom& b) {
    if (a.mass != b.mass) return a.mass > b.mass;
    return a.id < b.id;
  });
  Rational far = 0;
  for (std::size_t i = static_cast<std::size_t>(std::min<std::int64_t>(n, on_ones.size())); i < on_ones.size(); ++i)
    far += on_ones[i].mass;
  return far;
}

// Law of one sample after the 0-labelled ids are replaced by z: z absorbs
// the mass of f^{-1}(0), other ones keep theirs.
inline SparseDistribution collapsed_distribution(const FunctionDistributionPair& pair, Id z) {
  if (!pair.ones.count(z)) throw std::invalid_argument("collapsed_distribution: z must be labelled 1");
  Rational zero_mass = 0;
  std::vector<Atom> atoms;
  bool z_in_support = false;
  for (const auto& a : pair.dist.atoms()) {
    if (!pair.ones.count(a.id)) {
      zero_mass += a.mass;
    } else {
      atoms.push_back(a);
      z_in_support |= a.id == z;
    }
  }
  if (!z_in_support) atoms.push_back({z, Rational(0)});
  for (auto& a : atoms)
    if (a.id == z) a.mass += zero_mass;
  std::erase_if(atoms, [](const Atom& a) { return a.mass == 0; });
  return SparseDistribution(std::move(atoms));
}

using DistTester = std::function<TestVerdict(Sampler&)>;
using FunTester = std::function<TestVerdict(LabeledSampler&)>;

// Presents an unlabelled sampler as a labelled one with f = 1 everywhere.
class AllOnesSampler final : public LabeledSampler {
 public:
  explicit AllOnesSampler(Sampler& inner) : inner_(&inner) {}
  LabeledSample draw(std::uint64_t count) override {
    LabeledSample s;
    for (Id id : inner_->draw(count)) s.pairs.push_back({id, 1});
    forwarded_ += count;
    return s;
  }
  Rng& rng() override { return inner_->rng(); }
  std::uint64_t samples_drawn() const override { return inner_->samples_drawn(); }
  std::uint64_t forwarded() const { return forwarded_; }

 private:
  Sampler* inner_;
  std::uint64_t forwarded_ = 0;
};

inline TestVerdict dist_tester_from_fun_tester(const FunTester& fun_tester, Sampler& sampler) {
  AllOnesSampler labeled(sampler);
  return fun_tester(labeled);
}

// Presents a labelled sampler as an unlabelled one in which every
// 0-labelled draw reads as z.
class CollapsingSampler final : public Sampler {
 public:
  CollapsingSampler(LabeledSampler& inner, Id z) : inner_(&inner), z_(z) {}

  std::vector<Id> draw(std::uint64_t count) override {
    const auto s = inner_->draw(count);
    std::vector<Id> out;
    out.reserve(s.pairs.size());
    for (const auto& p : s.pairs) {
      out.push_back(p.label == 1 ? p.id : z_);
      if (p.label == 0) ++replaced_;
    }
    drawn_ += out.size();
    return out;
  }
  Rng& rng() override { return inner_->rng(); }
  std::uint64_t samples_drawn() const override { return drawn_; }
  std::uint64_t replaced() const { return replaced_; }

 private:
  LabeledSampler* inner_;
  Id z_;
  std::uint64_t drawn_ = 0;
  std::uint64_t replaced_ = 0;
};

struct ReductionTrace {
  std::uint64_t phase1_samples = 0;
  bool saw_one = false;
  std::optional<Id> z;
  std::uint64_t phase2_samples = 0;  // |S^(2)| = |T|
  std::uint64_t replaced = 0;        // 0-labelled draws rewritten to z
};

inline std::uint64_t phase1_sample_size(double eps, double xi) {
  return static_cast<std::uint64_t>(std::ceil(std::log(2.0 / xi) / eps));
}

// Phase 1 looks for a 1-labelled sample among ceil(ln(2/xi)/eps) draws;
// finding none, it accepts. Otherwise z is drawn uniformly from the
// 1-labelled multiset and phase 2 runs the distribution tester on draws in
// which every 0-labelled id is replaced by z.
inline TestVerdict fun_tester_from_dist_tester(const DistTester& dist_tester, double eps, double xi,
                                               LabeledSampler& sampler, ReductionTrace* trace = nullptr) {
  if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("fun_tester_from_dist_tester: xi outside (0,1)");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("fun_tester_from_dist_tester: eps outside (0,1)");
  ReductionTrace local;
  ReductionTrace& tr = trace ? *trace : local;
  const auto before = sampler.samples_drawn();
  tr.phase1_samples = phase1_sample_size(eps, xi);
  const auto s1 = sampler.draw(tr.phase1_samples);
  std::vector<Id> ones;
  for (const auto& p : s1.pairs)
    if (p.label == 1) ones.push_back(p.id);
  tr.saw_one = !ones.empty();
  if (ones.empty()) {
    TestVerdict v;
    v.decision = Decision::Accept;
    v.samples_drawn = sampler.samples_drawn() - before;
    v.path = "no-ones";
    return v;
  }
  tr.z = ones[uniform_below(sampler.rng(), ones.size())];
  CollapsingSampler collapsed(sampler, *tr.z);
  auto v = dist_tester(collapsed);
  tr.phase2_samples = collapsed.samples_drawn();
  tr.replaced = collapsed.replaced();
  v.samples_drawn = sampler.samples_drawn() - before;
  return v;
}

}  // namespace suppsize

#endif  // SUPPSIZE_FUNCTIONS_HPP
