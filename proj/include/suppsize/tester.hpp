#ifndef SUPPSIZE_TESTER_HPP
#define SUPPSIZE_TESTER_HPP

#include "suppsize/estimator.hpp"
#include "suppsize/params.hpp"
#include "suppsize/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace suppsize {

enum class Decision { Accept, Reject };
enum class SamplingMode { fixed, poissonized };
enum class TesterMode { paper_IV, paper_IVb, empirical, naive };

inline const char* to_string(Decision d) { return d == Decision::Accept ? "Accept" : "Reject"; }
inline const char* to_string(SamplingMode s) { return s == SamplingMode::fixed ? "fixed" : "poissonized"; }
inline const char* to_string(TesterMode m) {
  switch (m) {
    case TesterMode::paper_IV: return "paper_IV";
    case TesterMode::paper_IVb: return "paper_IVb";
    case TesterMode::empirical: return "empirical";
    case TesterMode::naive: return "naive";
  }
  return "?";
}

struct TestVerdict {
  Decision decision = Decision::Accept;
  double statistic_value = 0.0;
  double threshold = 0.0;
  std::uint64_t samples_drawn = 0;
  std::string path;  // "naive" or "chebyshev"
  std::string note;  // why this path was taken
};

// ---------------------------------------------------------------------------
// Naive estimator: the number of distinct elements in 10 n/eps samples.

inline std::uint64_t naive_sample_size(const BigInt& n, double eps) {
  return ceil(Rational(10) * n / rational_from_double(eps)).convert_to<std::uint64_t>();
}

inline double naive_lower_bound(std::int64_t n, double eps, Sampler& sampler) {
  if (n < 1 || !(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("naive_lower_bound: need n >= 1, eps in (0,1)");
  const auto ids = sampler.draw(naive_sample_size(BigInt(n), eps));
  return static_cast<double>(SampleHistogram::from_ids(ids).distinct());
}

// Runs the estimator with n + 1 and accepts iff at most n distinct elements
// were seen.
inline TestVerdict naive_tester(std::int64_t n, double eps, Sampler& sampler) {
  if (n < 1 || !(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("naive_tester: need n >= 1, eps in (0,1)");
  const auto before = sampler.samples_drawn();
  TestVerdict v;
  v.statistic_value = naive_lower_bound(n + 1, eps, sampler);
  v.threshold = static_cast<double>(n);
  v.decision = v.statistic_value <= v.threshold ? Decision::Accept : Decision::Reject;
  v.samples_drawn = sampler.samples_drawn() - before;
  v.path = "naive";
  return v;
}

// ---------------------------------------------------------------------------
// Chebyshev tester.

// Fixed-size sampling draws M = ceil(1.1 m) samples and feeds the statistic
// the first min(Poi(m), M) of them, which reproduces the Poissonized run
// except on the event Poi(m) > M.
inline std::uint64_t fixed_sample_size(const EstimatorKernel& k) {
  return ceil(Rational(11, 10) * k.m()).convert_to<std::uint64_t>();
}

inline SampleHistogram draw_for_kernel(const EstimatorKernel& k, Sampler& sampler, SamplingMode mode) {
  if (mode == SamplingMode::poissonized) return sampler.draw_poissonized(k.m_d());
  const auto ids = sampler.draw(fixed_sample_size(k));
  const auto take = std::min<std::uint64_t>(poisson(sampler.rng(), k.m_d()), ids.size());
  SampleHistogram h;
  for (std::uint64_t i = 0; i < take; ++i) h.add(ids[i]);
  return h;
}

inline TestVerdict chebyshev_tester(const EstimatorKernel& k, Sampler& sampler, SamplingMode mode) {
  const auto before = sampler.samples_drawn();
  TestVerdict v;
  v.statistic_value = statistic(k, draw_for_kernel(k, sampler, mode));
  v.threshold = k.threshold();
  v.decision = v.statistic_value < v.threshold ? Decision::Accept : Decision::Reject;
  v.samples_drawn = sampler.samples_drawn() - before;
  v.path = "chebyshev";
  return v;
}

inline TestVerdict chebyshev_tester(std::int64_t n, double eps, Sampler& sampler, const EstimatorKernel& k,
                                    SamplingMode mode) {
  if (k.n() != n || k.eps() != eps) throw std::invalid_argument("chebyshev_tester: kernel built for other (n, eps)");
  return chebyshev_tester(k, sampler, mode);
}

// ---------------------------------------------------------------------------
// Kernel selection per mode, memoised per (n, eps).

struct KernelChoice {
  std::shared_ptr<const EstimatorKernel> kernel;  // null: use the naive path
  std::string reason;
};

class KernelProvider {
 public:
  explicit KernelProvider(TesterMode mode) : mode_(mode), state_(std::make_shared<State>()) {}

  TesterMode mode() const { return mode_; }

  KernelChoice select(std::int64_t n, double eps) const {
    std::lock_guard lock(state_->mu);
    auto key = std::make_pair(n, eps);
    auto it = state_->cache.find(key);
    if (it == state_->cache.end()) it = state_->cache.emplace(key, compute(n, eps)).first;
    return it->second;
  }

 private:
  struct State {
    std::mutex mu;
    std::map<std::pair<std::int64_t, double>, KernelChoice> cache;
  };

  KernelChoice compute(std::int64_t n, double eps) const {
    if (mode_ == TesterMode::naive) return {nullptr, "naive mode"};
    if (mode_ == TesterMode::empirical) {
      if (!empirical_assumption_holds(n, eps)) return {nullptr, "needs n^(-1/2) < eps < 1/3"};
      if (n < 10 || !(eps > 0.05)) return {nullptr, "outside the empirical search range"};
      auto found = try_empirical_params(n, eps);
      if (!found) return {nullptr, "empirical parameter search failed"};
      return {std::make_shared<const EstimatorKernel>(build_kernel(BigInt(n), eps, found->params)),
              "empirical parameters"};
    }
    if (!assumption_holds(BigInt(n), eps)) return {nullptr, "needs n^(-1/128) < eps < 1/3"};
    const auto variant = mode_ == TesterMode::paper_IV ? Variant::IV : Variant::IVb;
    try {
      const auto params = paper_params(BigInt(n), eps, variant);
      return {std::make_shared<const EstimatorKernel>(build_kernel(BigInt(n), eps, params)), "paper parameters"};
    } catch (const KernelBuildError& e) {
      return {nullptr, e.what()};
    }
  }

  TesterMode mode_;
  std::shared_ptr<State> state_;
};

// Chebyshev tester when the mode's assumption holds, naive tester otherwise.
inline TestVerdict support_size_tester(std::int64_t n, double eps, Sampler& sampler, const KernelProvider& provider,
                                       SamplingMode sampling = SamplingMode::poissonized) {
  if (n < 1 || !(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("support_size_tester: need n >= 1, eps in (0,1)");
  const auto choice = provider.select(n, eps);
  if (!choice.kernel) {
    auto v = naive_tester(n, eps, sampler);
    v.note = choice.reason;
    return v;
  }
  auto v = chebyshev_tester(*choice.kernel, sampler, sampling);
  v.note = choice.reason;
  return v;
}

inline TestVerdict support_size_tester(std::int64_t n, double eps, Sampler& sampler, TesterMode mode,
                                       SamplingMode sampling = SamplingMode::poissonized) {
  return support_size_tester(n, eps, sampler, KernelProvider(mode), sampling);
}

// ---------------------------------------------------------------------------
// Median trick.

// Smallest odd integer >= 24 ln(1/delta).
inline int repetitions_for(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("repetitions_for: delta outside (0,1)");
  int r = static_cast<int>(std::ceil(24.0 * std::log(1.0 / delta)));
  if (r < 1) r = 1;
  if (r % 2 == 0) ++r;
  return r;
}

template <class F>
double median_boost(F&& estimate_fn, int repetitions) {
  if (repetitions < 1 || repetitions % 2 == 0) throw std::invalid_argument("median_boost: repetitions must be odd");
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(repetitions));
  for (int i = 0; i < repetitions; ++i) v.push_back(estimate_fn());
  auto mid = v.begin() + repetitions / 2;
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// ---------------------------------------------------------------------------
// Lower bound on the effective support size.

struct RoundRecord {
  int index;
  double n_i;
  double delta_i;
  int repetitions;
  std::string path;
  double statistic;  // median over repetitions
  bool terminated;
};

struct LowerBoundResult {
  double estimate = 1.0;
  int rounds_used = 0;
  std::uint64_t samples_drawn = 0;
  std::vector<RoundRecord> per_round;
};

// Halves the candidate size n_i = n/2^i each round with failure budget
// delta_i = 1/(4 * 2^{i+1}). A round whose median statistic reaches
// n_{i+1} ends the search; a round outside the tester's assumption ends it
// with the naive count.
inline LowerBoundResult good_lower_bound(std::int64_t n, double eps, Sampler& sampler, const KernelProvider& provider,
                                         SamplingMode sampling = SamplingMode::poissonized) {
  if (n < 2 || !(eps > 0.0 && eps < 1.0 / 3.0))
    throw std::invalid_argument("good_lower_bound: need n >= 2 and eps in (0, 1/3)");
  LowerBoundResult res;
  const auto before = sampler.samples_drawn();
  const int last = std::bit_width(static_cast<std::uint64_t>(n)) - 1;  // floor(log2 n)
  for (int i = 0; i <= last; ++i) {
    const double n_i = std::ldexp(static_cast<double>(n), -i);
    const double n_next = n_i / 2.0;
    const double delta_i = std::ldexp(1.0, -(i + 3));
    const int reps = repetitions_for(delta_i);
    const auto n_param = static_cast<std::int64_t>(std::ceil(n_i));
    const auto choice = provider.select(n_param, eps);
    ++res.rounds_used;
    if (!choice.kernel) {
      const double est = median_boost([&] { return naive_lower_bound(n_param, eps, sampler); }, reps);
      res.per_round.push_back({i, n_i, delta_i, reps, "naive", est, true});
      res.estimate = est;
      res.samples_drawn = sampler.samples_drawn() - before;
      return res;
    }
    const auto& k = *choice.kernel;
    const double s_i = median_boost([&] { return statistic(k, draw_for_kernel(k, sampler, sampling)); }, reps);
    const bool stop = s_i >= n_next;
    res.per_round.push_back({i, n_i, delta_i, reps, "chebyshev", s_i, stop});
    if (stop) {
      res.estimate = s_i;
      res.samples_drawn = sampler.samples_drawn() - before;
      return res;
    }
  }
  res.estimate = 1.0;
  res.samples_drawn = sampler.samples_drawn() - before;
  return res;
}

}  // namespace suppsize

#endif  // SUPPSIZE_TESTER_HPP
