#ifndef SUPPSIZE_SIMULATE_HPP
#define SUPPSIZE_SIMULATE_HPP

#include "suppsize/distribution.hpp"
#include "suppsize/estimator.hpp"
#include "suppsize/histogram.hpp"
#include "suppsize/random.hpp"
#include "suppsize/sampler.hpp"
#include "suppsize/tester.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace suppsize {

inline SampleHistogram sample_fixed(const SparseDistribution& dist, std::uint64_t count, std::uint64_t seed) {
  DistributionSampler s(std::make_shared<const SparseDistribution>(dist), seed);
  return SampleHistogram::from_ids(s.draw(count));
}

inline SampleHistogram sample_poissonized(const SparseDistribution& dist, double m, std::uint64_t seed,
                                          PoissonizationMethod method = PoissonizationMethod::per_atom) {
  DistributionSampler s(std::make_shared<const SparseDistribution>(dist), seed, method);
  return s.draw_poissonized(m);
}

struct TesterConfig {
  std::int64_t n = 0;
  double eps = 0.0;
  TesterMode mode = TesterMode::empirical;
  SamplingMode sampling = SamplingMode::poissonized;
  PoissonizationMethod poissonization = PoissonizationMethod::per_atom;
};

struct TrialReport {
  std::int64_t trials = 0;
  std::int64_t accept_count = 0;
  double mean_stat = 0.0;
  double var_stat = 0.0;  // unbiased sample variance
  std::string path;       // path of trial 0; all trials share it
  // Present only on the Chebyshev path.
  double analytic_mean = std::numeric_limits<double>::quiet_NaN();
  double analytic_var_bound = std::numeric_limits<double>::quiet_NaN();
  double exact_var = std::numeric_limits<double>::quiet_NaN();  // Poissonized variance on this distribution
  double mean_samples = 0.0;
  std::uint64_t max_samples = 0;
  std::uint64_t master_seed = 0;
  std::string seed_rule = "trial t uses derive_seed(master, {t})";

  double accept_rate() const { return trials ? static_cast<double>(accept_count) / trials : 0.0; }
  double reject_rate() const { return 1.0 - accept_rate(); }
};

inline std::uint64_t trial_seed(std::uint64_t master, std::int64_t trial) {
  return derive_seed(master, {static_cast<std::uint64_t>(trial)});
}

// Runs `trials` independent testers. Each trial's randomness depends only on
// (master_seed, trial index) and results are reduced in index order, so the
// report is identical for any thread count.
inline TrialReport monte_carlo(const TesterConfig& cfg, const SparseDistribution& dist, std::int64_t trials,
                               std::uint64_t master_seed, unsigned threads = 1) {
  if (trials < 1) throw std::invalid_argument("monte_carlo: trials must be >= 1");
  const auto shared = std::make_shared<const SparseDistribution>(dist);
  const KernelProvider provider(cfg.mode);
  const auto choice = provider.select(cfg.n, cfg.eps);  // resolve once, before forking
  std::vector<TestVerdict> verdicts(static_cast<std::size_t>(trials));
  auto run = [&](std::int64_t t) {
    DistributionSampler sampler(shared, trial_seed(master_seed, t), cfg.poissonization);
    verdicts[static_cast<std::size_t>(t)] = support_size_tester(cfg.n, cfg.eps, sampler, provider, cfg.sampling);
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(trials)));
  if (threads == 1) {
    for (std::int64_t t = 0; t < trials; ++t) run(t);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::int64_t t = w; t < trials; t += threads) run(t);
      });
    for (auto& th : pool) th.join();
  }

  TrialReport rep;
  rep.trials = trials;
  rep.master_seed = master_seed;
  rep.path = verdicts.front().path;
  double sum = 0.0, samples = 0.0;
  for (const auto& v : verdicts) {
    rep.accept_count += v.decision == Decision::Accept;
    sum += v.statistic_value;
    samples += static_cast<double>(v.samples_drawn);
    rep.max_samples = std::max(rep.max_samples, v.samples_drawn);
  }
  rep.mean_stat = sum / static_cast<double>(trials);
  rep.mean_samples = samples / static_cast<double>(trials);
  double ss = 0.0;
  for (const auto& v : verdicts) ss += (v.statistic_value - rep.mean_stat) * (v.statistic_value - rep.mean_stat);
  rep.var_stat = trials > 1 ? ss / static_cast<double>(trials - 1) : 0.0;
  if (choice.kernel) {
    rep.analytic_mean = expected_statistic(*choice.kernel, dist);
    rep.analytic_var_bound = cfg.eps * cfg.eps * static_cast<double>(cfg.n) * static_cast<double>(cfg.n) / 64.0;
    rep.exact_var = statistic_variance(*choice.kernel, dist);
  }
  return rep;
}

}  // namespace suppsize

#endif  // SUPPSIZE_SIMULATE_HPP
