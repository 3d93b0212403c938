#ifndef SUPPSIZE_RANDOM_HPP
#define SUPPSIZE_RANDOM_HPP

// Portable random variates. std::mt19937_64's output sequence is fixed by the
// standard, but the std:: distributions are not, so the variates used by the
// testers are implemented here to keep runs bit-identical across toolchains.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>

namespace suppsize {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of the stream identified by a path of counters under a master seed,
// e.g. derive_seed(master, {trial, repetition}). Streams are independent of
// the order in which they are created.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master);
  for (auto c : path) h = splitmix64(h ^ splitmix64(c + 0x632be59bd9b4e019ULL));
  return h;
}

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Uniform integer in [0, bound) by rejection (no modulo bias).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: zero bound");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do x = rng(); while (x >= limit);
  return x % bound;
}

namespace detail {

// Multiplication method; fine for small means.
inline std::uint64_t poisson_knuth(Rng& rng, double mu) {
  const double limit = std::exp(-mu);
  std::uint64_t k = 0;
  double prod = uniform01(rng);
  while (prod > limit) {
    ++k;
    prod *= uniform01(rng);
  }
  return k;
}

// Hormann's transformed rejection with squeeze (PTRS), for mu >= 10.
inline std::uint64_t poisson_ptrs(Rng& rng, double mu) {
  const double slam = std::sqrt(mu);
  const double loglam = std::log(mu);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2);
  for (;;) {
    const double u = uniform01(rng) - 0.5;
    const double v = uniform01(rng);
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2 * a / us + b) * u + mu + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mu + k * loglam - std::lgamma(k + 1))
      return static_cast<std::uint64_t>(k);
  }
}

}  // namespace detail

inline std::uint64_t poisson(Rng& rng, double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("poisson: mean must be finite and >= 0");
  if (mu == 0.0) return 0;
  return mu < 10.0 ? detail::poisson_knuth(rng, mu) : detail::poisson_ptrs(rng, mu);
}

}  // namespace suppsize

#endif  // SUPPSIZE_RANDOM_HPP
