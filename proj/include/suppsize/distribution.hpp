#ifndef SUPPSIZE_DISTRIBUTION_HPP
#define SUPPSIZE_DISTRIBUTION_HPP

#include "suppsize/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace suppsize {

using Id = std::int64_t;

struct Atom {
  Id id;
  Rational mass;
};

// A finitely supported distribution with exact masses. Doubles and the
// cumulative table are derived once at construction for sampling.
class SparseDistribution {
 public:
  SparseDistribution() = default;

  // Masses must be positive and sum to exactly 1.
  explicit SparseDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    validate();
    Rational total = 0;
    for (const auto& a : atoms_) total += a.mass;
    if (total != 1) throw std::invalid_argument("masses sum to " + to_string(total) + ", not 1");
    derive();
  }

  // Masses read from decimal text: rescaled exactly if the sum is within
  // 1e-6 of 1, rejected otherwise.
  static SparseDistribution renormalized(std::vector<Atom> atoms) {
    if (atoms.empty()) throw std::invalid_argument("empty distribution");
    Rational total = 0;
    for (const auto& a : atoms) {
      if (a.mass <= 0) throw std::invalid_argument("non-positive mass for id " + std::to_string(a.id));
      total += a.mass;
    }
    if (abs(total - 1) > Rational(1, 1000000))
      throw std::invalid_argument("masses sum to " + std::to_string(to_double(total)) + ", off by more than 1e-6");
    if (total != 1)
      for (auto& a : atoms) a.mass /= total;
    return SparseDistribution(std::move(atoms));
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<double>& masses() const { return masses_; }
  // cumulative()[i] = mass of atoms 0..i, last entry forced to 1.
  const std::vector<double>& cumulative() const { return cumulative_; }

  // Atoms ordered by mass descending, ties by ascending id.
  std::vector<Atom> sorted_by_mass() const {
    auto out = atoms_;
    std::sort(out.begin(), out.end(), [](const Atom& a, const Atom& b) {
      if (a.mass != b.mass) return a.mass > b.mass;
      return a.id < b.id;
    });
    return out;
  }

 private:
  void validate() const {
    if (atoms_.empty()) throw std::invalid_argument("empty distribution");
    std::unordered_set<Id> seen;
    for (const auto& a : atoms_) {
      if (a.mass <= 0) throw std::invalid_argument("non-positive mass for id " + std::to_string(a.id));
      if (!seen.insert(a.id).second) throw std::invalid_argument("duplicate id " + std::to_string(a.id));
    }
  }

  void derive() {
    masses_.reserve(atoms_.size());
    cumulative_.reserve(atoms_.size());
    Rational running = 0;
    for (const auto& a : atoms_) {
      masses_.push_back(to_double(a.mass));
      running += a.mass;
      cumulative_.push_back(to_double(running));
    }
    cumulative_.back() = 1.0;
  }

  std::vector<Atom> atoms_;
  std::vector<double> masses_;
  std::vector<double> cumulative_;
};

// Total mass outside the n heaviest atoms: the distance to the class of
// distributions supported on at most n elements.
inline Rational tv_distance_to_supportsize(const SparseDistribution& dist, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("tv_distance_to_supportsize: n < 0");
  const auto sorted = dist.sorted_by_mass();
  Rational tail = 0;
  for (std::size_t i = static_cast<std::size_t>(std::min<std::int64_t>(n, sorted.size())); i < sorted.size(); ++i)
    tail += sorted[i].mass;
  return tail;
}

// Smallest k whose tail beyond the k heaviest atoms is at most eps.
inline std::int64_t eff_support(const SparseDistribution& dist, const Rational& eps) {
  if (eps <= 0 || eps >= 1) throw std::invalid_argument("eff_support: eps outside (0,1)");
  const auto sorted = dist.sorted_by_mass();
  Rational tail = 1;
  std::int64_t k = 0;
  while (tail > eps) tail -= sorted[static_cast<std::size_t>(k++)].mass;
  return k;
}

inline std::int64_t eff_support(const SparseDistribution& dist, double eps) {
  return eff_support(dist, rational_from_double(eps));
}

inline SparseDistribution uniform_distribution(std::int64_t k) {
  if (k < 1) throw std::invalid_argument("uniform: k must be >= 1");
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(k));
  for (Id i = 1; i <= k; ++i) atoms.push_back({i, Rational(1, k)});
  return SparseDistribution(std::move(atoms));
}

// Masses proportional to i^-s, i = 1..k. The double weights are made exact
// and rescaled exactly, so the result sums to 1 with no rounding.
inline SparseDistribution zipf_distribution(std::int64_t k, double s) {
  if (k < 1) throw std::invalid_argument("zipf: k must be >= 1");
  if (!std::isfinite(s) || s < 0) throw std::invalid_argument("zipf: exponent must be finite and >= 0");
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(k));
  Rational total = 0;
  for (Id i = 1; i <= k; ++i) {
    Rational w = rational_from_double(std::pow(static_cast<double>(i), -s));
    total += w;
    atoms.push_back({i, std::move(w)});
  }
  for (auto& a : atoms) a.mass /= total;
  return SparseDistribution(std::move(atoms));
}

// n_heavy atoms sharing 1 - mu_light, then n_light atoms sharing mu_light.
inline SparseDistribution two_level_distribution(std::int64_t n_heavy, std::int64_t n_light, const Rational& mu_light) {
  if (n_heavy < 0 || n_light < 0 || n_heavy + n_light == 0)
    throw std::invalid_argument("two_level: atom counts must be >= 0 and not both zero");
  if (mu_light < 0 || mu_light > 1) throw std::invalid_argument("two_level: light mass outside [0,1]");
  if ((n_light == 0) != (mu_light == 0) || (n_heavy == 0) != (mu_light == 1))
    throw std::invalid_argument("two_level: a level with atoms needs positive mass");
  std::vector<Atom> atoms;
  Id next = 1;
  for (std::int64_t i = 0; i < n_heavy; ++i) atoms.push_back({next++, (1 - mu_light) / n_heavy});
  for (std::int64_t i = 0; i < n_light; ++i) atoms.push_back({next++, mu_light / n_light});
  return SparseDistribution(std::move(atoms));
}

// Uniform over the fewest atoms whose tail beyond the top n exceeds
// eps_target + margin, i.e. k = floor(n / (1 - eps_target - margin)) + 1.
inline SparseDistribution far_uniform_distribution(std::int64_t n, const Rational& eps_target,
                                                   const Rational& margin = 0) {
  if (n < 1) throw std::invalid_argument("far_uniform: n must be >= 1");
  const Rational gap = 1 - eps_target - margin;
  if (eps_target <= 0 || margin < 0 || gap <= 0)
    throw std::invalid_argument("far_uniform: need 0 < eps_target and eps_target + margin < 1");
  const BigInt k = floor(Rational(n) / gap) + 1;
  if (k > BigInt(100000000)) throw std::invalid_argument("far_uniform: support too large");
  auto dist = uniform_distribution(k.convert_to<std::int64_t>());
  if (!(tv_distance_to_supportsize(dist, n) > eps_target))
    throw std::logic_error("far_uniform: farness verification failed");
  return dist;
}

}  // namespace suppsize

#endif  // SUPPSIZE_DISTRIBUTION_HPP
