#ifndef SUPPSIZE_ESTIMATOR_HPP
#define SUPPSIZE_ESTIMATOR_HPP

// The instantiated test statistic.
//
// P_d(x) = -delta * T_d(psi(x)) with psi mapping [l, r] onto [1, -1] and
// delta = 1/T_d(psi(0)), so P_d(0) = -1. Writing P_d(x) = sum a_k x^k - 1,
// the per-count weights are f(k) = a_k k!/m^k, and the Poissonized
// statistic sum_j F_j (1 + f(j)) has mean sum_i Q(p_i) with
// Q(x) = 1 + e^{-mx} P_d(x).
//
// delta, a_k and f(k) are rational when l, r, m are, so they are built
// exactly and rounded only for streaming.

#include "suppsize/chebyshev.hpp"
#include "suppsize/distribution.hpp"
#include "suppsize/histogram.hpp"
#include "suppsize/rational.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace suppsize {

enum class ParamMode { paper_IV, paper_IVb, empirical };

inline const char* to_string(ParamMode m) {
  switch (m) {
    case ParamMode::paper_IV: return "paper_IV";
    case ParamMode::paper_IVb: return "paper_IVb";
    case ParamMode::empirical: return "empirical";
  }
  return "?";
}

struct ParamSet {
  Rational ell;
  Rational r;
  int d = 0;
  BigInt m;
  ParamMode mode = ParamMode::empirical;
};

class SafeInterval {
 public:
  SafeInterval(Rational ell, Rational r) : ell_(std::move(ell)), r_(std::move(r)) {
    if (!(ell_ > 0 && ell_ < r_ && r_ <= 1)) throw std::invalid_argument("safe interval needs 0 < ell < r <= 1");
    alpha_ = ell_ / r_;
    ell_d_ = to_double(ell_);
    r_d_ = to_double(r_);
    width_d_ = to_double(Rational(r_ - ell_));
  }

  const Rational& ell() const { return ell_; }
  const Rational& r() const { return r_; }
  const Rational& alpha() const { return alpha_; }
  double ell_d() const { return ell_d_; }
  double r_d() const { return r_d_; }
  double width_d() const { return width_d_; }  // r - ell, rounded once

 private:
  Rational ell_, r_, alpha_;
  double ell_d_, r_d_, width_d_;
};

// -(2x - r - l)/(r - l).
inline double psi(const SafeInterval& iv, double x) {
  return (iv.r_d() - x + (iv.ell_d() - x)) / iv.width_d();
}

inline Rational psi(const SafeInterval& iv, const Rational& x) {
  return -(2 * x - iv.r() - iv.ell()) / (iv.r() - iv.ell());
}

class KernelBuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KernelBuildOptions {
  int max_degree = 512;
};

class EstimatorKernel;
EstimatorKernel build_kernel(const BigInt& n, double eps, const ParamSet& params,
                             const KernelBuildOptions& options = {});

class EstimatorKernel {
 public:
  const BigInt& n() const { return n_; }
  double n_d() const { return n_d_; }
  double eps() const { return eps_; }
  const BigInt& m() const { return m_; }
  double m_d() const { return m_d_; }
  int d() const { return d_; }
  const SafeInterval& interval() const { return interval_; }
  const ParamSet& params() const { return params_; }
  const Rational& delta() const { return delta_; }
  double delta_d() const { return delta_d_; }
  double log_delta() const { return log_delta_; }
  // f_table()[k] = f(k) for k = 0..d.
  const std::vector<Rational>& f_table() const { return f_table_; }
  const std::vector<double>& f_double() const { return f_double_; }
  // a_coeffs()[k-1] = a_k for k = 1..d.
  const std::vector<Rational>& a_coeffs() const { return a_coeffs_; }

  double f(std::uint64_t j) const { return j <= static_cast<std::uint64_t>(d_) ? f_double_[j] : 0.0; }
  double threshold() const { return (1.0 + eps_ / 2.0) * n_d_; }

  // log(delta * T_d(psi(0))): zero for any kernel from build_kernel.
  double normalization_log() const { return norm_log_; }
  // 2 alpha/(1 - alpha) = psi(0) - 1.
  double gamma0() const { return gamma0_; }

  // Copy with delta (and everything derived from it) multiplied by factor.
  // Only meant for fault-injection tests of the invariant suites.
  EstimatorKernel with_scaled_delta(const Rational& factor) const {
    EstimatorKernel k = *this;
    k.delta_ *= factor;
    for (auto& a : k.a_coeffs_) a *= factor;
    for (std::size_t j = 1; j < k.f_table_.size(); ++j) k.f_table_[j] *= factor;
    k.finish(Rational(k.delta_ / delta_));
    return k;
  }

 private:
  friend EstimatorKernel build_kernel(const BigInt&, double, const ParamSet&, const KernelBuildOptions&);

  EstimatorKernel(BigInt n, double eps, ParamSet params)
      : n_(std::move(n)), eps_(eps), m_(params.m), d_(params.d), interval_(params.ell, params.r),
        params_(std::move(params)) {}

  void finish(const Rational& delta_times_t0) {
    n_d_ = to_double(n_);
    m_d_ = to_double(m_);
    delta_d_ = to_double(delta_);
    log_delta_ = log_abs(delta_);
    norm_log_ = log_abs(delta_times_t0);
    f_double_.clear();
    for (const auto& f : f_table_) f_double_.push_back(to_double(f));
    const Rational g0 = 2 * interval_.alpha() / (1 - interval_.alpha());
    gamma0_ = to_double(g0);
  }

  BigInt n_;
  double eps_;
  BigInt m_;
  int d_;
  SafeInterval interval_;
  ParamSet params_;
  Rational delta_;
  std::vector<Rational> f_table_;
  std::vector<Rational> a_coeffs_;
  std::vector<double> f_double_;
  double n_d_ = 0, m_d_ = 0, delta_d_ = 0, log_delta_ = 0, norm_log_ = 0, gamma0_ = 0;
};

inline EstimatorKernel build_kernel(const BigInt& n, double eps, const ParamSet& params,
                                    const KernelBuildOptions& options) {
  if (n < 1) throw std::invalid_argument("build_kernel: n must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("build_kernel: eps outside (0,1)");
  if (params.d < 1 || params.m < 1) throw std::invalid_argument("build_kernel: need d >= 1 and m >= 1");
  if (params.d > options.max_degree)
    throw KernelBuildError("build_kernel: degree " + std::to_string(params.d) + " exceeds budget " +
                           std::to_string(options.max_degree));
  EstimatorKernel k(n, eps, params);
  const int d = params.d;

  // (r + l) = s/q and (r - l) = t/q over a common denominator q.
  const Rational sum = params.r + params.ell;
  const Rational diff = params.r - params.ell;
  const BigInt q = boost::multiprecision::lcm(denominator(sum), denominator(diff));
  const BigInt s = numerator(sum) * (q / denominator(sum));
  const BigInt t = numerator(diff) * (q / denominator(diff));

  // T_d(s/t) = N_d / t^d via N_k = 2s N_{k-1} - t^2 N_{k-2}.
  const BigInt t2 = t * t;
  BigInt n_prev = 1, n_cur = s;
  for (int j = 2; j <= d; ++j) {
    BigInt next = 2 * s * n_cur - t2 * n_prev;
    n_prev = std::move(n_cur);
    n_cur = std::move(next);
  }
  const BigInt& big_n = n_cur;
  std::vector<BigInt> t_pow(d + 1), s_pow(d + 1);
  t_pow[0] = s_pow[0] = 1;
  for (int j = 1; j <= d; ++j) {
    t_pow[j] = t_pow[j - 1] * t;
    s_pow[j] = s_pow[j - 1] * s;
  }
  k.delta_ = Rational(t_pow[d], big_n);

  // a_k = (-1)^{k+1} 2^k q^k / N_d * sum_{j>=k} b_j C(j,k) s^{j-k} t^{d-j}.
  const auto b = chebyshev::coefficients_cached(d);
  k.a_coeffs_.resize(d);
  BigInt qk = 1;
  for (int kk = 1; kk <= d; ++kk) {
    qk *= q;
    BigInt acc = 0;
    BigInt c = 1;  // C(kk, kk)
    for (int j = kk; j <= d; ++j) {
      if (j > kk) c = c * j / (j - kk);
      const BigInt& bj = b->coefficients[j];
      if (bj != 0) acc += bj * c * s_pow[j - kk] * t_pow[d - j];
    }
    BigInt num = (BigInt(1) << kk) * qk * acc;
    if (kk % 2 == 0) num = -num;
    k.a_coeffs_[kk - 1] = Rational(num, big_n);
  }

  k.f_table_.assign(d + 1, Rational(0));
  k.f_table_[0] = -1;
  BigInt fact = 1, m_pow = 1;
  for (int kk = 1; kk <= d; ++kk) {
    fact *= kk;
    m_pow *= params.m;
    k.f_table_[kk] = k.a_coeffs_[kk - 1] * Rational(fact, m_pow);
  }
  k.finish(Rational(1));
  return k;
}

// Independent route to f(k): the closed form obtained by substituting the
// factorial expression of b_j into a_k k!/m^k.
inline std::vector<Rational> f_values_direct(const SafeInterval& iv, int d, const BigInt& m, const Rational& delta) {
  if (d < 1) throw std::invalid_argument("f_values_direct: d must be >= 1");
  std::vector<BigInt> fact(2 * d + 1);
  fact[0] = 1;
  for (int i = 1; i <= 2 * d; ++i) fact[i] = fact[i - 1] * i;
  const Rational sum = iv.r() + iv.ell();
  const Rational diff = iv.r() - iv.ell();
  std::vector<Rational> out(d + 1, Rational(0));
  out[0] = -1;
  for (int k = 1; k <= d; ++k) {
    Rational acc = 0;
    for (int j = k; j <= d; ++j) {
      if ((d - j) % 2 != 0) continue;
      const int h = (d - j) / 2;
      const int g = (d + j) / 2;
      // Coefficient of x^j in T_d, expressed through 2^{j-1} d (g-1)!/(h! j!)
      // and multiplied by C(j,k) k!, which cancels j! down to (j-k)!.
      Rational term(BigInt(1) << (k + j - 1), BigInt(1));
      term *= Rational(fact[g - 1], fact[h] * fact[j - k]);
      term *= ipow(sum, static_cast<unsigned>(j - k));
      term /= ipow(diff, static_cast<unsigned>(j));
      if (h % 2 != 0) term = -term;
      acc += term;
    }
    acc *= delta * d;
    acc /= ipow(Rational(m), static_cast<unsigned>(k));
    out[k] = (k % 2 == 1) ? acc : Rational(-acc);
  }
  return out;
}

namespace detail {

// log T_d(psi(x)) - log T_d(psi(0)) for 0 <= x <= l, where psi(x) >= 1.
inline double log_t_ratio_left(const EstimatorKernel& k, double x) {
  return chebyshev::log_t_ratio(k.d(), k.gamma0(), -2.0 * x / k.interval().width_d());
}

struct SignedLogValue {
  int sign;
  double log_magnitude;
};

// P_d(x) for x > r as sign and log magnitude; psi(x) < -1 there.
inline SignedLogValue p_right_of_r(const EstimatorKernel& k, double x) {
  const double gamma = 2.0 * (x - k.interval().r_d()) / k.interval().width_d();
  const int t_sign = (k.d() % 2 == 0) ? 1 : -1;
  return {-t_sign, k.log_delta() + chebyshev::log_t_shifted(k.d(), gamma)};
}

}  // namespace detail

inline double p_poly_eval(const EstimatorKernel& k, double x) {
  const auto& iv = k.interval();
  if (x < iv.ell_d()) {
    if (x < 0.0) return -std::exp(k.log_delta() + chebyshev::log_t_shifted(k.d(), psi(iv, x) - 1.0));
    return -std::exp(detail::log_t_ratio_left(k, x) + k.normalization_log());
  }
  if (x <= iv.r_d()) return -k.delta_d() * chebyshev::eval_recurrence(k.d(), psi(iv, x));
  const auto v = detail::p_right_of_r(k, x);
  return v.sign * std::exp(v.log_magnitude);
}

inline double q_eval(const EstimatorKernel& k, double x) {
  if (!(x >= 0.0)) throw std::domain_error("q_eval: x < 0");
  if (x == 0.0) return 0.0;
  const auto& iv = k.interval();
  const double mx = k.m_d() * x;
  if (x < iv.ell_d()) return -std::expm1(detail::log_t_ratio_left(k, x) + k.normalization_log() - mx);
  if (x <= iv.r_d()) return 1.0 + std::exp(-mx) * p_poly_eval(k, x);
  const auto v = detail::p_right_of_r(k, x);
  return 1.0 + v.sign * std::exp(v.log_magnitude - mx);
}

// |1 - Q(x)| = e^{-mx} |P_d(x)|, without the cancellation of 1 - q_eval.
inline double one_minus_q_abs(const EstimatorKernel& k, double x) {
  if (!(x >= 0.0)) throw std::domain_error("one_minus_q_abs: x < 0");
  const auto& iv = k.interval();
  const double mx = k.m_d() * x;
  if (x < iv.ell_d()) return std::exp(detail::log_t_ratio_left(k, x) + k.normalization_log() - mx);
  if (x <= iv.r_d()) return std::exp(-mx) * std::fabs(p_poly_eval(k, x));
  return std::exp(detail::p_right_of_r(k, x).log_magnitude - mx);
}

inline double q_star_eval(const EstimatorKernel& k, double x) {
  if (!(x >= 0.0)) throw std::domain_error("q_star_eval: x < 0");
  if (x >= k.interval().ell_d()) return 1.0 - k.delta_d();
  if (x == 0.0) return 0.0;
  return -std::expm1(detail::log_t_ratio_left(k, x) + k.normalization_log());
}

// Sum over the fingerprint, j ascending. Neumaier compensation kicks in for
// very large fingerprints.
inline double statistic(const EstimatorKernel& k, const SampleHistogram& h) {
  const auto fp = h.fingerprint();
  const bool compensated = fp.size() > 1000000;
  double sum = 0.0, comp = 0.0;
  for (const auto& [j, fj] : fp) {
    const double term = static_cast<double>(fj) * (1.0 + k.f(j));
    if (!compensated) {
      sum += term;
      continue;
    }
    const double t = sum + term;
    comp += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + comp;
}

inline double expected_statistic(const EstimatorKernel& k, const SparseDistribution& dist) {
  double sum = 0.0;
  for (double p : dist.masses()) sum += q_eval(k, p);
  return sum;
}

// delta d^2 3^d (2d/(m(r-l)))^k ((r+l)/(r-l))^{d-k}, formed in log space.
inline double f_value_bound(const EstimatorKernel& k, int index) {
  if (index < 1 || index > k.d()) throw std::out_of_range("f_value_bound: index outside [1, d]");
  const auto& iv = k.interval();
  const double d = k.d();
  const double log_width = log_abs(Rational(iv.r() - iv.ell()));
  const double log_ratio = log_abs(Rational((iv.r() + iv.ell()) / (iv.r() - iv.ell())));
  const double lg = k.log_delta() + 2.0 * std::log(d) + d * std::log(3.0) +
                    index * (std::log(2.0 * d) - log_abs(k.m()) - log_width) + (d - index) * log_ratio;
  return std::exp(lg);
}

// Mean and variance of 1 + f(N) for N ~ Poi(mean).
struct CountMoments {
  double mean;
  double variance;
};

inline CountMoments poisson_count_moments(const EstimatorKernel& k, double mean) {
  if (!(mean >= 0.0)) throw std::domain_error("poisson_count_moments: negative mean");
  std::vector<double> pmf(static_cast<std::size_t>(k.d()) + 1);
  double head = 0.0;
  for (int j = 0; j <= k.d(); ++j) {
    pmf[j] = mean == 0.0 ? (j == 0 ? 1.0 : 0.0) : std::exp(-mean + j * std::log(mean) - std::lgamma(j + 1.0));
    head += pmf[j];
  }
  const double tail = std::max(0.0, 1.0 - head);
  double e = tail;
  for (int j = 0; j <= k.d(); ++j) e += pmf[j] * (1.0 + k.f_double()[j]);
  double v = tail * (1.0 - e) * (1.0 - e);
  for (int j = 0; j <= k.d(); ++j) {
    const double dev = 1.0 + k.f_double()[j] - e;
    v += pmf[j] * dev * dev;
  }
  return {e, v};
}

// Exact Poissonized variance of the statistic on a known distribution.
inline double statistic_variance(const EstimatorKernel& k, const SparseDistribution& dist) {
  double v = 0.0;
  for (double p : dist.masses()) v += poisson_count_moments(k, k.m_d() * p).variance;
  return v;
}

}  // namespace suppsize

#endif  // SUPPSIZE_ESTIMATOR_HPP
