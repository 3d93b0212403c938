#ifndef SUPPSIZE_CHEBYSHEV_HPP
#define SUPPSIZE_CHEBYSHEV_HPP

// Chebyshev polynomials of the first kind.
//
// Floating-point evaluation never uses the monomial form: the coefficients
// grow like 3^d and alternate in sign. Inside [-1, 1] we run the three-term
// recurrence; for y >= 1 we use the closed form in log space.

#include "suppsize/rational.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace suppsize::chebyshev {

// c in T_d(1+gamma) >= 2^{c d sqrt(gamma) - 1}.
inline constexpr double growth_constant = 1.0 / (2.0 * std::numbers::ln2);

struct ChebyshevPolynomial {
  int degree = 0;
  std::vector<BigInt> coefficients;  // coefficients[j] multiplies x^j

  friend bool operator==(const ChebyshevPolynomial&, const ChebyshevPolynomial&) = default;
};

// T_d(x) by the recurrence. Works for double, long double and Rational.
template <class T>
T eval_recurrence(int d, const T& x) {
  if (d < 0) throw std::invalid_argument("eval_recurrence: negative degree");
  if (d == 0) return T(1);
  T prev(1), cur(x);
  for (int k = 2; k <= d; ++k) {
    T next = T(2) * x * cur - prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

struct SignedLog {
  int sign = 1;
  double log_magnitude = 0.0;

  double value() const { return sign * std::exp(log_magnitude); }
};

namespace detail {

inline void check_degree(int d) {
  if (d < 0) throw std::invalid_argument("chebyshev: negative degree");
}

// log(y + sqrt(y^2 - 1)) for y = 1 + gamma, accurate for small gamma.
inline double log_u_shifted(double gamma) {
  return std::log1p(gamma + std::sqrt(gamma * (2.0 + gamma)));
}

}  // namespace detail

// log T_d(1 + gamma), gamma >= 0, without forming 1 + gamma.
inline double log_t_shifted(int d, double gamma) {
  detail::check_degree(d);
  if (!(gamma >= 0.0)) throw std::domain_error("log_t_shifted: gamma < 0");
  if (std::isinf(gamma)) return std::numeric_limits<double>::infinity();
  // T_d(1 + gamma) = cosh(d theta) with theta = log u.
  const double x = d * detail::log_u_shifted(gamma);
  if (x < 1.0) {
    const double s = std::sinh(0.5 * x);
    return std::log1p(2.0 * s * s);
  }
  return x + std::log1p(std::exp(-2.0 * x)) - std::numbers::ln2;
}

inline SignedLog eval_closed_form_log(int d, double y) {
  detail::check_degree(d);
  if (!(y >= 1.0)) throw std::domain_error("eval_closed_form_log: y < 1");
  return {1, log_t_shifted(d, y - 1.0)};
}

// log T_d(1 + gamma_ref + diff) - log T_d(1 + gamma_ref) with both arguments
// >= 1. The difference of the u's is formed without cancellation, so the
// result keeps full relative accuracy when diff is tiny compared to gamma_ref.
inline double log_t_ratio(int d, double gamma_ref, double diff) {
  detail::check_degree(d);
  const double gamma = gamma_ref + diff;
  if (!(gamma_ref >= 0.0) || !(gamma >= 0.0)) throw std::domain_error("log_t_ratio: argument below 1");
  if (diff == 0.0 || d == 0) return 0.0;
  const double s = std::sqrt(gamma * (2.0 + gamma));
  const double s0 = std::sqrt(gamma_ref * (2.0 + gamma_ref));
  const double du = diff * (1.0 + (2.0 + gamma + gamma_ref) / (s + s0));
  const double u0 = 1.0 + gamma_ref + s0;
  const double dlu = std::log1p(du / u0);
  const double lu0 = std::log1p(gamma_ref + s0);
  const double rho0d = std::exp(-2.0 * d * lu0);
  const double drho = rho0d * std::expm1(-2.0 * d * dlu);
  return d * dlu + std::log1p(drho / (1.0 + rho0d));
}

inline ChebyshevPolynomial coefficients_recurrence(int d) {
  detail::check_degree(d);
  std::vector<BigInt> prev{1};
  if (d == 0) return {0, prev};
  std::vector<BigInt> cur{0, 1};
  for (int k = 2; k <= d; ++k) {
    std::vector<BigInt> next(k + 1);
    for (int j = 0; j < k; ++j) next[j + 1] = 2 * cur[j];
    for (int j = 0; j < k - 1; ++j) next[j] -= prev[j];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return {d, cur};
}

// b_j = 2^{j-1} d (-1)^{(d-j)/2} ((d+j)/2 - 1)! / (((d-j)/2)! j!) for j = d mod 2.
inline ChebyshevPolynomial coefficients_formula(int d) {
  if (d < 1) throw std::invalid_argument("coefficients_formula: degree must be >= 1");
  std::vector<BigInt> fact(d + 1);
  fact[0] = 1;
  for (int i = 1; i <= d; ++i) fact[i] = fact[i - 1] * i;
  std::vector<BigInt> b(d + 1, BigInt(0));
  for (int j = d % 2; j <= d; j += 2) {
    const int h = (d - j) / 2;
    const int g = (d + j) / 2;
    if (j == 0) {
      // 2^{-1} d (g-1)! / (h! 0!) with g = h = d/2 reduces to (-1)^{d/2}.
      b[0] = (h % 2 == 0) ? 1 : -1;
      continue;
    }
    BigInt v = (BigInt(1) << (j - 1)) * d * fact[g - 1];
    v /= fact[h] * fact[j];
    b[j] = (h % 2 == 0) ? v : BigInt(-v);
  }
  return {d, b};
}

// Shared, lazily built coefficient tables.
inline std::shared_ptr<const ChebyshevPolynomial> coefficients_cached(int d) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const ChebyshevPolynomial>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[d];
  if (!slot) slot = std::make_shared<const ChebyshevPolynomial>(coefficients_recurrence(d));
  return slot;
}

// Exact value of sum c_j x^j at a double x, rounded once at the end.
inline double evaluate_exactly_at(const std::vector<BigInt>& c, double x) {
  if (c.empty()) return 0.0;
  const Rational xr = rational_from_double(x);
  const BigInt& p = numerator(xr);
  const BigInt& q = denominator(xr);
  // Horner on the homogenised form: sum c_j p^j q^{D-j} / q^D.
  const std::size_t D = c.size() - 1;
  BigInt acc = c[D];
  BigInt qpow = 1;
  for (std::size_t j = D; j-- > 0;) {
    qpow *= q;
    acc = acc * p + c[j] * qpow;
  }
  return suppsize::detail::ratio_to_double(acc, qpow);
}

inline double growth_lower_bound(int d, double gamma) {
  detail::check_degree(d);
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::domain_error("growth_lower_bound: gamma outside [0,1]");
  return std::exp2(growth_constant * d * std::sqrt(gamma) - 1.0);
}

// log T_d'(y) for y > 1 from T_d'(y) = d (u^d - v^d) / (2 sqrt(y^2 - 1)).
inline double derivative_log(int d, double y) {
  detail::check_degree(d);
  if (!(y >= 1.0)) throw std::domain_error("derivative_log: y < 1");
  if (d == 0) return -std::numeric_limits<double>::infinity();
  const double gamma = y - 1.0;
  if (gamma == 0.0) return 2.0 * std::log(static_cast<double>(d));
  const double lu = detail::log_u_shifted(gamma);
  const double s = std::sqrt(gamma * (2.0 + gamma));
  return std::log(static_cast<double>(d)) + d * lu + std::log(-std::expm1(-2.0 * d * lu)) -
         std::log(2.0 * s);
}

inline constexpr int exact_derivative_max_degree = 64;

inline double derivative_at(int d, double y) {
  detail::check_degree(d);
  if (!(y >= 1.0)) throw std::domain_error("derivative_at: y < 1");
  if (y == 1.0) return static_cast<double>(d) * d;
  if (d == 0) return 0.0;
  if (d <= exact_derivative_max_degree) {
    const auto poly = coefficients_cached(d);
    std::vector<BigInt> c(d);
    for (int j = 1; j <= d; ++j) c[j - 1] = poly->coefficients[j] * j;
    return evaluate_exactly_at(c, y);
  }
  return std::exp(derivative_log(d, y));
}

}  // namespace suppsize::chebyshev

#endif  // SUPPSIZE_CHEBYSHEV_HPP
