#ifndef SUPPSIZE_PARAMS_HPP
#define SUPPSIZE_PARAMS_HPP

// Parameter constraints, the asymptotic parameter choice, a desk-scale
// parameter search, and the soundness function Phi.
//
// Every "log" in the constraints is base 2: the constant C_d = 4 ln 2 pairs
// with the growth bound T_d(1+g) >= 2^{c d sqrt(g) - 1}, c = 1/(2 ln 2).

#include "suppsize/chebyshev.hpp"
#include "suppsize/estimator.hpp"
#include "suppsize/rational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace suppsize {

inline constexpr double C_d = 4.0 * std::numbers::ln2;
inline const Rational paper_a{1, 128};
inline const Rational C_ell_IV{1, 20};
// min{C_d/(4 sqrt 3), 1/3}; the first term is about 0.400.
inline const Rational C_ell_IVb{1, 3};
// 4 a^2 C_ell.
inline const Rational C_r = 4 * paper_a * paper_a * C_ell_IV;

enum class Variant { IV, IVb };

inline const char* to_string(Variant v) { return v == Variant::IV ? "IV" : "IVb"; }

class ParameterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ConstraintId { I_ratio, I_degree, II, III_samples, III_growth, IV, IVb, assumption };

inline const char* to_string(ConstraintId id) {
  switch (id) {
    case ConstraintId::I_ratio: return "I.ratio";
    case ConstraintId::I_degree: return "I.degree";
    case ConstraintId::II: return "II";
    case ConstraintId::III_samples: return "III.samples";
    case ConstraintId::III_growth: return "III.growth";
    case ConstraintId::IV: return "IV";
    case ConstraintId::IVb: return "IVb";
    case ConstraintId::assumption: return "assumption";
  }
  return "?";
}

struct ConstraintRecord {
  ConstraintId id;
  bool satisfied;
  double slack;  // log(rhs) - log(lhs); >= 0 iff satisfied
};

struct ConstraintReport {
  Variant variant = Variant::IV;
  std::vector<ConstraintRecord> records;

  const ConstraintRecord& get(ConstraintId id) const {
    for (const auto& r : records)
      if (r.id == id) return r;
    throw std::out_of_range("constraint not evaluated");
  }
  bool satisfied(ConstraintId id) const { return get(id).satisfied; }

  // Constraint I: both halves.
  bool constraint_I() const { return satisfied(ConstraintId::I_ratio) && satisfied(ConstraintId::I_degree); }

  // Everything the chosen variant requires: I, II, III, IV or IVb, and the
  // assumption on (n, eps).
  bool all_satisfied() const {
    for (const auto& r : records) {
      if (r.id == ConstraintId::IV && variant == Variant::IVb) continue;
      if (r.id == ConstraintId::IVb && variant == Variant::IV) continue;
      if (!r.satisfied) return false;
    }
    return true;
  }
};

namespace detail {

// Relative+absolute cushion applied against satisfaction in log-space checks.
inline double log_cushion(double a, double b) { return 1e-12 * (1.0 + std::fabs(a) + std::fabs(b)); }

inline ConstraintRecord exact_record(ConstraintId id, const Rational& lhs, const Rational& rhs) {
  const bool ok = lhs <= rhs;
  double slack = log_abs(rhs) - log_abs(lhs);
  if (ok && !(slack >= 0)) slack = 0.0;
  if (!ok && !(slack < 0)) slack = -std::numeric_limits<double>::min();
  return {id, ok, slack};
}

inline ConstraintRecord log_record(ConstraintId id, double log_lhs, double log_rhs) {
  const double slack = log_rhs - log_lhs - log_cushion(log_lhs, log_rhs);
  return {id, slack >= 0.0, slack};
}

inline void check_n_eps(const BigInt& n, double eps) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
}

}  // namespace detail

// n^-a < eps < 1/3, as a record. The slack is the smaller of the two margins.
inline ConstraintRecord assumption_record(const BigInt& n, double eps, const Rational& a = paper_a) {
  detail::check_n_eps(n, eps);
  const double log_n = log_abs(n);
  const double lhs = -std::log(eps);
  const double rhs = to_double(a) * log_n;
  const double slack_lo = rhs - lhs - detail::log_cushion(lhs, rhs);
  const bool below_third = rational_from_double(eps) < Rational(1, 3);
  const double slack_hi = std::log(1.0 / 3.0) - std::log(eps);
  const bool ok = slack_lo > 0.0 && below_third;
  double slack = std::min(slack_lo, slack_hi);
  if (ok && !(slack > 0)) slack = std::numeric_limits<double>::min();
  if (!ok && slack > 0) slack = 0.0;
  return {ConstraintId::assumption, ok, slack};
}

inline bool assumption_holds(const BigInt& n, double eps, const Rational& a = paper_a) {
  return assumption_record(n, eps, a).satisfied;
}

inline ConstraintReport check_constraints(const BigInt& n, double eps, const ParamSet& p, Variant variant,
                                          const Rational& a = paper_a) {
  detail::check_n_eps(n, eps);
  if (!(p.ell > 0 && p.ell < p.r && p.r <= 1) || p.d < 1 || p.m < 1)
    throw std::invalid_argument("check_constraints: malformed parameter set");
  using detail::exact_record;
  using detail::log_record;
  const Rational eps_q = rational_from_double(eps);
  const Rational width = p.r - p.ell;
  const double log_n = log_abs(n);
  const double log_width = log_abs(width);
  const double d = p.d;

  ConstraintReport rep;
  rep.variant = variant;

  rep.records.push_back(exact_record(ConstraintId::I_ratio, 3 * p.ell, p.r));
  {
    // d >= C_d sqrt((r-l)/(2l)) log2(20/eps)
    const double log_rhs = std::log(C_d) + 0.5 * (log_width - log_abs(Rational(2 * p.ell))) +
                           std::log(std::log2(20.0) - std::log2(eps));
    rep.records.push_back(log_record(ConstraintId::I_degree, log_rhs, std::log(d)));
  }
  // m >= 5.5 d / (r - l)
  rep.records.push_back(exact_record(ConstraintId::II, Rational(11 * p.d, 2), Rational(p.m * width)));
  // m <= eps^2 n^2 / 4^4
  rep.records.push_back(exact_record(ConstraintId::III_samples, Rational(p.m * 256), eps_q * eps_q * n * n));
  {
    // d^6 9^d ((r+l)/(r-l))^{2d-2} <= m (r-l)^2 n^2 / 4
    const double log_lhs = 6.0 * std::log(d) + d * std::log(9.0) +
                           (2.0 * d - 2.0) * log_abs(Rational((p.r + p.ell) / width));
    const double log_rhs = log_abs(p.m) + 2.0 * log_width + 2.0 * log_n - std::log(4.0);
    rep.records.push_back(log_record(ConstraintId::III_growth, log_lhs, log_rhs));
  }
  rep.records.push_back(exact_record(ConstraintId::IV, p.ell, C_ell_IV * eps_q / n));
  {
    // l <= (1/3) (eps/n) log2(1/eps)
    const double log_rhs = log_abs(Rational(C_ell_IVb * eps_q / n)) + std::log(-std::log2(eps));
    rep.records.push_back(log_record(ConstraintId::IVb, log_abs(p.ell), log_rhs));
  }
  rep.records.push_back(assumption_record(n, eps, a));
  return rep;
}

// The asymptotic parameter formulas without the assumption gate, for
// audits outside the supported range. Testers go through paper_params.
inline ParamSet paper_params_ungated(const BigInt& n, double eps, Variant variant) {
  detail::check_n_eps(n, eps);
  const Rational eps_q = rational_from_double(eps);
  const double log_ratio = log_abs(n) / -std::log(eps);  // log n / log(1/eps), any base
  ParamSet p;
  p.mode = ParamMode::paper_IV;
  p.ell = C_ell_IV * eps_q / n;
  p.r = C_r * eps_q / n * rational_from_double(log_ratio * log_ratio);
  const double half_gap = (to_double(Rational(p.r / p.ell)) - 1.0) / 2.0;  // (r-l)/(2l)
  const double d_real = C_d * std::sqrt(half_gap) * (std::log2(20.0) - std::log2(eps));
  if (!(d_real < 1e6)) throw ParameterError("paper parameters: degree out of range");
  p.d = std::max(1, static_cast<int>(std::ceil(d_real)));
  if (variant == Variant::IVb) {
    const Rational scale = rational_from_double(-std::log2(eps));
    p.ell *= scale;
    p.r *= scale;
    p.mode = ParamMode::paper_IVb;
  }
  if (!(p.r <= 1)) throw ParameterError("paper parameters: r exceeds 1");
  p.m = ceil(Rational(11 * p.d, 2) / (p.r - p.ell));
  return p;
}

// The asymptotic parameter choice. Requires n^{-1/128} < eps < 1/3.
inline ParamSet paper_params(const BigInt& n, double eps, Variant variant) {
  detail::check_n_eps(n, eps);
  if (!assumption_holds(n, eps))
    throw ParameterError("paper parameters need n^(-1/128) < eps < 1/3; use the naive tester");
  return paper_params_ungated(n, eps, variant);
}

// Phi(lambda) = (1 + 1/(L lambda)) Q*(lambda l) with L = l n / eps.
class PhiEvaluator {
 public:
  explicit PhiEvaluator(const EstimatorKernel& kernel)
      : kernel_(&kernel),
        L_(kernel.interval().ell_d() * kernel.n_d() / kernel.eps()),
        A_(C_d * -std::log2(kernel.eps()) / std::sqrt(3.0)),
        K_(A_ / L_) {}

  const EstimatorKernel& kernel() const { return *kernel_; }
  double L() const { return L_; }
  double A() const { return A_; }
  double K() const { return K_; }
  double target() const { return 1.0 + 0.75 * kernel_->eps(); }

 private:
  const EstimatorKernel* kernel_;
  double L_, A_, K_;
};

inline double phi_eval(const PhiEvaluator& ev, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw std::domain_error("phi_eval: lambda outside (0,1]");
  const auto& k = ev.kernel();
  return (1.0 + 1.0 / (ev.L() * lambda)) * q_star_eval(k, lambda * k.interval().ell_d());
}

// (delta eps/(l n)) g0 T_d'(1 + g0) with g0 = 2 alpha/(1 - alpha).
inline double phi_limit_at_zero(const PhiEvaluator& ev) {
  const auto& k = ev.kernel();
  const double g0 = k.gamma0();
  const double y = 1.0 + g0;
  if (k.d() <= chebyshev::exact_derivative_max_degree)
    return k.delta_d() * g0 * chebyshev::derivative_at(k.d(), y) / ev.L();
  return std::exp(k.log_delta() + std::log(g0) + chebyshev::derivative_log(k.d(), y) - std::log(ev.L()));
}

struct PhiCheck {
  bool passed = false;
  double target = 0.0;
  double limit = 0.0;
  double min_value = 0.0;
  double argmin = 0.0;  // 0 stands for the limit
};

// Half the points uniform on (0, 1], half geometric on (0, min(1, 10/L)]
// down to 1e-9 of that range.
inline std::vector<double> phi_grid(const PhiEvaluator& ev, int grid_size) {
  if (grid_size < 100) throw std::invalid_argument("phi_grid: grid_size must be >= 100");
  const int half = grid_size / 2;
  const int geo = grid_size - half;
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(grid_size));
  for (int i = 1; i <= half; ++i) g.push_back(static_cast<double>(i) / half);
  const double hi = std::min(1.0, 10.0 / ev.L());
  for (int j = 0; j < geo; ++j) g.push_back(hi * std::pow(10.0, -9.0 * (1.0 - static_cast<double>(j) / (geo - 1))));
  return g;
}

inline PhiCheck phi_grid_check_detailed(const PhiEvaluator& ev, int grid_size = 10000) {
  PhiCheck out;
  out.target = ev.target();
  out.limit = phi_limit_at_zero(ev);
  out.min_value = out.limit;
  out.argmin = 0.0;
  for (double lam : phi_grid(ev, grid_size)) {
    const double v = phi_eval(ev, lam);
    if (!(v >= out.min_value)) {
      out.min_value = v;
      out.argmin = lam;
    }
  }
  out.passed = out.min_value >= out.target;
  return out;
}

inline bool phi_grid_check(const PhiEvaluator& ev, int grid_size = 10000) {
  return phi_grid_check_detailed(ev, grid_size).passed;
}

struct PhiDifferentialCheck {
  bool passed = true;
  double worst_margin = std::numeric_limits<double>::infinity();  // normalised by scale
  double witness = 0.0;
};

// Phi'(l) >= -Phi (A + 1/(l (L l + 1))) + (1 - delta) A (1 + 1/(L l)), with
// Phi' from central differences, tolerance 1e-4 * scale.
inline PhiDifferentialCheck phi_differential_check(const PhiEvaluator& ev, int grid_size = 1000, double h = 1e-7) {
  PhiDifferentialCheck out;
  const double A = ev.A(), L = ev.L();
  const double one_minus_delta = 1.0 - ev.kernel().delta_d();
  for (int i = 0; i < grid_size; ++i) {
    const double lam = (i + 0.5) / grid_size;
    if (lam - h <= 0.0 || lam + h >= 1.0) continue;
    const double phi = phi_eval(ev, lam);
    const double deriv = (phi_eval(ev, lam + h) - phi_eval(ev, lam - h)) / (2.0 * h);
    const double drag = phi * (A + 1.0 / (lam * (L * lam + 1.0)));
    const double push = one_minus_delta * A * (1.0 + 1.0 / (L * lam));
    const double scale = std::max({1.0, std::fabs(drag), std::fabs(push)});
    const double margin = (deriv - (push - drag)) / scale;
    if (margin < out.worst_margin) {
      out.worst_margin = margin;
      out.witness = lam;
    }
    if (margin < -1e-4) out.passed = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Desk-scale parameters.

// The empirical tester runs when n^{-1/2} < eps < 1/3.
inline const Rational empirical_a{1, 2};

inline bool empirical_assumption_holds(std::int64_t n, double eps) {
  return n >= 1 && assumption_holds(BigInt(n), eps, empirical_a);
}

struct EmpiricalChecks {
  double delta = 0, delta_limit = 0;             // delta <= eps/20
  double right_tail_ratio = 0;                   // max |1 - Q| / delta over (r, 1]
  double variance_envelope = 0, variance_budget = 0;  // sup v(x)/x vs eps^2 n^2 / 4^3
  double variance_proxy = 0;                     // m max_j (1 + f(j))^2, informational
  PhiCheck phi;
  BigInt m, naive_budget;                        // m < 10 n / eps
  int candidates_tried = 0;
};

struct EmpiricalParams {
  ParamSet params;
  EmpiricalChecks checks;
};

namespace detail {

// max over a log grid of x in (r, 1] of |1 - Q(x)| / delta.
inline double right_tail_ratio(const EstimatorKernel& k, int points = 1000) {
  const double r = k.interval().r_d();
  double worst = 0.0;
  for (int i = 1; i <= points; ++i) {
    const double x = i == points ? 1.0 : r * std::pow(1.0 / r, static_cast<double>(i) / points);
    worst = std::max(worst, one_minus_q_abs(k, x));
  }
  return worst / k.delta_d();
}

// sup over x in [x_min, 1] of Var(1 + f(Poi(m x))) / x. For a distribution
// whose atoms all weigh at least x_min this bounds Var of the statistic,
// since Var = sum_i v(p_i) = sum_i p_i v(p_i)/p_i.
inline double variance_envelope(const EstimatorKernel& k, double x_min, int points = 400) {
  double worst = 0.0;
  auto visit = [&](double x) {
    if (x < x_min || x > 1.0) return;
    worst = std::max(worst, poisson_count_moments(k, k.m_d() * x).variance / x);
  };
  for (int i = 0; i <= points; ++i) visit(x_min * std::pow(1.0 / x_min, static_cast<double>(i) / points));
  visit(k.interval().ell_d());
  visit(k.interval().r_d());
  return worst;
}

inline double variance_proxy(const EstimatorKernel& k) {
  double mx = 1.0;
  for (double f : k.f_double()) mx = std::max(mx, (1.0 + f) * (1.0 + f));
  return k.m_d() * mx;
}

}  // namespace detail

// Runs the semantic checks on one candidate. Returns true iff all pass.
inline bool empirical_checks_pass(const EstimatorKernel& k, EmpiricalChecks& c) {
  const double eps = k.eps();
  const double n = k.n_d();
  c.delta = k.delta_d();
  c.delta_limit = eps / 20.0;
  c.m = k.m();
  c.naive_budget = ceil(Rational(10) * k.n() / rational_from_double(eps));
  c.variance_budget = eps * eps * n * n / 64.0;
  c.variance_proxy = detail::variance_proxy(k);
  if (!(k.delta() * 20 <= rational_from_double(eps))) return false;
  if (!(k.m() < c.naive_budget)) return false;
  c.right_tail_ratio = detail::right_tail_ratio(k);
  if (!(c.right_tail_ratio <= 1.0 + 1e-9)) return false;
  c.variance_envelope = detail::variance_envelope(k, 1.0 / (4.0 * n));
  if (!(c.variance_envelope <= c.variance_budget)) return false;
  c.phi = phi_grid_check_detailed(PhiEvaluator(k));
  return c.phi.passed;
}

// Deterministic search over l = (j/20) eps/n, j = 1..40, and r = ratio * l.
// For each pair, d is the least degree with T_d(psi(0)) >= 20/eps and
// m = ceil(5.5 d/(r - l)). Candidates are tried in order of increasing
// (m, d, j, ratio); the first that passes every semantic check wins.
inline std::optional<EmpiricalParams> try_empirical_params(std::int64_t n, double eps) {
  if (n < 10 || !(eps > 0.05 && eps < 1.0 / 3.0))
    throw std::invalid_argument("empirical_params: need n >= 10 and eps in (0.05, 1/3)");
  static const std::vector<Rational> ratios = {
      Rational(3), Rational(7, 2), Rational(4), Rational(9, 2), Rational(5), Rational(6), Rational(7),
      Rational(8), Rational(9), Rational(10), Rational(12), Rational(14), Rational(16), Rational(18),
      Rational(20), Rational(25), Rational(30), Rational(35), Rational(40), Rational(50)};
  const Rational eps_q = rational_from_double(eps);
  const BigInt n_big(n);
  const BigInt naive_budget = ceil(Rational(10) * n_big / eps_q);
  const double log_target = std::log(20.0 / eps);

  struct Candidate {
    BigInt m;
    int d;
    int j;
    std::size_t ratio_index;
    ParamSet params;
  };
  std::vector<Candidate> cands;
  for (int j = 1; j <= 40; ++j) {
    const Rational ell = Rational(j, 20) * eps_q / n_big;
    for (std::size_t ri = 0; ri < ratios.size(); ++ri) {
      const Rational r = ell * ratios[ri];
      if (r > 1) continue;
      const double g0 = to_double(Rational(2 * ell / (r - ell)));
      int d = 1;
      while (d <= 200 && chebyshev::log_t_shifted(d, g0) < log_target) ++d;
      if (d > 200) continue;
      const BigInt m = ceil(Rational(11 * d, 2) / (r - ell));
      if (!(m < naive_budget)) continue;
      cands.push_back({m, d, j, ri, ParamSet{ell, r, d, m, ParamMode::empirical}});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.m, a.d, a.j, a.ratio_index) < std::tie(b.m, b.d, b.j, b.ratio_index);
  });

  int tried = 0;
  for (const auto& c : cands) {
    ++tried;
    const auto k = build_kernel(n_big, eps, c.params);
    EmpiricalChecks checks;
    if (empirical_checks_pass(k, checks)) {
      checks.candidates_tried = tried;
      return EmpiricalParams{c.params, checks};
    }
  }
  return std::nullopt;
}

inline EmpiricalParams empirical_params(std::int64_t n, double eps) {
  auto found = try_empirical_params(n, eps);
  if (!found)
    throw ParameterError("empirical parameter search found no kernel for n=" + std::to_string(n) +
                         " eps=" + std::to_string(eps));
  return *found;
}

}  // namespace suppsize

#endif  // SUPPSIZE_PARAMS_HPP
