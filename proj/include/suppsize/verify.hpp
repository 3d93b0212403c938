#ifndef SUPPSIZE_VERIFY_HPP
#define SUPPSIZE_VERIFY_HPP

// Invariant suites behind `suppsize verify`: grid and exact checks on the
// Chebyshev machinery and on every kernel of a named kernel set.

#include "suppsize/chebyshev.hpp"
#include "suppsize/estimator.hpp"
#include "suppsize/params.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace suppsize {

struct InvariantResult {
  std::string check;
  std::string subject;
  bool passed = true;
  std::string witness{};  // first failing point, if any
  std::string detail{};
};

struct NamedKernelSpec {
  std::string name;
  BigInt n;
  double eps;
  ParamSet params;
};

namespace detail {

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Parameters on the Constraint I and IVb boundary: l a relative 1e-6 below
// the IVb limit (clear of the log-space cushion),
// r = ratio * l, least d allowed by Constraint I, least m allowed by II.
inline ParamSet boundary_params(const BigInt& n, double eps, const Rational& ratio) {
  ParamSet p;
  p.mode = ParamMode::paper_IVb;
  p.ell = Rational(999999, 1000000) * C_ell_IVb * rational_from_double(eps) / n *
          rational_from_double(-std::log2(eps));
  p.r = p.ell * ratio;
  const double need = C_d * std::sqrt((to_double(ratio) - 1.0) / 2.0) * (std::log2(20.0) - std::log2(eps));
  p.d = static_cast<int>(std::ceil(need * (1.0 + 1e-12)));
  p.m = ceil(Rational(11 * p.d, 2) / (p.r - p.ell));
  return p;
}

}  // namespace detail

// Kernels shipped with `verify`. Two desk-scale empirical kernels, a
// degree-11 kernel in the style of the first figure, kernels sitting on the
// Constraint I/IVb boundary, and the asymptotic choice at n = 10^90.
inline std::vector<NamedKernelSpec> verification_kernels() {
  std::vector<NamedKernelSpec> out;
  out.push_back({"empirical n=100 eps=0.25", 100, 0.25, empirical_params(100, 0.25).params});
  out.push_back({"empirical n=1000 eps=0.1", 1000, 0.1, empirical_params(1000, 0.1).params});
  {
    ParamSet p{Rational(1, 1000), Rational(1, 100), 11, 0, ParamMode::empirical};
    p.m = ceil(Rational(11 * p.d, 2) / (p.r - p.ell));
    out.push_back({"degree 11 n=1000 eps=0.25", 1000, 0.25, p});
  }
  out.push_back({"boundary n=100 eps=0.25 r=3l", 100, 0.25, detail::boundary_params(100, 0.25, 3)});
  out.push_back({"boundary n=1000 eps=0.125 r=4l", 1000, 0.125, detail::boundary_params(1000, 0.125, 4)});
  out.push_back({"boundary n=100 eps=0.25 r=20l", 100, 0.25, detail::boundary_params(100, 0.25, 20)});
  const BigInt big = pow10(90);
  out.push_back({"paper_IV n=1e90 eps=0.25", big, 0.25, paper_params(big, 0.25, Variant::IV)});
  out.push_back({"paper_IVb n=1e90 eps=0.25", big, 0.25, paper_params(big, 0.25, Variant::IVb)});
  return out;
}

// The r = 20 l boundary kernel at n = 100, eps = 1/4 with d cut from 55 to
// 3. Its Phi falls below 1 + 3 eps/4 near 0, so the grid check must fail.
inline NamedKernelSpec undersized_degree_kernel() {
  auto p = detail::boundary_params(100, 0.25, 20);
  p.d = 3;
  p.m = ceil(Rational(11 * p.d, 2) / (p.r - p.ell));
  return {"undersized d=3 n=100 eps=0.25 r=20l", 100, 0.25, p};
}

inline std::vector<InvariantResult> chebyshev_invariants(int grid = 1000, int max_degree = 60) {
  using namespace chebyshev;
  std::vector<InvariantResult> out;
  const std::string subject = "T_d, d<=" + std::to_string(max_degree);

  InvariantResult coeff{"coefficients.formula=recurrence", subject};
  InvariantResult bound{"coefficients.|b_j|<=d*3^d", subject};
  for (int d = 1; d <= max_degree && (coeff.passed || bound.passed); ++d) {
    const auto rec = coefficients_recurrence(d);
    if (coeff.passed && !(coefficients_formula(d) == rec)) {
      coeff.passed = false;
      coeff.witness = "d=" + std::to_string(d);
    }
    const BigInt cap = d * boost::multiprecision::pow(BigInt(3), static_cast<unsigned>(d));
    for (int j = 0; j <= d && bound.passed; ++j)
      if (abs(rec.coefficients[j]) > cap) {
        bound.passed = false;
        bound.witness = "d=" + std::to_string(d) + " j=" + std::to_string(j);
      }
  }
  out.push_back(coeff);
  out.push_back(bound);

  InvariantResult inside{"|T_d|<=1 on [-1,1]", subject};
  for (int d = 0; d <= max_degree && inside.passed; ++d)
    for (int i = 0; i < grid; ++i) {
      const double x = -1.0 + 2.0 * i / (grid - 1);
      if (!(std::fabs(eval_recurrence(d, x)) <= 1.0 + 1e-9)) {
        inside.passed = false;
        inside.witness = "d=" + std::to_string(d) + " x=" + suppsize::detail::fmt(x);
        break;
      }
    }
  out.push_back(inside);

  InvariantResult growth{"T_d(1+g)>=2^(c d sqrt(g)-1)", subject};
  InvariantResult deriv{"T_d'(1+g)>=d/sqrt(3g)(T_d(1+g)-1)", subject};
  const int gpts = 200;
  for (int d = 1; d <= max_degree; ++d)
    for (int i = 0; i < gpts; ++i) {
      const double y = 1.0 + std::pow(10.0, -6.0 + 6.0 * i / (gpts - 1));
      const double g = y - 1.0;  // exact
      const double log_t = log_t_shifted(d, g);
      if (growth.passed && !(log_t >= std::log(growth_lower_bound(d, g)) - 1e-9)) {
        growth.passed = false;
        growth.witness = "d=" + std::to_string(d) + " gamma=" + suppsize::detail::fmt(g);
      }
      const double lhs = derivative_at(d, y);
      const double rhs = d / std::sqrt(3.0 * g) * std::expm1(log_t);
      if (deriv.passed && !(lhs >= rhs * (1.0 - 1e-9))) {
        deriv.passed = false;
        deriv.witness = "d=" + std::to_string(d) + " gamma=" + suppsize::detail::fmt(g);
      }
    }
  out.push_back(growth);
  out.push_back(deriv);

  InvariantResult closed{"closed form = exact recurrence (10 digits)", "T_d, d<=200"};
  for (int d = 0; d <= 200 && closed.passed; ++d)
    for (const char* ys : {"1", "1.001", "1.5", "3"}) {
      const Rational y = parse_rational(ys);
      const double exact = log_abs(eval_recurrence(d, y));
      const double approx = eval_closed_form_log(d, to_double(y)).log_magnitude;
      // Compare T values to 10 significant digits through their logs.
      if (!(std::fabs(approx - exact) <= 1e-10)) {
        closed.passed = false;
        closed.witness = "d=" + std::to_string(d) + " y=" + ys;
        break;
      }
    }
  out.push_back(closed);

  InvariantResult roots{"T_d has d sign changes in [-1,1]", "T_d, d<=30"};
  const int rgrid = 200001;
  for (int d = 1; d <= 30 && roots.passed; ++d) {
    int changes = 0;
    double prev = eval_recurrence(d, -1.0);
    for (int i = 1; i < rgrid; ++i) {
      const double v = eval_recurrence(d, -1.0 + 2.0 * i / (rgrid - 1));
      if ((v < 0) != (prev < 0)) ++changes;
      prev = v;
    }
    if (changes != d) {
      roots.passed = false;
      roots.witness = "d=" + std::to_string(d) + " changes=" + std::to_string(changes);
    }
  }
  out.push_back(roots);
  return out;
}

namespace detail {

inline InvariantResult skipped(const char* check, const std::string& subject, const char* why) {
  InvariantResult s{check, subject};
  s.detail = std::string("skipped: ") + why;
  return s;
}

}  // namespace detail

// Exact identities and grid envelopes of P_d, Q and Q* on one kernel.
// Checks whose hypotheses fail are reported as skipped (and pass).
inline std::vector<InvariantResult> envelope_invariants(const EstimatorKernel& k, const std::string& subject,
                                                        int grid = 1000) {
  std::vector<InvariantResult> out;
  const auto& iv = k.interval();
  const double ell = iv.ell_d(), r = iv.r_d();
  const double delta = k.delta_d();
  const auto report = check_constraints(k.n(), k.eps(), k.params(), Variant::IVb);
  const bool has_II = report.satisfied(ConstraintId::II);
  auto skipped = [&](const char* check, const char* why) { out.push_back(detail::skipped(check, subject, why)); };

  {
    InvariantResult c{"delta*T_d(psi(0))=1 exact", subject};
    const Rational prod = k.delta() * chebyshev::eval_recurrence(k.d(), psi(iv, Rational(0)));
    if (prod != 1) {
      c.passed = false;
      c.witness = "x=0";
      c.detail = "product " + to_string(prod);
    }
    out.push_back(c);
  }
  {
    InvariantResult c{"P_d(0)=-1", subject};
    const double p0 = p_poly_eval(k, 0.0);
    if (!(std::fabs(p0 + 1.0) <= 1e-12)) {
      c.passed = false;
      c.witness = "x=0 P=" + suppsize::detail::fmt(p0);
    }
    out.push_back(c);
  }
  {
    InvariantResult c{"sum a_k l^k - 1 = -delta exact", subject};
    Rational acc = 0, pw = 1;
    for (const auto& a : k.a_coeffs()) {
      pw *= iv.ell();
      acc += a * pw;
    }
    if (acc - 1 != -k.delta()) {
      c.passed = false;
      c.witness = "x=l";
    }
    out.push_back(c);
  }
  {
    InvariantResult c{"f(k)=a_k k!/m^k = direct formula", subject};
    const auto direct = f_values_direct(iv, k.d(), k.m(), k.delta());
    BigInt fact = 1, mp = 1;
    for (int j = 0; j <= k.d() && c.passed; ++j) {
      if (j > 0) {
        fact *= j;
        mp *= k.m();
      }
      const Rational via_a = j == 0 ? Rational(-1) : k.a_coeffs()[j - 1] * Rational(fact, mp);
      if (k.f_table()[j] != via_a || k.f_table()[j] != direct[j]) {
        c.passed = false;
        c.witness = "k=" + std::to_string(j);
      }
    }
    out.push_back(c);
  }
  {
    InvariantResult c{"|f(k)|<=bound", subject};
    for (int j = 1; j <= k.d(); ++j)
      if (!(std::fabs(k.f_double()[j]) <= f_value_bound(k, j) * (1.0 + 1e-12))) {
        c.passed = false;
        c.witness = "k=" + std::to_string(j);
        break;
      }
    out.push_back(c);
  }
  {
    InvariantResult c{"|P_d|<=delta on [l,r]", subject};
    for (int i = 0; i < grid; ++i) {
      const double x = ell + (r - ell) * i / (grid - 1);
      const double p = p_poly_eval(k, x);
      if (!(std::fabs(p) <= delta * (1.0 + 1e-9))) {
        c.passed = false;
        c.witness = "x=" + suppsize::detail::fmt(x) + " P=" + suppsize::detail::fmt(p);
        break;
      }
    }
    out.push_back(c);
  }
  if (has_II) {
    InvariantResult c{"|1-Q|<=delta on (r,1]", subject};
    for (int i = 1; i <= grid; ++i) {
      const double x = i == grid ? 1.0 : r * std::pow(1.0 / r, static_cast<double>(i) / grid);
      const double gap = one_minus_q_abs(k, x);
      if (!(gap <= delta * (1.0 + 1e-9))) {
        c.passed = false;
        c.witness = "x=" + suppsize::detail::fmt(x) + " |1-Q|=" + suppsize::detail::fmt(gap);
        break;
      }
    }
    out.push_back(c);
  } else {
    skipped("|1-Q|<=delta on (r,1]", "Constraint II fails");
  }
  {
    InvariantResult c{"P_d increasing concave on (0,l)", subject};
    std::vector<double> v(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i) v[i] = p_poly_eval(k, ell * (i + 1) / (grid + 1));
    for (int i = 1; i < grid && c.passed; ++i) {
      if (v[i] < v[i - 1] - 1e-15) {
        c.passed = false;
        c.witness = "decrease at x=" + suppsize::detail::fmt(ell * (i + 1) / (grid + 1));
      } else if (i + 1 < grid && v[i + 1] - 2 * v[i] + v[i - 1] > 1e-12) {
        c.passed = false;
        c.witness = "convex at x=" + suppsize::detail::fmt(ell * (i + 1) / (grid + 1));
      }
    }
    out.push_back(c);
  }
  {
    InvariantResult c{"(1-delta)x/l<=Q<=1 on [0,l]", subject};
    for (int i = 0; i < grid; ++i) {
      const double x = ell * i / (grid - 1);
      const double q = q_eval(k, x);
      if (!((1.0 - delta) * x / ell - 1e-12 <= q && q <= 1.0 + 1e-12)) {
        c.passed = false;
        c.witness = "x=" + suppsize::detail::fmt(x) + " Q=" + suppsize::detail::fmt(q);
        break;
      }
    }
    out.push_back(c);
  }
  if (has_II) {
    InvariantResult c{"Q*<=Q on (0,1]", subject};
    const double lo = ell * 1e-6;
    for (int i = 0; i < grid; ++i) {
      const double x = i == grid - 1 ? 1.0 : lo * std::pow(1.0 / lo, static_cast<double>(i) / (grid - 1));
      const double qs = q_star_eval(k, x), q = q_eval(k, x);
      if (!(qs <= q + 1e-12)) {
        c.passed = false;
        c.witness = "x=" + suppsize::detail::fmt(x) + " Q*=" + suppsize::detail::fmt(qs) + " Q=" + suppsize::detail::fmt(q);
        break;
      }
    }
    out.push_back(c);
  } else {
    skipped("Q*<=Q on (0,1]", "Constraint II fails");
  }

  return out;
}

// The Phi suite; it applies to kernels meeting Constraints I and IVb.
inline std::vector<InvariantResult> phi_invariants(const EstimatorKernel& k, const std::string& subject,
                                                   int grid_size = 10000) {
  std::vector<InvariantResult> out;
  const auto report = check_constraints(k.n(), k.eps(), k.params(), Variant::IVb);
  if (!(report.constraint_I() && report.satisfied(ConstraintId::IVb))) {
    out.push_back(detail::skipped("Phi suite", subject, "Constraints I and IVb do not both hold"));
    return out;
  }
  const PhiEvaluator ev(k);
  {
    InvariantResult c{"Phi(0+)>=2", subject};
    const double lim = phi_limit_at_zero(ev);
    c.passed = lim >= 2.0 - 1e-9;
    c.detail = "limit " + suppsize::detail::fmt(lim);
    if (!c.passed) c.witness = "lambda=0";
    out.push_back(c);
  }
  {
    InvariantResult c{"Phi(1)>=1+3eps/4", subject};
    const double v = phi_eval(ev, 1.0);
    c.passed = v >= ev.target();
    c.detail = "Phi(1) " + suppsize::detail::fmt(v);
    if (!c.passed) c.witness = "lambda=1";
    out.push_back(c);
  }
  {
    InvariantResult c{"Phi>=1+3eps/4 on grid", subject};
    const auto pc = phi_grid_check_detailed(ev, grid_size);
    c.passed = pc.passed;
    c.detail = "min " + suppsize::detail::fmt(pc.min_value) + " at lambda=" + suppsize::detail::fmt(pc.argmin);
    if (!c.passed) c.witness = "lambda=" + suppsize::detail::fmt(pc.argmin);
    out.push_back(c);
  }
  {
    InvariantResult c{"Phi differential inequality", subject};
    const auto dc = phi_differential_check(ev);
    c.passed = dc.passed;
    c.detail = "worst scaled margin " + suppsize::detail::fmt(dc.worst_margin);
    if (!c.passed) c.witness = "lambda=" + suppsize::detail::fmt(dc.witness);
    out.push_back(c);
  }
  return out;
}

inline std::vector<InvariantResult> kernel_invariants(const EstimatorKernel& k, const std::string& subject,
                                                      int grid = 1000, int phi_grid_size = 10000) {
  auto out = envelope_invariants(k, subject, grid);
  const auto phi = phi_invariants(k, subject, phi_grid_size);
  out.insert(out.end(), phi.begin(), phi.end());
  return out;
}

}  // namespace suppsize

#endif  // SUPPSIZE_VERIFY_HPP
