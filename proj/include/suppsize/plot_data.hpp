#ifndef SUPPSIZE_PLOT_DATA_HPP
#define SUPPSIZE_PLOT_DATA_HPP

// Data series for the figures: T_d on [-1.01, 1.01], Q and Q* for a
// degree-11 kernel, Phi for a boundary kernel, and 1 + f(j).

#include "suppsize/chebyshev.hpp"
#include "suppsize/estimator.hpp"
#include "suppsize/params.hpp"
#include "suppsize/verify.hpp"

#include <json.hpp>

#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace suppsize {

inline constexpr const char* plot_schema = "suppsize-plot/1";

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// %.17g round-trips every double, so CSV and JSON carry identical values.
inline void write_csv(std::ostream& out, const Table& t) {
  out << "# " << plot_schema << " figure=" << t.name << '\n';
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
  out << '\n';
  char buf[40];
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

inline nlohmann::json table_json(const Table& t) {
  return {{"schema", plot_schema}, {"figure", t.name}, {"columns", t.columns}, {"rows", t.rows}};
}

inline Table table_from_json(const nlohmann::json& j) {
  return {j.at("figure").get<std::string>(), j.at("columns").get<std::vector<std::string>>(),
          j.at("rows").get<std::vector<std::vector<double>>>()};
}

inline Table table_from_csv(std::istream& in) {
  Table t;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw std::invalid_argument("csv: missing schema line");
  const auto eq = line.find("figure=");
  if (eq != std::string::npos) t.name = line.substr(eq + 7);
  if (!std::getline(in, line)) throw std::invalid_argument("csv: missing column line");
  std::istringstream hs(line);
  for (std::string col; std::getline(hs, col, ',');) t.columns.push_back(col);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream rs(line);
    for (std::string cell; std::getline(rs, cell, ',');) row.push_back(std::stod(cell));
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct PlotOptions {
  std::optional<int> d;  // default depends on the figure
  int grid = 1001;
};

namespace detail {

inline void check_grid(int grid) {
  if (grid < 2) throw std::invalid_argument("plot grid needs at least 2 points");
}

// n = 1000, eps = 1/4, l = 1/1000, r = 1/100, m from Constraint II.
inline EstimatorKernel figure_kernel(int d) {
  ParamSet p{Rational(1, 1000), Rational(1, 100), d, 0, ParamMode::empirical};
  p.m = ceil(Rational(11 * d, 2) / (p.r - p.ell));
  return build_kernel(1000, 0.25, p);
}

}  // namespace detail

inline Table plot_cheb(const PlotOptions& o) {
  detail::check_grid(o.grid);
  const int d = o.d.value_or(11);
  Table t{"cheb", {"x", "T_d"}, {}};
  for (int i = 0; i < o.grid; ++i) {
    const double x = -1.01 + 2.02 * i / (o.grid - 1);
    t.rows.push_back({x, chebyshev::eval_recurrence(d, x)});
  }
  return t;
}

inline Table plot_q(const PlotOptions& o) {
  detail::check_grid(o.grid);
  const auto k = detail::figure_kernel(o.d.value_or(11));
  Table t{"q", {"p", "Q"}, {}};
  const double hi = 1.2 * k.interval().r_d();
  for (int i = 0; i < o.grid; ++i) {
    const double x = hi * i / (o.grid - 1);
    t.rows.push_back({x, q_eval(k, x)});
  }
  return t;
}

inline Table plot_qstar(const PlotOptions& o) {
  detail::check_grid(o.grid);
  const auto k = detail::figure_kernel(o.d.value_or(11));
  const double ell = k.interval().ell_d();
  Table t{"qstar", {"p", "Q_star", "linear_bound"}, {}};
  const double hi = 2.0 * ell;
  for (int i = 0; i < o.grid; ++i) {
    const double x = hi * i / (o.grid - 1);
    t.rows.push_back({x, q_star_eval(k, x), (1.0 - k.delta_d()) * x / ell});
  }
  return t;
}

// Boundary kernel n = 100, eps = 1/4, r = 20 l. Constraint I asks for
// d = 55; a smaller --d shows the dip below the target.
inline Table plot_phi(const PlotOptions& o) {
  detail::check_grid(o.grid);
  auto p = detail::boundary_params(100, 0.25, 20);
  if (o.d) {
    p.d = *o.d;
    p.m = ceil(Rational(11 * p.d, 2) / (p.r - p.ell));
  }
  const auto k = build_kernel(100, 0.25, p);
  const PhiEvaluator ev(k);
  Table t{"phi", {"lambda", "Phi", "target"}, {}};
  t.rows.push_back({0.0, phi_limit_at_zero(ev), ev.target()});
  for (int i = 1; i < o.grid; ++i) {
    const double lam = static_cast<double>(i) / (o.grid - 1);
    t.rows.push_back({lam, phi_eval(ev, lam), ev.target()});
  }
  return t;
}

inline Table plot_fvalues(const PlotOptions& o) {
  const auto k = detail::figure_kernel(o.d.value_or(11));
  Table t{"fvalues", {"j", "one_plus_f"}, {}};
  for (int j = 0; j <= k.d(); ++j) t.rows.push_back({static_cast<double>(j), 1.0 + k.f_double()[j]});
  return t;
}

inline const std::vector<std::string>& plot_figures() {
  static const std::vector<std::string> names{"cheb", "q", "qstar", "phi", "fvalues"};
  return names;
}

inline Table plot_data(const std::string& figure, const PlotOptions& o) {
  if (figure == "cheb") return plot_cheb(o);
  if (figure == "q") return plot_q(o);
  if (figure == "qstar") return plot_qstar(o);
  if (figure == "phi") return plot_phi(o);
  if (figure == "fvalues") return plot_fvalues(o);
  throw std::invalid_argument("unknown figure '" + figure + "' (cheb, q, qstar, phi, fvalues)");
}

}  // namespace suppsize

#endif  // SUPPSIZE_PLOT_DATA_HPP
