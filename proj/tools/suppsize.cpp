// suppsize: command-line front end.
//
//   suppsize test        --n N --eps E --dist SPEC | --samples FILE
//   suppsize lower-bound --n N --eps E --dist SPEC | --samples FILE
//   suppsize params      --n N --eps E [--mode M] [--audit --ell L --r R --d D --m M]
//   suppsize verify      [--grid G] [--inject-fault]
//   suppsize simulate    --n N --eps E --dist SPEC --trials T
//   suppsize plot-data   --figure cheb|q|qstar|phi|fvalues [--d D] [--grid G]
//
// Exit codes: 0 ok, 2 input error, 3 Reject (with --exit-verdict),
// 4 parameter failure, 5 invariant failure.

#include "suppsize/suppsize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

using namespace suppsize;
using ojson = nlohmann::ordered_json;

constexpr int exit_ok = 0;
constexpr int exit_input = 2;
constexpr int exit_reject = 3;
constexpr int exit_params = 4;
constexpr int exit_invariant = 5;

struct RunConfig {
  std::string n = "0";  // string so that --n 1e90 survives for params
  double eps = 0.25;
  double sigma = 0.75;
  std::string mode = "empirical";
  std::string sampling = "poissonized";
  std::uint64_t seed = 1;
  std::int64_t trials = 200;
  unsigned threads = 1;
  std::string dist;
  std::string samples;
  std::string out;
  std::string format = "csv";
  bool exit_verdict = false;
  int grid = 1000;
  // params --audit
  bool audit = false;
  std::string ell, r, m;
  int d = 0;
  // verify
  bool inject_fault = false;
  // plot-data
  std::string figure;
  std::optional<int> plot_d;
  int plot_grid = 1001;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

BigInt parse_bigint(const std::string& s, const char* what) {
  Rational q;
  try {
    q = parse_rational(s);
  } catch (const std::invalid_argument&) {
    throw InputError(std::string(what) + ": expected an integer, got '" + s + "'");
  }
  if (denominator(q) != 1) throw InputError(std::string(what) + ": expected an integer, got '" + s + "'");
  return numerator(q);
}

std::int64_t parse_n(const std::string& s) {
  const BigInt n = parse_bigint(s, "--n");
  if (n < 1 || n > BigInt(std::numeric_limits<std::int64_t>::max()))
    throw InputError("--n must be a positive 64-bit integer for this subcommand");
  return n.convert_to<std::int64_t>();
}

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("--eps must lie in (0,1)");
}

TesterMode parse_mode(const std::string& s) {
  static const std::map<std::string, TesterMode> m{{"paper_IV", TesterMode::paper_IV},
                                                   {"paper_IVb", TesterMode::paper_IVb},
                                                   {"empirical", TesterMode::empirical},
                                                   {"naive", TesterMode::naive}};
  const auto it = m.find(s);
  if (it == m.end()) throw InputError("--mode must be paper_IV, paper_IVb, empirical or naive");
  return it->second;
}

SamplingMode parse_sampling(const std::string& s) {
  if (s == "fixed") return SamplingMode::fixed;
  if (s == "poissonized") return SamplingMode::poissonized;
  throw InputError("--sampling must be fixed or poissonized");
}

// Key/value report. CSV: schema comment, "field,value" header, one row per
// field. JSON: one object in insertion order.
class Record {
 public:
  explicit Record(std::string schema) : schema_(std::move(schema)) { json_["schema"] = schema_; }

  void set(const std::string& key, const std::string& v) { put(key, v, v); }
  void set(const std::string& key, const char* v) { set(key, std::string(v)); }
  void set(const std::string& key, double v) { put(key, num(v), v); }
  void set(const std::string& key, std::int64_t v) { put(key, std::to_string(v), v); }
  void set(const std::string& key, std::uint64_t v) { put(key, std::to_string(v), v); }
  void set(const std::string& key, int v) { set(key, static_cast<std::int64_t>(v)); }
  void set(const std::string& key, bool v) { put(key, v ? "true" : "false", v); }

  // Nested table: a JSON array of row objects; in CSV a second section.
  void table(const std::string& key, std::vector<std::string> columns, std::vector<std::vector<std::string>> rows,
             std::vector<std::vector<ojson>> json_rows) {
    ojson arr = ojson::array();
    for (const auto& r : json_rows) {
      ojson o;
      for (std::size_t c = 0; c < columns.size(); ++c) o[columns[c]] = r[c];
      arr.push_back(std::move(o));
    }
    json_[key] = std::move(arr);
    tables_.push_back({key, std::move(columns), std::move(rows)});
  }

  void write(std::ostream& out, const std::string& format) const {
    if (format == "json") {
      out << json_.dump(2) << '\n';
      return;
    }
    out << "# " << schema_ << '\n' << "field,value\n";
    for (const auto& [k, v] : csv_) out << k << ',' << quote(v) << '\n';
    for (const auto& t : tables_) {
      out << "# table " << t.name << '\n';
      for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
      out << '\n';
      for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << quote(row[c]);
        out << '\n';
      }
    }
  }

 private:
  struct Section {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
  };

  static std::string quote(const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string q = "\"";
    for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }

  template <class J>
  void put(const std::string& key, std::string text, J&& j) {
    csv_.emplace_back(key, std::move(text));
    json_[key] = std::forward<J>(j);
  }

  std::string schema_;
  std::vector<std::pair<std::string, std::string>> csv_;
  std::vector<Section> tables_;
  ojson json_;
};

void emit(const RunConfig& cfg, const std::function<void(std::ostream&)>& body) {
  if (cfg.out.empty()) {
    body(std::cout);
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw InputError("cannot write '" + cfg.out + "'");
  body(f);
}

void add_params(Record& rec, const ParamSet& p) {
  rec.set("ell", to_string(p.ell));
  rec.set("r", to_string(p.r));
  rec.set("d", p.d);
  rec.set("m", p.m.str());
  rec.set("param_mode", to_string(p.mode));
}

// Sampler over --dist or --samples.
std::unique_ptr<Sampler> make_sampler(const RunConfig& cfg) {
  if (cfg.dist.empty() == cfg.samples.empty()) throw InputError("give exactly one of --dist and --samples");
  if (!cfg.dist.empty())
    return std::make_unique<DistributionSampler>(std::make_shared<const SparseDistribution>(make_distribution(cfg.dist)),
                                                 cfg.seed);
  std::string path = cfg.samples;
  if (!path.empty() && path.front() == '@') path.erase(0, 1);
  std::istringstream in(read_file(path));
  return std::make_unique<RecordedSampler>(read_ids(in), cfg.seed);
}

int cmd_test(const RunConfig& cfg) {
  const auto n = parse_n(cfg.n);
  check_eps(cfg.eps);
  if (!(cfg.sigma > 0.5 && cfg.sigma < 1.0)) throw InputError("--sigma must lie in (1/2, 1)");
  const KernelProvider provider(parse_mode(cfg.mode));
  const auto sampling = parse_sampling(cfg.sampling);
  auto sampler = make_sampler(cfg);

  // One run meets sigma = 3/4; a larger sigma takes the majority of
  // repetitions_for(1 - sigma) runs.
  const int reps = cfg.sigma > 0.75 ? repetitions_for(1.0 - cfg.sigma) : 1;
  std::vector<TestVerdict> runs;
  try {
    for (int i = 0; i < reps; ++i) runs.push_back(support_size_tester(n, cfg.eps, *sampler, provider, sampling));
  } catch (const std::out_of_range& e) {
    throw InputError(std::string("--samples: ") + e.what());
  }
  int accepts = 0;
  for (const auto& v : runs) accepts += v.decision == Decision::Accept;
  const Decision decision = 2 * accepts > reps ? Decision::Accept : Decision::Reject;

  const auto& v = runs.front();
  Record rec("suppsize-test/1");
  rec.set("verdict", to_string(decision));
  rec.set("statistic", v.statistic_value);
  rec.set("threshold", v.threshold);
  rec.set("samples_drawn", sampler->samples_drawn());
  rec.set("path", v.path);
  rec.set("provenance", v.note);
  rec.set("mode", cfg.mode);
  rec.set("sampling", cfg.sampling);
  rec.set("sigma", cfg.sigma);
  rec.set("repetitions", reps);
  rec.set("accepting_runs", accepts);
  rec.set("seed", cfg.seed);
  if (const auto choice = provider.select(n, cfg.eps); choice.kernel) add_params(rec, choice.kernel->params());
  emit(cfg, [&](std::ostream& out) { rec.write(out, cfg.format); });
  return cfg.exit_verdict && decision == Decision::Reject ? exit_reject : exit_ok;
}

int cmd_lower_bound(const RunConfig& cfg) {
  const auto n = parse_n(cfg.n);
  check_eps(cfg.eps);
  const KernelProvider provider(parse_mode(cfg.mode));
  auto sampler = make_sampler(cfg);
  LowerBoundResult res;
  try {
    res = good_lower_bound(n, cfg.eps, *sampler, provider, parse_sampling(cfg.sampling));
  } catch (const std::out_of_range& e) {
    throw InputError(std::string("--samples: ") + e.what());
  }
  Record rec("suppsize-lower-bound/1");
  rec.set("estimate", res.estimate);
  rec.set("rounds_used", res.rounds_used);
  rec.set("samples_drawn", res.samples_drawn);
  rec.set("mode", cfg.mode);
  rec.set("seed", cfg.seed);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::vector<ojson>> jrows;
  for (const auto& r : res.per_round) {
    rows.push_back({std::to_string(r.index), num(r.n_i), num(r.delta_i), std::to_string(r.repetitions), r.path,
                    num(r.statistic), r.terminated ? "true" : "false"});
    jrows.push_back({r.index, r.n_i, r.delta_i, r.repetitions, r.path, r.statistic, r.terminated});
  }
  rec.table("rounds", {"round", "n_i", "delta_i", "repetitions", "path", "statistic", "terminated"}, rows, jrows);
  emit(cfg, [&](std::ostream& out) { rec.write(out, cfg.format); });
  return exit_ok;
}

void add_report(Record& rec, const ConstraintReport& rep) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::vector<ojson>> jrows;
  for (const auto& c : rep.records) {
    rows.push_back({to_string(c.id), c.satisfied ? "true" : "false", num(c.slack)});
    jrows.push_back({to_string(c.id), c.satisfied, c.slack});
  }
  rec.set("variant", to_string(rep.variant));
  rec.set("constraint_I", rep.constraint_I());
  rec.set("all_satisfied", rep.all_satisfied());
  rec.table("constraints", {"constraint", "satisfied", "slack"}, rows, jrows);
}

int cmd_params(const RunConfig& cfg) {
  check_eps(cfg.eps);
  const auto mode = parse_mode(cfg.mode);
  if (mode == TesterMode::naive) throw InputError("params: naive mode has no parameters");
  const auto variant = mode == TesterMode::paper_IV ? Variant::IV : Variant::IVb;
  Record rec("suppsize-params/1");
  rec.set("n", cfg.n);
  rec.set("eps", cfg.eps);
  rec.set("mode", cfg.mode);

  if (cfg.audit) {
    if (cfg.ell.empty() || cfg.r.empty() || cfg.m.empty() || cfg.d < 1)
      throw InputError("--audit needs --ell, --r, --d and --m");
    ParamSet p;
    p.mode = mode == TesterMode::paper_IV    ? ParamMode::paper_IV
             : mode == TesterMode::paper_IVb ? ParamMode::paper_IVb
                                             : ParamMode::empirical;
    try {
      p.ell = parse_rational(cfg.ell);
      p.r = parse_rational(cfg.r);
    } catch (const std::invalid_argument& e) {
      throw InputError(std::string("--ell/--r: ") + e.what());
    }
    p.d = cfg.d;
    p.m = parse_bigint(cfg.m, "--m");
    const BigInt n = parse_bigint(cfg.n, "--n");
    add_params(rec, p);
    rec.set("audit", true);
    add_report(rec, check_constraints(n, cfg.eps, p, variant));
    emit(cfg, [&](std::ostream& out) { rec.write(out, cfg.format); });
    return exit_ok;
  }

  if (mode == TesterMode::empirical) {
    const auto n = parse_n(cfg.n);
    std::optional<EmpiricalParams> found;
    try {
      found = try_empirical_params(n, cfg.eps);
    } catch (const std::invalid_argument& e) {
      throw ParameterError(e.what());
    }
    if (!found) throw ParameterError("empirical parameter search found no passing candidate");
    const auto& c = found->checks;
    add_params(rec, found->params);
    rec.set("check.delta", c.delta);
    rec.set("check.delta_limit", c.delta_limit);
    rec.set("check.right_tail_ratio", c.right_tail_ratio);
    rec.set("check.variance_envelope", c.variance_envelope);
    rec.set("check.variance_budget", c.variance_budget);
    rec.set("check.variance_proxy", c.variance_proxy);
    rec.set("check.phi_min", c.phi.min_value);
    rec.set("check.phi_target", c.phi.target);
    rec.set("check.m", c.m.str());
    rec.set("check.naive_budget", c.naive_budget.str());
    rec.set("check.candidates_tried", c.candidates_tried);
    add_report(rec, check_constraints(BigInt(n), cfg.eps, found->params, Variant::IVb));
  } else {
    const BigInt n = parse_bigint(cfg.n, "--n");
    const auto p = paper_params(n, cfg.eps, variant);
    add_params(rec, p);
    add_report(rec, check_constraints(n, cfg.eps, p, variant));
  }
  emit(cfg, [&](std::ostream& out) { rec.write(out, cfg.format); });
  return exit_ok;
}

int cmd_verify(const RunConfig& cfg) {
  if (cfg.grid < 10) throw InputError("--grid must be at least 10");
  std::vector<InvariantResult> all = chebyshev_invariants(cfg.grid);
  for (const auto& spec : verification_kernels()) {
    auto k = build_kernel(spec.n, spec.eps, spec.params);
    if (cfg.inject_fault) k = k.with_scaled_delta(2);
    const auto rs = kernel_invariants(k, spec.name, cfg.grid, std::max(cfg.grid, 10000));
    all.insert(all.end(), rs.begin(), rs.end());
  }
  bool ok = true;
  Record rec("suppsize-verify/1");
  std::vector<std::vector<std::string>> rows;
  std::vector<std::vector<ojson>> jrows;
  for (const auto& r : all) {
    ok = ok && r.passed;
    rows.push_back({r.passed ? "PASS" : "FAIL", r.check, r.subject, r.witness, r.detail});
    jrows.push_back({r.passed ? "PASS" : "FAIL", r.check, r.subject, r.witness, r.detail});
  }
  rec.set("grid", cfg.grid);
  rec.set("inject_fault", cfg.inject_fault);
  rec.set("all_passed", ok);
  rec.table("checks", {"status", "check", "subject", "witness", "detail"}, rows, jrows);
  emit(cfg, [&](std::ostream& out) { rec.write(out, cfg.format); });
  return ok ? exit_ok : exit_invariant;
}

int cmd_simulate(const RunConfig& cfg) {
  check_eps(cfg.eps);
  if (cfg.trials < 1) throw InputError("--trials must be >= 1");
  if (cfg.dist.empty()) throw InputError("simulate needs --dist");
  TesterConfig tc;
  tc.n = parse_n(cfg.n);
  tc.eps = cfg.eps;
  tc.mode = parse_mode(cfg.mode);
  tc.sampling = parse_sampling(cfg.sampling);
  const auto dist = make_distribution(cfg.dist);
  const auto rep = monte_carlo(tc, dist, cfg.trials, cfg.seed, cfg.threads);
  Record rec("suppsize-simulate/1");
  rec.set("trials", rep.trials);
  rec.set("accept_count", rep.accept_count);
  rec.set("accept_rate", rep.accept_rate());
  rec.set("mean_stat", rep.mean_stat);
  rec.set("var_stat", rep.var_stat);
  rec.set("analytic_mean", rep.analytic_mean);
  rec.set("analytic_var_bound", rep.analytic_var_bound);
  rec.set("exact_var", rep.exact_var);
  rec.set("mean_samples", rep.mean_samples);
  rec.set("max_samples", rep.max_samples);
  rec.set("path", rep.path);
  rec.set("master_seed", rep.master_seed);
  rec.set("seed_rule", rep.seed_rule);
  rec.set("eff_support", eff_support(dist, cfg.eps));
  rec.set("tv_to_class", to_double(tv_distance_to_supportsize(dist, tc.n)));
  emit(cfg, [&](std::ostream& out) { rec.write(out, cfg.format); });
  return exit_ok;
}

int cmd_plot_data(const RunConfig& cfg) {
  PlotOptions o;
  o.d = cfg.plot_d;
  o.grid = cfg.plot_grid;
  if (o.d && *o.d < 1) throw InputError("--d must be >= 1");
  Table t;
  try {
    t = plot_data(cfg.figure, o);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  emit(cfg, [&](std::ostream& out) {
    if (cfg.format == "json") out << table_json(t).dump() << '\n';
    else write_csv(out, t);
  });
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Support-size testing with Chebyshev-polynomial estimators"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto io = [&](CLI::App* s) {
    s->add_option("--out", cfg.out, "output path (default stdout)");
    s->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  auto problem = [&](CLI::App* s) {
    s->add_option("--n", cfg.n, "support-size bound")->required();
    s->add_option("--eps", cfg.eps, "distance parameter in (0,1)")->required();
    s->add_option("--mode", cfg.mode, "paper_IV, paper_IVb, empirical or naive");
    s->add_option("--seed", cfg.seed, "master seed");
  };
  auto source = [&](CLI::App* s) {
    s->add_option("--dist", cfg.dist, "family:params or @file");
    s->add_option("--samples", cfg.samples, "file of raw sample ids, one per line");
    s->add_option("--sampling", cfg.sampling, "fixed or poissonized");
  };

  auto* test = app.add_subcommand("test", "test support size <= n against eps-far");
  problem(test);
  source(test);
  io(test);
  test->add_option("--sigma", cfg.sigma, "success probability; above 3/4 uses a majority vote");
  test->add_flag("--exit-verdict", cfg.exit_verdict, "exit 3 on Reject");

  auto* lb = app.add_subcommand("lower-bound", "lower bound on the effective support size");
  problem(lb);
  source(lb);
  io(lb);

  auto* params = app.add_subcommand("params", "parameters and constraint report");
  problem(params);
  io(params);
  params->add_flag("--audit", cfg.audit, "check explicit --ell --r --d --m instead");
  params->add_option("--ell", cfg.ell);
  params->add_option("--r", cfg.r);
  params->add_option("--d", cfg.d);
  params->add_option("--m", cfg.m);

  auto* verify = app.add_subcommand("verify", "run the invariant suites");
  io(verify);
  verify->add_option("--grid", cfg.grid, "points per grid");
  verify->add_flag("--inject-fault", cfg.inject_fault, "double delta in every kernel");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo study of the tester");
  problem(sim);
  io(sim);
  sim->add_option("--dist", cfg.dist, "family:params or @file")->required();
  sim->add_option("--sampling", cfg.sampling, "fixed or poissonized");
  sim->add_option("--trials", cfg.trials, "number of trials");
  sim->add_option("--threads", cfg.threads, "worker threads");

  auto* plot = app.add_subcommand("plot-data", "data series for the figures");
  io(plot);
  plot->add_option("--figure", cfg.figure, "cheb, q, qstar, phi or fvalues")->required();
  plot->add_option("--d", cfg.plot_d, "polynomial degree");
  plot->add_option("--grid", cfg.plot_grid, "points per grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_input;
  }

  try {
    if (*test) return cmd_test(cfg);
    if (*lb) return cmd_lower_bound(cfg);
    if (*params) return cmd_params(cfg);
    if (*verify) return cmd_verify(cfg);
    if (*sim) return cmd_simulate(cfg);
    if (*plot) return cmd_plot_data(cfg);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_input;
  } catch (const ParameterError& e) {
    std::cerr << "parameter failure: " << e.what() << '\n';
    return exit_params;
  } catch (const KernelBuildError& e) {
    std::cerr << "parameter failure: " << e.what() << '\n';
    return exit_params;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_input;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_input;
  }
  return exit_ok;
}
