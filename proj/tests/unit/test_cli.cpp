// Drives the built `suppsize` binary. Golden files live in tests/golden;
// run with SUPPSIZE_UPDATE_GOLDEN=1 to rewrite them after an intended change.

#include "suppsize/functions.hpp"
#include "suppsize/io.hpp"
#include "suppsize/plot_data.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Run {
  int exit_code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(SUPPSIZE_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void expect_golden(const std::string& name, const std::string& actual) {
  const std::filesystem::path path = std::filesystem::path(SUPPSIZE_GOLDEN_DIR) / name;
  if (std::getenv("SUPPSIZE_UPDATE_GOLDEN")) {
    std::ofstream(path) << actual;
    return;
  }
  ASSERT_TRUE(std::filesystem::exists(path)) << "missing golden " << path;
  EXPECT_EQ(actual, slurp(path)) << "golden " << name << " differs";
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / ("suppsize_cli_test_" + name);
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST(Cli, GoldenEmpiricalParams) {
  const auto r = run("params --n 100 --eps 0.25 --mode empirical");
  ASSERT_EQ(r.exit_code, 0);
  expect_golden("params_empirical_n100_eps0.25.csv", r.out);
}

TEST(Cli, GoldenPaperParams) {
  const auto r = run("params --n 1e90 --eps 0.25 --mode paper_IVb --format json");
  ASSERT_EQ(r.exit_code, 0);
  expect_golden("params_paper_IVb_n1e90_eps0.25.json", r.out);
}

TEST(Cli, GoldenTestVerdict) {
  const auto r = run("test --n 100 --eps 0.25 --dist uniform:100 --seed 1 --format json");
  ASSERT_EQ(r.exit_code, 0);
  expect_golden("test_uniform100_seed1.json", r.out);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["verdict"], "Accept");
  EXPECT_EQ(j["path"], "chebyshev");
}

TEST(Cli, GoldenLowerBound) {
  const auto r = run("lower-bound --n 100 --eps 0.2 --dist uniform:200 --seed 3");
  ASSERT_EQ(r.exit_code, 0);
  expect_golden("lower_bound_uniform200_seed3.csv", r.out);
}

TEST(Cli, GoldenPlotFValues) {
  const auto r = run("plot-data --figure fvalues");
  ASSERT_EQ(r.exit_code, 0);
  expect_golden("plot_fvalues.csv", r.out);
}

TEST(Cli, PlotCsvAndJsonCarryTheSameNumbers) {
  for (const char* fig : {"cheb", "q", "qstar", "phi"}) {
    const auto csv = run(std::string("plot-data --figure ") + fig + " --grid 41");
    const auto json = run(std::string("plot-data --figure ") + fig + " --grid 41 --format json");
    ASSERT_EQ(csv.exit_code, 0) << fig;
    ASSERT_EQ(json.exit_code, 0) << fig;
    std::istringstream in(csv.out);
    const auto a = suppsize::table_from_csv(in);
    const auto b = suppsize::table_from_json(nlohmann::json::parse(json.out));
    EXPECT_EQ(a.name, b.name);
    EXPECT_EQ(a.columns, b.columns);
    EXPECT_EQ(a.rows, b.rows) << fig;
    EXPECT_EQ(a.rows.size(), 41u);
  }
}

TEST(Cli, SimulateIsThreadIndependent) {
  const std::string base = "simulate --n 100 --eps 0.25 --dist two_level:60:40:1/5 --trials 40 --seed 5 --format json";
  const auto one = run(base + " --threads 1");
  const auto two = run(base + " --threads 3");
  ASSERT_EQ(one.exit_code, 0);
  EXPECT_EQ(one.out, two.out);
  const auto j = nlohmann::json::parse(one.out);
  EXPECT_EQ(j["trials"], 40);
  EXPECT_EQ(j["seed_rule"], "trial t uses derive_seed(master, {t})");
}

TEST(Cli, RecordedSamplesAndDistributionFiles) {
  std::string ids;
  for (int i = 0; i < 40; ++i) ids += std::to_string(i % 3) + "\n";
  const auto samples = temp_file("ids.txt", ids);
  const auto r = run("test --n 1 --eps 0.5 --samples " + samples.string());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("verdict,Reject"), std::string::npos) << r.out;

  const auto tsv = temp_file("dist.tsv", "# id mass\n1\t1/2\n2\t1/2\n");
  const auto ok = run("test --n 2 --eps 0.5 --dist @" + tsv.string() + " --format json");
  ASSERT_EQ(ok.exit_code, 0);
  EXPECT_EQ(nlohmann::json::parse(ok.out)["verdict"], "Accept");
}

TEST(Cli, OutWritesToFile) {
  const auto p = std::filesystem::temp_directory_path() / "suppsize_cli_test_out.csv";
  std::filesystem::remove(p);
  const auto r = run("params --n 100 --eps 0.25 --mode empirical --out " + p.string());
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(slurp(p), run("params --n 100 --eps 0.25 --mode empirical").out);
}

TEST(Cli, ExitCodes) {
  const auto bad = temp_file("bad.tsv", "1\t1/2\n2\tabc\n");
  EXPECT_EQ(run("test --n 10 --eps 0.25 --dist @" + bad.string()).exit_code, 2);
  EXPECT_EQ(run("test --n 10 --eps 0.25 --dist nosuch:3").exit_code, 2);
  EXPECT_EQ(run("test --n 10 --eps 1.5 --dist uniform:3").exit_code, 2);
  EXPECT_EQ(run("test --n 10 --eps 0.25").exit_code, 2);  // neither --dist nor --samples
  EXPECT_EQ(run("plot-data --figure nosuch").exit_code, 2);
  EXPECT_EQ(run("params --bogus").exit_code, 2);
  EXPECT_EQ(run("params --n 5 --eps 0.25 --mode empirical").exit_code, 4);
  EXPECT_EQ(run("params --n 1000 --eps 0.25 --mode paper_IV").exit_code, 4);
  EXPECT_EQ(run("test --n 100 --eps 0.25 --dist uniform:300 --exit-verdict").exit_code, 3);
  EXPECT_EQ(run("test --n 100 --eps 0.25 --dist uniform:300").exit_code, 0);
}

TEST(Cli, VerifyPassesAndCatchesInjectedFault) {
  const auto good = run("verify --grid 200");
  EXPECT_EQ(good.exit_code, 0);
  EXPECT_NE(good.out.find("all_passed,true"), std::string::npos);
  const auto bad = run("verify --grid 200 --inject-fault");
  EXPECT_EQ(bad.exit_code, 5);
}

TEST(Cli, AuditFlagsRatio) {
  const auto r = run("params --n 1000 --eps 0.25 --audit --ell 1/4000 --r 1/2000 --d 20 --m 100000");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("I.ratio,false"), std::string::npos) << r.out;
}

TEST(Io, DistributionSpecs) {
  using namespace suppsize;
  EXPECT_EQ(make_distribution("uniform:7").size(), 7u);
  EXPECT_EQ(make_distribution("point").size(), 1u);
  EXPECT_EQ(make_distribution("far_uniform:100:1/4").size(), 134u);
  const auto t = make_distribution("two_level:10:100:0.3");
  EXPECT_EQ(t.atoms()[0].mass, Rational(7, 100));
  EXPECT_EQ(t.atoms()[10].mass, Rational(3, 1000));
  EXPECT_THROW(make_distribution("uniform:x"), InputError);
  EXPECT_THROW(make_distribution("zipf:3"), InputError);
}

TEST(Io, TsvAndJsonRoundTrip) {
  using namespace suppsize;
  const auto d = make_distribution("zipf:9:1.3");
  std::ostringstream tsv;
  write_distribution_tsv(tsv, d);
  std::istringstream in(tsv.str());
  const auto back = read_distribution_tsv(in);
  const auto from_json = parse_distribution_json(distribution_json(d));
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(back.atoms()[i].id, d.atoms()[i].id);
    EXPECT_EQ(back.atoms()[i].mass, d.atoms()[i].mass);
    EXPECT_EQ(from_json.atoms()[i].mass, d.atoms()[i].mass);
  }
}

TEST(Io, MalformedInputNamesTheLine) {
  using namespace suppsize;
  std::istringstream bad("1 1/2\n2 abc\n");
  try {
    read_distribution_tsv(bad);
    FAIL() << "no error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  std::istringstream short_sum("1 1/2\n2 1/4\n");
  EXPECT_THROW(read_distribution_tsv(short_sum), InputError);
  EXPECT_THROW(parse_distribution_json("{\"id\": 1}"), InputError);
  std::istringstream ids("4\n# comment\n\n5\nx\n");
  EXPECT_THROW(read_ids(ids), InputError);
  std::istringstream labels("1 1\n2 0\n1 0\n");
  EXPECT_THROW(read_labeled_tsv(labels), InputError);
}
