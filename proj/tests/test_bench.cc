#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "d2dsec/experiment.h"
#include "doctest.h"

using namespace d2dsec;
namespace fs = std::filesystem;

namespace {

ExperimentSpec tiny() {
  std::istringstream in(
      "M = 2\nK_L = 3\nK_E = 1\nN = 1\nP_B_dB = 10\nP_U_dB = 10\n"
      "beta_grid = 0.3, 0.6\nn_trials = 2\nseed0 = 5\n");
  return parse_config(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_of(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

ResultRow row(const std::string& scheme, double beta, double r, const std::string& status) {
  ResultRow x;
  x.scheme = scheme;
  x.beta = beta;
  x.r_min = r;
  x.r_sec_min = std::max(r - beta, 0.0);
  x.status = status;
  return x;
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in(
      "# scenario\nM = 3\nP_B_dB = 20   # BS power\nsigma2_dB = -10\nc0_dB = 10\n"
      "beta_grid = 0.1,0.2\nschemes = NoD2D, ProposedD2D\nlegit_center = 1, 2\n");
  const ExperimentSpec s = parse_config(in);
  CHECK(s.base.M == 3);
  CHECK(s.base.P_B == doctest::Approx(100.0));
  CHECK(s.base.sigma2 == doctest::Approx(0.1));
  CHECK(s.base.c0 == doctest::Approx(10.0));
  CHECK(s.beta_grid == std::vector<double>{0.1, 0.2});
  CHECK(s.schemes == std::vector<SchemeId>{SchemeId::kNoD2D, SchemeId::kProposedD2D});
  CHECK(s.base.legit_center.y == 2.0);

  auto bad = [](const char* text) {
    std::istringstream is(text);
    return parse_config(is);
  };
  CHECK_THROWS_AS(bad("unknown_key = 1\n"), ConfigError);
  CHECK_THROWS_AS(bad("M = two\n"), ConfigError);
  CHECK_THROWS_AS(bad("M\n"), ConfigError);
  CHECK_THROWS_AS(bad("beta_grid = 0.5, 0.1\n"), ConfigError);
  CHECK_THROWS_AS(bad("n_trials = 0\n"), ConfigError);
  CHECK_THROWS_AS(bad("schemes = Magic\n"), ConfigError);
  CHECK_THROWS_AS(bad("N = 9\nK_L = 3\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.cfg"), std::runtime_error);
}

TEST_CASE("single-row experiment") {
  ExperimentSpec s = tiny();
  s.n_trials = 1;
  s.beta_grid = {0.5};
  s.schemes = {SchemeId::kNoD2D};
  const auto rows = run_experiment(s);
  REQUIRE(rows.size() == 1);
  const std::string csv = csv_of(rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(rows[0].scheme == "NoD2D");
  CHECK(rows[0].seed == 5);
  CHECK(rows[0].r_sec_min == doctest::Approx(std::max(rows[0].r_min - 0.5, 0.0)));
}

TEST_CASE("experiments are deterministic, ordered and paired") {
  const ExperimentSpec s = tiny();
  RunOptions serial;
  serial.timing = false;
  RunOptions par = serial;
  par.parallel = 3;
  const auto a = run_experiment(s, serial);
  const auto b = run_experiment(s, serial);
  const auto c = run_experiment(s, par);
  CHECK(csv_of(a) == csv_of(b));
  CHECK(csv_of(a) == csv_of(c));
  REQUIRE(a.size() == 2 * 2 * 3);

  const char* order[] = {"ProposedD2D", "RandomD2D", "NoD2D"};
  std::set<std::uint64_t> prints[2];
  for (std::size_t i = 0; i < a.size(); ++i) {
    const ResultRow& r = a[i];
    CHECK(r.scheme == order[i % 3]);
    CHECK(r.trial == static_cast<int>(i / 3) % 2);
    CHECK(r.beta == s.beta_grid[i / 6]);
    CHECK(r.seed == trial_seed(s, r.trial));
    CHECK(r.wall_time_s == 0.0);
    SystemConfig cfg = s.base;
    cfg.beta = r.beta;
    prints[r.trial].insert(fingerprint(draw_realization(cfg, r.seed)));
  }
  // Every scheme and beta of a trial sees the same channels; trials differ.
  CHECK(prints[0].size() == 1);
  CHECK(prints[1].size() == 1);
  CHECK(*prints[0].begin() != *prints[1].begin());
}

TEST_CASE("csv round trip and malformed input") {
  std::vector<ResultRow> rows = {row("NoD2D", 0.1, 0.123456789123, "converged"),
                                 row("ProposedD2D", 0.3, 0.5, "max_iter")};
  rows[1].seed = 18446744073709551615ULL;
  rows[1].wall_time_s = 1.5;
  std::istringstream in(csv_of(rows));
  const auto back = read_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].r_min == doctest::Approx(0.123456789).epsilon(1e-12));
  CHECK(back[1].seed == rows[1].seed);
  CHECK(back[1].status == "max_iter");
  CHECK(csv_of(back) == csv_of(rows));

  auto parse = [](const std::string& text) {
    std::istringstream is(text);
    return read_csv(is);
  };
  CHECK_THROWS_AS(parse(""), std::runtime_error);
  CHECK_THROWS_AS(parse("scheme,beta\n"), std::runtime_error);
  CHECK_THROWS_AS(parse(std::string(kCsvHeader) + "\nNoD2D,0.1,0\n"), std::runtime_error);
  CHECK_THROWS_AS(parse(std::string(kCsvHeader) + "\nNoD2D,x,0,1,0,0,1,converged,0\n"),
                  std::runtime_error);
}

TEST_CASE("summarize") {
  SUBCASE("single row") {
    const auto s = summarize({row("NoD2D", 0.5, 0.7, "converged")});
    REQUIRE(s.size() == 1);
    CHECK(s[0].mean_r_min == 0.7);
    CHECK(s[0].stderr_r_min == 0.0);
    CHECK(s[0].n == 1);
  }
  SUBCASE("two rows and failures") {
    const auto s = summarize({row("NoD2D", 0.1, 0.2, "converged"),
                              row("NoD2D", 0.1, 0.4, "max_iter"),
                              row("NoD2D", 0.1, 9.0, "failed"),
                              row("ProposedD2D", 0.1, 1.0, "converged")});
    REQUIRE(s.size() == 2);
    CHECK(s[0].scheme == "NoD2D");
    CHECK(s[0].mean_r_min == doctest::Approx(0.3));
    CHECK(s[0].stderr_r_min == doctest::Approx(0.1));
    CHECK(s[0].n == 2);
    CHECK(s[0].failed == 1);
    CHECK(s[0].failure_rate == doctest::Approx(1.0 / 3.0));
    CHECK(s[0].mean_r_sec_min == doctest::Approx(0.2));
    CHECK(s[1].mean_r_min == 1.0);
  }
}

#ifdef D2DSEC_CLI
TEST_CASE("command line harness") {
  const fs::path dir = fs::temp_directory_path() / "d2dsec_cli_test";
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "M = 2\nK_L = 3\nK_E = 1\nN = 1\nbeta_grid = 0.5\nn_trials = 2\n"
           "schemes = ProposedD2D, NoD2D\n";
    std::ofstream bad(dir / "bad.cfg");
    bad << "bogus = 1\n";
  }
  const std::string cli = D2DSEC_CLI;
  auto sh = [&](const std::string& args) {
    const int rc = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
  };
  const std::string cfg = (dir / "run.cfg").string();
  CHECK(sh("sweep-beta --config " + cfg + " --no-timing --out " + (dir / "a.csv").string()) == 0);
  CHECK(sh("sweep-beta --config " + cfg + " --no-timing --parallel 2 --out " +
           (dir / "b.csv").string()) == 0);
  const std::string a = slurp(dir / "a.csv");
  CHECK(a == slurp(dir / "b.csv"));
  CHECK(std::count(a.begin(), a.end(), '\n') == 5);

  CHECK(sh("summarize " + (dir / "a.csv").string() + " --out " + (dir / "s.csv").string()) == 0);
  CHECK(slurp(dir / "s.csv").rfind("scheme,beta,n,failed,mean_r_min", 0) == 0);
  CHECK(sh("single --config " + cfg + " --out " + (dir / "t.csv").string() +
           " --dump-programs " + (dir / "dump").string()) == 0);
  CHECK(fs::exists(dir / "dump" / "bf_step.txt"));
  CHECK(fs::exists(dir / "dump" / "alpha_step.txt"));

  CHECK(sh("sweep-beta --config " + (dir / "bad.cfg").string()) == 2);
  CHECK(sh("summarize " + (dir / "missing.csv").string()) != 0);
  fs::remove_all(dir);
}
#endif
