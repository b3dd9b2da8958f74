#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "d2dsec/experiment.h"

using namespace d2dsec;

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  int parallel = 1;
  bool no_timing = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "key = value configuration file");
  cmd->add_option("--out", f.out, "output CSV (default: config 'output' or stdout)");
  cmd->add_option("--trials", f.trials, "number of channel realizations");
  cmd->add_option("--seed", f.seed, "seed of realization 0");
  cmd->add_option("--parallel", f.parallel, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--no-timing", f.no_timing, "write wall_time_s as 0");
}

ExperimentSpec load_spec(const CommonFlags& f) {
  ExperimentSpec spec = f.config.empty() ? ExperimentSpec{} : load_config(f.config);
  if (f.trials) spec.n_trials = *f.trials;
  if (f.seed) {
    spec.seed0 = *f.seed;
    spec.base.seed = *f.seed;
  }
  if (!f.out.empty()) spec.output_path = f.out;
  validate(spec);
  return spec;
}

// Writes through a file when a path is given, otherwise to stdout.
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  fn(os);
  if (!os) throw std::runtime_error("write failed: " + path);
}

int run_grid(const CommonFlags& f, bool print_tradeoff) {
  const ExperimentSpec spec = load_spec(f);
  RunOptions opts;
  opts.parallel = f.parallel;
  opts.timing = !f.no_timing;
  const auto rows = run_experiment(spec, opts);
  with_output(spec.output_path, [&](std::ostream& os) { write_csv(os, rows); });

  const auto summary = summarize(rows);
  std::ostream& log = spec.output_path.empty() ? std::cerr : std::cout;
  if (print_tradeoff) {
    log << "scheme,beta,mean_r_min,mean_r_sec_min\n";
    for (const auto& s : summary)
      log << s.scheme << ',' << s.beta << ',' << std::setprecision(6) << s.mean_r_min << ','
          << s.mean_r_sec_min << '\n';
  } else {
    write_summary_csv(log, summary);
  }
  bool any_ok = false;
  for (const auto& r : rows) any_ok = any_ok || r.status != "failed";
  if (!any_ok) {
    std::cerr << "every trial failed\n";
    return 3;
  }
  return 0;
}

int run_single(const CommonFlags& f, const std::string& dump_dir) {
  const ExperimentSpec spec = load_spec(f);
  SystemConfig cfg = spec.base;
  const std::uint64_t seed = spec.seed0;
  const ChannelRealization ch = draw_realization(cfg, seed);

  if (!dump_dir.empty()) {
    std::filesystem::create_directories(dump_dir);
    const DesignVariables dv0 = initialize(ch, cfg);
    const AuxiliaryVariables aux = update_aux(ch, dv0, cfg);
    with_output(dump_dir + "/bf_step.txt", [&](std::ostream& os) {
      conic::write_program(assemble_bf_subproblem(ch, dv0, aux, cfg), os);
    });
    with_output(dump_dir + "/alpha_step.txt", [&](std::ostream& os) {
      conic::write_program(assemble_alpha_subproblem(ch, dv0, aux, cfg), os);
    });
  }

  std::vector<std::pair<SchemeId, RunResult>> results;
  RunResult no_d2d;
  bool have_no_d2d = false;
  for (SchemeId s : spec.schemes) {
    Rng rng(seed ^ 0x5deece66dULL);
    if (s == SchemeId::kRandomD2D && !have_no_d2d) {
      no_d2d = run(ch, cfg, SchemeId::kNoD2D, rng);
      have_no_d2d = true;
    }
    RunResult r = run(ch, cfg, s, rng, {}, have_no_d2d ? &no_d2d : nullptr);
    if (s == SchemeId::kNoD2D) {
      no_d2d = r;
      have_no_d2d = true;
    }
    results.emplace_back(s, std::move(r));
  }

  with_output(spec.output_path, [&](std::ostream& os) {
    os << "scheme,iteration,r_min\n" << std::setprecision(9);
    for (const auto& [s, r] : results)
      for (std::size_t t = 0; t < r.trace.r_min.size(); ++t)
        os << to_string(s) << ',' << t << ',' << r.trace.r_min[t] << '\n';
  });
  std::ostream& log = spec.output_path.empty() ? std::cerr : std::cout;
  log << "seed " << seed << " fingerprint " << std::hex << fingerprint(ch) << std::dec << '\n';
  for (const auto& [s, r] : results) {
    const FeasibilityReport fr = verify(r.dv, ch, cfg);
    log << to_string(s) << ": " << to_string(r.trace.status) << " after "
        << r.trace.iterations_used << " iterations, R_min " << r.report.R_min
        << ", R_sec_min " << r.report.R_sec_min << ", worst power residual "
        << fr.worst_power_residual() << ", worst leakage margin "
        << fr.worst_leakage_margin() << '\n';
  }
  return 0;
}

int run_summarize(const std::string& in_path, const std::string& out_path) {
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open " + in_path);
  const auto rows = read_csv(in);
  with_output(out_path, [&](std::ostream& os) { write_summary_csv(os, summarize(rows)); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure downlink with D2D relaying: max-min rate optimizer and benchmarks"};
  app.require_subcommand(1);

  CommonFlags sweep_f, trade_f, single_f;
  auto* sweep = app.add_subcommand("sweep-beta", "R_min over the beta grid for each scheme");
  add_common(sweep, sweep_f);
  auto* trade = app.add_subcommand("tradeoff", "secrecy rate versus R_min across beta");
  add_common(trade, trade_f);
  auto* single = app.add_subcommand("single", "one realization with the full trace");
  add_common(single, single_f);
  std::string dump_dir;
  single->add_option("--dump-programs", dump_dir, "write the first conic programs here");

  auto* summ = app.add_subcommand("summarize", "mean and standard error per scheme and beta");
  std::string summ_in, summ_out;
  summ->add_option("--in,input", summ_in, "result CSV")->required();
  summ->add_option("--out", summ_out, "summary CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sweep) return run_grid(sweep_f, false);
    if (*trade) return run_grid(trade_f, true);
    if (*single) return run_single(single_f, dump_dir);
    if (*summ) return run_summarize(summ_in, summ_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
