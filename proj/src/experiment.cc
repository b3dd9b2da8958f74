#include "d2dsec/experiment.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace d2dsec {

std::uint64_t trial_seed(const ExperimentSpec& spec, int trial) {
  return spec.seed0 + static_cast<std::uint64_t>(trial);
}

namespace {

ResultRow make_row(SchemeId scheme, double beta, int trial, std::uint64_t seed,
                   const RunResult& r, double seconds) {
  ResultRow row;
  row.scheme = to_string(scheme);
  row.beta = beta;
  row.trial = trial;
  row.seed = seed;
  row.r_min = r.report.R_min;
  row.r_sec_min = r.report.R_sec_min;
  row.iterations = r.trace.iterations_used;
  row.status = to_string(r.trace.status);
  row.wall_time_s = seconds;
  return row;
}

// All schemes for one (beta, trial) cell, in the configured scheme order.
std::vector<ResultRow> run_cell(const ExperimentSpec& spec, double beta, int trial,
                                const RunOptions& opts) {
  using Clock = std::chrono::steady_clock;
  SystemConfig cfg = spec.base;
  cfg.beta = beta;
  const std::uint64_t seed = trial_seed(spec, trial);
  const ChannelRealization ch = draw_realization(cfg, seed);

  bool need_no_d2d = false;
  for (SchemeId s : spec.schemes)
    need_no_d2d = need_no_d2d || s == SchemeId::kNoD2D || s == SchemeId::kRandomD2D;
  RunResult no_d2d;
  double no_d2d_time = 0.0;
  if (need_no_d2d) {
    Rng unused(seed);
    const auto t0 = Clock::now();
    no_d2d = run(ch, cfg, SchemeId::kNoD2D, unused, opts.optimizer);
    no_d2d_time = std::chrono::duration<double>(Clock::now() - t0).count();
  }

  std::vector<ResultRow> rows;
  for (SchemeId s : spec.schemes) {
    if (s == SchemeId::kNoD2D) {
      rows.push_back(make_row(s, beta, trial, seed, no_d2d, opts.timing ? no_d2d_time : 0.0));
      continue;
    }
    // Phases of the random scheme depend only on the realization seed.
    Rng rng(seed ^ 0x5deece66dULL);
    const auto t0 = Clock::now();
    const RunResult r = run(ch, cfg, s, rng, opts.optimizer, &no_d2d);
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    rows.push_back(make_row(s, beta, trial, seed, r, opts.timing ? dt : 0.0));
  }
  return rows;
}

std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(9) << x;
  return os.str();
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec,
                                      const RunOptions& opts) {
  validate(spec);
  const int n_beta = static_cast<int>(spec.beta_grid.size());
  const int n_cells = n_beta * spec.n_trials;
  std::vector<std::vector<ResultRow>> cells(n_cells);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n_cells; i = next++)
      cells[i] = run_cell(spec, spec.beta_grid[i / spec.n_trials], i % spec.n_trials, opts);
  };
  const int n_workers = std::max(1, std::min(opts.parallel, n_cells));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::vector<ResultRow> rows;
  for (auto& c : cells) rows.insert(rows.end(), c.begin(), c.end());
  return rows;
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.scheme << ',' << format_double(r.beta) << ',' << r.trial << ',' << r.seed << ','
       << format_double(r.r_min) << ',' << format_double(r.r_sec_min) << ','
       << r.iterations << ',' << r.status << ',' << format_double(r.wall_time_s) << '\n';
  }
}

std::vector<ResultRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::runtime_error("unexpected CSV header: " + line);
  std::vector<ResultRow> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 9)
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected 9 fields");
    try {
      ResultRow r;
      r.scheme = f[0];
      r.beta = std::stod(f[1]);
      r.trial = std::stoi(f[2]);
      r.seed = std::stoull(f[3]);
      r.r_min = std::stod(f[4]);
      r.r_sec_min = std::stod(f[5]);
      r.iterations = std::stoi(f[6]);
      r.status = f[7];
      r.wall_time_s = std::stod(f[8]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": malformed field");
    }
  }
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  struct Acc {
    std::vector<double> r, s;
    int failed = 0;
  };
  std::vector<std::pair<std::string, double>> order;
  std::map<std::pair<std::string, double>, Acc> groups;
  for (const auto& row : rows) {
    const auto key = std::make_pair(row.scheme, row.beta);
    if (!groups.count(key)) order.push_back(key);
    Acc& a = groups[key];
    if (row.status == "failed") {
      ++a.failed;
      continue;
    }
    a.r.push_back(row.r_min);
    a.s.push_back(row.r_sec_min);
  }
  auto mean_se = [](const std::vector<double>& x, double& mean, double& se) {
    mean = se = 0.0;
    if (x.empty()) return;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    if (x.size() < 2) return;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    se = std::sqrt(ss / static_cast<double>(x.size() - 1)) /
         std::sqrt(static_cast<double>(x.size()));
  };
  std::vector<SummaryRow> out;
  for (const auto& key : order) {
    const Acc& a = groups[key];
    SummaryRow s;
    s.scheme = key.first;
    s.beta = key.second;
    s.n = static_cast<int>(a.r.size());
    s.failed = a.failed;
    mean_se(a.r, s.mean_r_min, s.stderr_r_min);
    mean_se(a.s, s.mean_r_sec_min, s.stderr_r_sec_min);
    s.failure_rate = static_cast<double>(a.failed) / static_cast<double>(s.n + a.failed);
    out.push_back(s);
  }
  return out;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "scheme,beta,n,failed,mean_r_min,stderr_r_min,mean_r_sec_min,stderr_r_sec_min,"
        "failure_rate\n";
  for (const auto& s : rows) {
    os << s.scheme << ',' << format_double(s.beta) << ',' << s.n << ',' << s.failed << ','
       << format_double(s.mean_r_min) << ',' << format_double(s.stderr_r_min) << ','
       << format_double(s.mean_r_sec_min) << ',' << format_double(s.stderr_r_sec_min) << ','
       << format_double(s.failure_rate) << '\n';
  }
}

}  // namespace d2dsec
