#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "d2dsec/config_io.h"

namespace d2dsec {

inline constexpr const char* kCsvHeader =
    "scheme,beta,trial,seed,r_min,r_sec_min,iterations,status,wall_time_s";

struct ResultRow {
  std::string scheme;
  double beta = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double r_min = 0.0;
  double r_sec_min = 0.0;
  int iterations = 0;
  std::string status;
  double wall_time_s = 0.0;
};

struct RunOptions {
  int parallel = 1;
  // When false, wall_time_s is written as 0 so repeated runs are byte-identical.
  bool timing = true;
  OptimizerOptions optimizer;
};

/// Seed of realization `trial`; every scheme and beta share it.
std::uint64_t trial_seed(const ExperimentSpec& spec, int trial);

/// One row per (beta, trial, scheme), ordered by beta, then trial, then the
/// scheme order of the spec.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec,
                                      const RunOptions& opts = {});

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
/// Throws std::runtime_error on a malformed file.
std::vector<ResultRow> read_csv(std::istream& is);

struct SummaryRow {
  std::string scheme;
  double beta = 0.0;
  int n = 0;  // successful trials
  int failed = 0;
  double mean_r_min = 0.0;
  double stderr_r_min = 0.0;
  double mean_r_sec_min = 0.0;
  double stderr_r_sec_min = 0.0;
  double failure_rate = 0.0;
};

/// Mean and standard error (sample std / sqrt(n)) per scheme and beta over
/// rows whose status is not "failed". Groups keep first-appearance order.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

}  // namespace d2dsec
