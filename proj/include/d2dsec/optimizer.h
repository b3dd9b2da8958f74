#pragma once

#include <string>
#include <vector>

#include "d2dsec/rate_model.h"
#include "d2dsec/subproblem.h"

namespace d2dsec {

enum class SchemeId { kProposedD2D, kNoD2D, kRandomD2D };

const char* to_string(SchemeId s);
/// Accepts "ProposedD2D", "NoD2D", "RandomD2D". Throws ConfigError otherwise.
SchemeId parse_scheme(const std::string& name);

enum class TraceStatus { kConverged, kMaxIter, kFailed };

const char* to_string(TraceStatus s);

struct StepRecord {
  int iteration = 0;
  std::string block;  // "bf" or "alpha"
  SubStatus status = SubStatus::kOptimal;
  double objective = 0.0;  // surrogate min-rate returned by the solve
  int solver_iterations = 0;
};

struct OptimizationTrace {
  // r_min[0] is the starting point, r_min[t] the iterate after iteration t.
  std::vector<double> r_min;
  std::vector<DesignVariables> iterates;  // filled when keep_iterates is set
  TraceStatus status = TraceStatus::kFailed;
  int iterations_used = 0;
  int shrinks = 0;  // start-point halvings needed for a feasible first step
  std::vector<StepRecord> steps;
};

struct OptimizerOptions {
  bool keep_iterates = false;
  int max_shrinks = 10;
  conic::SolverSettings solver;
};

struct RunResult {
  DesignVariables dv;
  OptimizationTrace trace;
  RateReport report;
};

/// Power-feasible starting point: 90% of the BS budget on matched-filter
/// precoders, the rest as isotropic noise, relays at half their budget.
DesignVariables initialize(const ChannelRealization& ch, const SystemConfig& cfg);

/// Runs the alternating optimization for one scheme. RandomD2D starts from a
/// NoD2D solution: pass it as `no_d2d`, or it is computed here. `rng` is only
/// used for the RandomD2D phases.
RunResult run(const ChannelRealization& ch, const SystemConfig& cfg,
              SchemeId scheme, Rng& rng, const OptimizerOptions& opts = {},
              const RunResult* no_d2d = nullptr);

struct FeasibilityReport {
  double bs_power_residual = 0.0;          // P_total - P_B
  std::vector<double> relay_residual;      // |alpha_n|^2 p_r - P_U
  std::vector<std::vector<double>> leakage_margin;  // beta - f_E, [k][m]

  double worst_power_residual() const;
  double worst_leakage_margin() const;
  bool ok(double power_tol, double leak_tol) const;
};

FeasibilityReport verify(const DesignVariables& dv, const ChannelRealization& ch,
                         const SystemConfig& cfg);

}  // namespace d2dsec
