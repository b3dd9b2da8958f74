#pragma once

#include <vector>

#include "d2dsec/conic_program.h"
#include "d2dsec/fp_transform.h"
#include "d2dsec/socp_solver.h"

namespace d2dsec {

// Variable slices (complex entries take two reals, real part first):
//   "v"      K_L * M complex, user-major
//   "Qtilde" M * M complex, row-major
//   "alpha"  N complex
//   "t", "R" (K_L), "A" (K_E), "B" (K_E * K_L, eavesdropper-major)
// A free block is absent (size 0) when its power budget is zero.

/// Beamforming step: {v, Qtilde} free, alpha fixed at `current`.
conic::ConicProgram assemble_bf_subproblem(const ChannelRealization& ch,
                                           const DesignVariables& current,
                                           const AuxiliaryVariables& aux,
                                           const SystemConfig& cfg);

/// Amplification step: alpha free, {v, Qtilde} fixed at `current`.
conic::ConicProgram assemble_alpha_subproblem(const ChannelRealization& ch,
                                              const DesignVariables& current,
                                              const AuxiliaryVariables& aux,
                                              const SystemConfig& cfg);

enum class SubStatus { kOptimal, kInfeasible, kNumericalFailure };

const char* to_string(SubStatus s);

struct SolveResult {
  SubStatus status = SubStatus::kNumericalFailure;
  DesignVariables dv;  // free block from the solver, the rest from `current`
  double objective = 0.0;  // t, the surrogate minimum rate
  std::vector<double> R;
  std::vector<double> A;
  std::vector<std::vector<double>> B;  // [k][m]
  double max_violation = 0.0;
  int iterations = 0;
};

SolveResult solve_subproblem(const conic::ConicProgram& cp,
                             const DesignVariables& current,
                             const conic::SolverSettings& settings = {});

/// Packs the design into the variable vector of `cp` (epigraph entries left 0).
RVec embed_design(const conic::ConicProgram& cp, const DesignVariables& dv);

/// Reads the design slices of x back; slices absent from cp keep `base`.
DesignVariables extract_design(const conic::ConicProgram& cp, const RVec& x,
                               const DesignVariables& base);

/// min_k of the rate surrogate at dv for fixed auxiliaries.
double surrogate_objective(const ChannelRealization& ch,
                           const DesignVariables& dv,
                           const AuxiliaryVariables& aux,
                           const SystemConfig& cfg);

/// Whether the leakage surrogate constraints hold at dv (slack tol).
bool surrogate_leakage_ok(const ChannelRealization& ch,
                          const DesignVariables& dv,
                          const AuxiliaryVariables& aux,
                          const SystemConfig& cfg, double tol);

}  // namespace d2dsec
