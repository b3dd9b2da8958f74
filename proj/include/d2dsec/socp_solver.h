#pragma once

#include "d2dsec/conic_program.h"

namespace d2dsec::conic {

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kNumericalFailure };

const char* to_string(SolveStatus s);

struct SolverSettings {
  // Targets for the primal-dual iteration.
  double feastol = 1e-8;
  double abstol = 1e-8;
  double reltol = 1e-8;
  // A stalled iterate is still reported optimal if it meets this level.
  double accept_tol = 1e-7;
  // Dual residual allowed for such an iterate; the primal point and the gap
  // are what callers rely on, and dual accuracy is lost first near a
  // degenerate optimum.
  double dual_accept_tol = 1e-5;
  int max_iter = 100;
  int equilibration_passes = 8;
  double step_fraction = 0.99;
  bool verbose = false;
};

struct Solution {
  SolveStatus status = SolveStatus::kNumericalFailure;
  RVec x;  // primal point (empty unless optimal)
  RVec z;  // cone multipliers, stacked in constraint order (conic rows only)
  RVec y;  // equality multipliers
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
};

/// Homogeneous self-dual primal-dual interior-point method with
/// Nesterov-Todd scaling and Mehrotra correction. The normal equations are
/// solved through a dense QR of the scaled constraint matrix; intended for
/// programs with up to a few hundred variables.
Solution solve(const ConicProgram& cp, const SolverSettings& settings = {});

}  // namespace d2dsec::conic
