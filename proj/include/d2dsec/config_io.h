#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "d2dsec/optimizer.h"

namespace d2dsec {

struct ExperimentSpec {
  SystemConfig base;
  std::vector<double> beta_grid{0.1, 0.3, 0.5, 0.7};
  std::vector<SchemeId> schemes{SchemeId::kProposedD2D, SchemeId::kRandomD2D,
                                SchemeId::kNoD2D};
  int n_trials = 50;
  std::uint64_t seed0 = 1;
  std::string output_path;
};

/// Reads `key = value` lines; `#` starts a comment. Keys ending in `_dB`
/// (P_B_dB, P_U_dB, sigma2_dB, c0_dB) are converted with 10^(x/10).
/// Throws ConfigError on unknown keys, malformed values or invalid results.
ExperimentSpec parse_config(std::istream& in);
ExperimentSpec load_config(const std::string& path);

/// Throws ConfigError when the spec or its base config is invalid.
void validate(const ExperimentSpec& spec);

double db_to_linear(double db);

}  // namespace d2dsec
