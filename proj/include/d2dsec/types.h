#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace d2dsec {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Thrown for invalid scenario or experiment settings.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Scenario scalars. Powers and noise are linear; the config reader converts
/// from dB.
struct SystemConfig {
  int M = 2;    // BS antennas
  int K_L = 8;  // legitimate users
  int K_E = 2;  // eavesdroppers
  int N = 1;    // D2D channels
  double P_B = 10.0;
  double P_U = 10.0;
  double sigma2 = 1.0;
  double beta = 0.5;  // leakage cap, bits/s/Hz
  double c0 = 10.0;
  double d0 = 30.0;
  double eta = 3.0;
  double area_side = 100.0;
  Point2 legit_center{0.0, 0.0};
  Point2 eve_center{100.0, 0.0};
  // Distances below this are clamped before computing path loss.
  double min_distance = 1.0;
  double delta = 1e-4;
  int t_max = 100;
  std::uint64_t seed = 1;
};

/// Throws ConfigError when the configuration is inconsistent.
void validate(const SystemConfig& cfg);

}  // namespace d2dsec
