#pragma once

#include <vector>

#include "d2dsec/channel_model.h"
#include "d2dsec/types.h"

namespace d2dsec {

/// Precoders, artificial-noise factor and relay amplification gains.
struct DesignVariables {
  std::vector<CVec> v;  // one M-vector per legitimate user
  CMat Qtilde;          // M x M, artificial-noise covariance is Qtilde Qtilde^H
  CVec alpha;           // one gain per D2D channel

  CMat Q() const { return Qtilde * Qtilde.adjoint(); }
};

DesignVariables zero_design(const SystemConfig& cfg);

/// sum_l ||v_l||^2 + tr(Q_B).
double bs_power(const DesignVariables& dv);

/// Stacked effective channels seen by every receiver over the downlink plus
/// all D2D channels. Row 0 is the downlink, row n (1..N) is D2D channel n.
/// Indicator-zeroed rows are kept as explicit zeros.
struct StackedMatrices {
  std::vector<CMat> Hbar;  // per legitimate user, (N+1) x M
  std::vector<CMat> Gbar;  // per eavesdropper, (N+1) x M
  std::vector<RVec> ZL;    // diagonal of Zbar_{L,k}; entry 0 is 0
  std::vector<RVec> ZE;    // diagonal of Zbar_{E,m}; entry 0 is 0
};

StackedMatrices build_stacked(const ChannelRealization& ch,
                              const DesignVariables& dv,
                              const SystemConfig& cfg);

/// C_{L,k}: interference-plus-noise covariance at user k.
CMat legit_covariance(int k, const StackedMatrices& st,
                      const DesignVariables& dv, const SystemConfig& cfg);

/// C_{E,k,m}: covariance at eavesdropper m when decoding stream k. k = -1
/// keeps every stream.
CMat eve_covariance(int k, int m, const StackedMatrices& st,
                    const DesignVariables& dv, const SystemConfig& cfg);

/// f_{L,k} in bits/s/Hz.
double legit_rate(int k, const StackedMatrices& st, const DesignVariables& dv,
                  const SystemConfig& cfg);
double legit_rate(int k, const ChannelRealization& ch,
                  const DesignVariables& dv, const SystemConfig& cfg);

/// f_{E,k,m} in bits/s/Hz.
double leakage(int k, int m, const StackedMatrices& st,
               const DesignVariables& dv, const SystemConfig& cfg);
double leakage(int k, int m, const ChannelRealization& ch,
               const DesignVariables& dv, const SystemConfig& cfg);

/// log2 det(C + U U^H) - log2 det(C). Throws std::domain_error if C is not
/// positive definite.
double mi_oracle(const CVec& U, const CMat& C);

/// Received power p_{r,j_n} at the user transmitting on D2D channel n.
double relay_rx_power(int n, const ChannelRealization& ch,
                      const DesignVariables& dv, const SystemConfig& cfg);

struct RateReport {
  std::vector<double> R;                  // per user
  double R_min = 0.0;
  std::vector<std::vector<double>> leak;  // [k][m]
  std::vector<double> R_sec;              // max(R_k - beta, 0)
  double R_sec_min = 0.0;
};

RateReport report(const ChannelRealization& ch, const DesignVariables& dv,
                  const SystemConfig& cfg);

}  // namespace d2dsec
