#pragma once

#include <vector>

#include "d2dsec/rate_model.h"

namespace d2dsec {

/// Quadratic-transform surrogate of a log-det-ratio term:
///   log2 det(I+A) - tr(A)/ln2 + Re tr((I+A)(2 C^H B - B^H D B))/ln2.
/// A is P x P, B and C are Q x P, D is Q x Q.
double phi(const CMat& A, const CMat& B, const CMat& C, const CMat& D);

struct InfoAux {
  double gamma = 0.0;
  CVec theta;  // N+1
};

struct LeakAux {
  CMat Gamma;  // (M+K_L+N) square
  CMat Theta;  // (N+1) x (M+K_L+N)
};

/// Auxiliary variables of the surrogate problem. sigma is indexed by
/// eavesdropper only: the matrix it tracks does not depend on the stream k.
struct AuxiliaryVariables {
  std::vector<InfoAux> info;               // [k]
  std::vector<std::vector<LeakAux>> leak;  // [k][m]
  std::vector<CMat> sigma;                 // [m]
};

/// Lifted eavesdropper model in which the covariance is sigma^2 I + W W^H with
/// W = Ghat * Vhat.
struct HattedMatrices {
  CMat Ghat;  // (N+1) x (M K_L + N + 1)
  CMat Vhat;  // (M K_L + N + 1) x (M + K_L + N)
  CMat Chat;  // (N+1) x (N+1)

  CMat W() const { return Ghat * Vhat; }
};

InfoAux update_info_aux(int k, const StackedMatrices& st,
                        const DesignVariables& dv, const SystemConfig& cfg);

/// Column order of Vhat: Qtilde columns, then v_l for l != k in increasing l,
/// then the N+1 columns of Ztilde. Ztilde = diag(0, sigma g_{m,j_n} alpha_n),
/// which squares to Zbar_{E,m} and stays linear in alpha.
HattedMatrices build_hatted(int k, int m, const ChannelRealization& ch,
                            const StackedMatrices& st,
                            const DesignVariables& dv, const SystemConfig& cfg);

LeakAux update_leak_aux(const HattedMatrices& hat, const SystemConfig& cfg);

/// Sigma_m = C_{E,k,m} + Gbar_m v_k v_k^H Gbar_m^H (identical for every k).
CMat update_sigma(int m, const StackedMatrices& st, const DesignVariables& dv,
                  const SystemConfig& cfg);

/// All closed-form auxiliary updates at the given point.
AuxiliaryVariables update_aux(const ChannelRealization& ch,
                              const DesignVariables& dv,
                              const SystemConfig& cfg);

/// Right-hand side of the rate surrogate for user k (a minorant of f_{L,k}).
double surrogate_rate_rhs(int k, const AuxiliaryVariables& aux,
                          const StackedMatrices& st, const DesignVariables& dv,
                          const SystemConfig& cfg);

struct LeakBounds {
  double a_bound = 0.0;  // majorant of log2 det(C_{E,k,m} + Gbar v_k v_k^H Gbar^H)
  double b_bound = 0.0;  // minorant of log2 det(C_{E,k,m})
};

LeakBounds surrogate_leak_terms(int k, int m, const AuxiliaryVariables& aux,
                                const ChannelRealization& ch,
                                const StackedMatrices& st,
                                const DesignVariables& dv,
                                const SystemConfig& cfg);

}  // namespace d2dsec
