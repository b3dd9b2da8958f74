#include "d2dsec/rate_model.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "d2dsec/linalg.h"

namespace d2dsec {

DesignVariables zero_design(const SystemConfig& cfg) {
  DesignVariables dv;
  dv.v.assign(cfg.K_L, CVec::Zero(cfg.M));
  dv.Qtilde = CMat::Zero(cfg.M, cfg.M);
  dv.alpha = CVec::Zero(cfg.N);
  return dv;
}

double bs_power(const DesignVariables& dv) {
  double p = dv.Qtilde.squaredNorm();
  for (const auto& vl : dv.v) p += vl.squaredNorm();
  return p;
}

StackedMatrices build_stacked(const ChannelRealization& ch,
                              const DesignVariables& dv,
                              const SystemConfig& cfg) {
  const int K_L = ch.num_legit();
  const int K_E = ch.num_eves();
  const int N = ch.num_relays();
  const int M = static_cast<int>(ch.h.front().size());
  StackedMatrices st;
  st.Hbar.reserve(K_L);
  st.ZL.reserve(K_L);
  for (int k = 0; k < K_L; ++k) {
    CMat H = CMat::Zero(N + 1, M);
    RVec z = RVec::Zero(N + 1);
    H.row(0) = ch.h[k].adjoint();
    for (int n = 0; n < N; ++n) {
      const int j = ch.relays[n];
      if (j == k) continue;
      const cd a = ch.h_d2d(k, j) * dv.alpha(n);
      H.row(n + 1) = a * ch.h[j].adjoint();
      z(n + 1) = cfg.sigma2 * std::norm(a);
    }
    st.Hbar.push_back(std::move(H));
    st.ZL.push_back(std::move(z));
  }
  st.Gbar.reserve(K_E);
  st.ZE.reserve(K_E);
  for (int m = 0; m < K_E; ++m) {
    CMat G = CMat::Zero(N + 1, M);
    RVec z = RVec::Zero(N + 1);
    G.row(0) = ch.g[m].adjoint();
    for (int n = 0; n < N; ++n) {
      const int j = ch.relays[n];
      const cd a = ch.g_d2d(m, j) * dv.alpha(n);
      G.row(n + 1) = a * ch.h[j].adjoint();
      z(n + 1) = cfg.sigma2 * std::norm(a);
    }
    st.Gbar.push_back(std::move(G));
    st.ZE.push_back(std::move(z));
  }
  return st;
}

namespace {

CMat covariance(const CMat& S, const RVec& z, int skip,
                const DesignVariables& dv, const SystemConfig& cfg) {
  const CMat SQ = S * dv.Qtilde;
  CMat C = SQ * SQ.adjoint();
  C.diagonal().array() += cfg.sigma2;
  C.diagonal() += z.cast<cd>();
  for (int l = 0; l < static_cast<int>(dv.v.size()); ++l) {
    if (l == skip) continue;
    const CVec u = S * dv.v[l];
    C.noalias() += u * u.adjoint();
  }
  return hermitian_part(C);
}

// log2(1 + u^H C^{-1} u) with a Cholesky solve.
double rank_one_rate(const CVec& u, const CMat& C) {
  const CVec x = solve_hpd(C, u);
  const double q = std::max(0.0, u.dot(x).real());
  return std::log2(1.0 + q);
}

}  // namespace

CMat legit_covariance(int k, const StackedMatrices& st,
                      const DesignVariables& dv, const SystemConfig& cfg) {
  return covariance(st.Hbar[k], st.ZL[k], k, dv, cfg);
}

CMat eve_covariance(int k, int m, const StackedMatrices& st,
                    const DesignVariables& dv, const SystemConfig& cfg) {
  return covariance(st.Gbar[m], st.ZE[m], k, dv, cfg);
}

double legit_rate(int k, const StackedMatrices& st, const DesignVariables& dv,
                  const SystemConfig& cfg) {
  return rank_one_rate(st.Hbar[k] * dv.v[k], legit_covariance(k, st, dv, cfg));
}

double legit_rate(int k, const ChannelRealization& ch,
                  const DesignVariables& dv, const SystemConfig& cfg) {
  return legit_rate(k, build_stacked(ch, dv, cfg), dv, cfg);
}

double leakage(int k, int m, const StackedMatrices& st,
               const DesignVariables& dv, const SystemConfig& cfg) {
  return rank_one_rate(st.Gbar[m] * dv.v[k],
                       eve_covariance(k, m, st, dv, cfg));
}

double leakage(int k, int m, const ChannelRealization& ch,
               const DesignVariables& dv, const SystemConfig& cfg) {
  return leakage(k, m, build_stacked(ch, dv, cfg), dv, cfg);
}

double mi_oracle(const CVec& U, const CMat& C) {
  const CMat C_plus = C + U * U.adjoint();
  return log2det_hpd(C_plus) - log2det_hpd(C);
}

double relay_rx_power(int n, const ChannelRealization& ch,
                      const DesignVariables& dv, const SystemConfig& cfg) {
  const CVec& h = ch.h[ch.relays[n]];
  double p = cfg.sigma2;
  for (const auto& vl : dv.v) p += std::norm(h.dot(vl));
  p += (dv.Qtilde.adjoint() * h).squaredNorm();
  return p;
}

RateReport report(const ChannelRealization& ch, const DesignVariables& dv,
                  const SystemConfig& cfg) {
  const int K_L = ch.num_legit();
  const int K_E = ch.num_eves();
  const StackedMatrices st = build_stacked(ch, dv, cfg);
  RateReport rep;
  rep.R.resize(K_L);
  rep.R_sec.resize(K_L);
  rep.leak.assign(K_L, std::vector<double>(K_E, 0.0));
  rep.R_min = std::numeric_limits<double>::infinity();
  rep.R_sec_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K_L; ++k) {
    rep.R[k] = legit_rate(k, st, dv, cfg);
    rep.R_sec[k] = std::max(rep.R[k] - cfg.beta, 0.0);
    rep.R_min = std::min(rep.R_min, rep.R[k]);
    rep.R_sec_min = std::min(rep.R_sec_min, rep.R_sec[k]);
    for (int m = 0; m < K_E; ++m) rep.leak[k][m] = leakage(k, m, st, dv, cfg);
  }
  return rep;
}

}  // namespace d2dsec
