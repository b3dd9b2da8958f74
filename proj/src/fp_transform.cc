#include "d2dsec/fp_transform.h"

#include <cmath>

#include "d2dsec/linalg.h"

namespace d2dsec {

namespace {

double log2det_general(const CMat& A) {
  const bool hermitian = (A - A.adjoint()).norm() <= 1e-12 * (1.0 + A.norm());
  if (hermitian && Eigen::LLT<CMat>(hermitian_part(A)).info() == Eigen::Success)
    return log2det_hpd(A);
  const cd det = A.partialPivLu().determinant();
  return std::log2(std::abs(det));
}

}  // namespace

double phi(const CMat& A, const CMat& B, const CMat& C, const CMat& D) {
  const Eigen::Index P = A.rows();
  const CMat IA = CMat::Identity(P, P) + A;
  const CMat inner = 2.0 * C.adjoint() * B - B.adjoint() * D * B;
  return log2det_general(IA) - A.trace().real() / kLn2 +
         (IA * inner).trace().real() / kLn2;
}

InfoAux update_info_aux(int k, const StackedMatrices& st,
                        const DesignVariables& dv, const SystemConfig& cfg) {
  const CMat C = legit_covariance(k, st, dv, cfg);
  const CVec u = st.Hbar[k] * dv.v[k];
  InfoAux aux;
  aux.gamma = std::max(0.0, u.dot(solve_hpd(C, u).col(0)).real());
  aux.theta = solve_hpd(C + u * u.adjoint(), u).col(0);
  return aux;
}

HattedMatrices build_hatted(int k, int m, const ChannelRealization& ch,
                            const StackedMatrices& st,
                            const DesignVariables& dv, const SystemConfig& cfg) {
  const int K_L = static_cast<int>(dv.v.size());
  const int M = static_cast<int>(dv.Qtilde.rows());
  const int N = static_cast<int>(dv.alpha.size());
  const int rows = M * K_L + N + 1;
  const int cols = M + K_L + N;
  HattedMatrices hat;
  hat.Ghat = CMat::Zero(N + 1, rows);
  for (int l = 0; l < K_L; ++l) hat.Ghat.block(0, l * M, N + 1, M) = st.Gbar[m];
  hat.Ghat.block(0, M * K_L, N + 1, N + 1).setIdentity();

  hat.Vhat = CMat::Zero(rows, cols);
  hat.Vhat.block(0, 0, M, M) = dv.Qtilde;
  int r = M;
  int c = M;
  for (int l = 0; l < K_L; ++l) {
    if (l == k) continue;
    hat.Vhat.block(r, c, M, 1) = dv.v[l];
    r += M;
    ++c;
  }
  const double sigma = std::sqrt(cfg.sigma2);
  for (int n = 0; n < N; ++n) {
    hat.Vhat(M * K_L + n + 1, c + n + 1) =
        sigma * ch.g_d2d(m, ch.relays[n]) * dv.alpha(n);
  }
  const CMat W = hat.W();
  hat.Chat = W * W.adjoint();
  hat.Chat.diagonal().array() += cfg.sigma2;
  hat.Chat = hermitian_part(hat.Chat);
  return hat;
}

LeakAux update_leak_aux(const HattedMatrices& hat, const SystemConfig& cfg) {
  const CMat W = hat.W();
  LeakAux aux;
  aux.Gamma = hermitian_part(W.adjoint() * W / cfg.sigma2);
  aux.Theta = solve_hpd(hat.Chat, W);
  return aux;
}

CMat update_sigma(int m, const StackedMatrices& st, const DesignVariables& dv,
                  const SystemConfig& cfg) {
  // Every stream contributes, so the result is the same for all k.
  return eve_covariance(-1, m, st, dv, cfg);
}

AuxiliaryVariables update_aux(const ChannelRealization& ch,
                              const DesignVariables& dv,
                              const SystemConfig& cfg) {
  const int K_L = ch.num_legit();
  const int K_E = ch.num_eves();
  const StackedMatrices st = build_stacked(ch, dv, cfg);
  AuxiliaryVariables aux;
  aux.info.reserve(K_L);
  for (int k = 0; k < K_L; ++k) aux.info.push_back(update_info_aux(k, st, dv, cfg));
  aux.leak.assign(K_L, std::vector<LeakAux>(K_E));
  for (int k = 0; k < K_L; ++k)
    for (int m = 0; m < K_E; ++m)
      aux.leak[k][m] = update_leak_aux(build_hatted(k, m, ch, st, dv, cfg), cfg);
  aux.sigma.reserve(K_E);
  for (int m = 0; m < K_E; ++m) aux.sigma.push_back(update_sigma(m, st, dv, cfg));
  return aux;
}

double surrogate_rate_rhs(int k, const AuxiliaryVariables& aux,
                          const StackedMatrices& st, const DesignVariables& dv,
                          const SystemConfig& cfg) {
  const CVec u = st.Hbar[k] * dv.v[k];
  const CMat D = legit_covariance(k, st, dv, cfg) + u * u.adjoint();
  const CMat A = CMat::Constant(1, 1, cd(aux.info[k].gamma, 0.0));
  return phi(A, aux.info[k].theta, u, D);
}

LeakBounds surrogate_leak_terms(int k, int m, const AuxiliaryVariables& aux,
                                const ChannelRealization& ch,
                                const StackedMatrices& st,
                                const DesignVariables& dv,
                                const SystemConfig& cfg) {
  const CMat& Sigma = aux.sigma[m];
  const double n1 = static_cast<double>(Sigma.rows());
  const CVec u = st.Gbar[m] * dv.v[k];
  const CMat total = eve_covariance(k, m, st, dv, cfg) + u * u.adjoint();
  LeakBounds out;
  out.a_bound = log2det_hpd(Sigma) - n1 / kLn2 +
                solve_hpd(Sigma, total).trace().real() / kLn2;
  const HattedMatrices hat = build_hatted(k, m, ch, st, dv, cfg);
  const LeakAux& la = aux.leak[k][m];
  out.b_bound = phi(la.Gamma, la.Theta, hat.W(), hat.Chat) +
                n1 * std::log2(cfg.sigma2);
  return out;
}

}  // namespace d2dsec
