#include "d2dsec/subproblem.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "d2dsec/linalg.h"

namespace d2dsec {

using conic::CLin;
using conic::ConicProgram;
using conic::LinExpr;
using conic::ProgramBuilder;
using CLinVec = std::vector<CLin>;

const char* to_string(SubStatus s) {
  switch (s) {
    case SubStatus::kOptimal:
      return "optimal";
    case SubStatus::kInfeasible:
      return "infeasible";
    case SubStatus::kNumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

namespace {

enum class Free { kBeamforming, kAlpha };

// The design with each entry either a variable or a constant.
struct Symbolic {
  std::vector<CLinVec> v;      // [l][i]
  std::vector<CLinVec> qcols;  // columns of Qtilde
  CLinVec alpha;
};

CLin dot(const CVec& a, const CLinVec& x) {
  CLin acc;
  for (Eigen::Index i = 0; i < a.size(); ++i) acc += std::conj(a(i)) * x[i];
  return acc;
}

CLinVec mat_times(const CMat& F, const CLinVec& x) {
  CLinVec out(F.rows());
  for (Eigen::Index r = 0; r < F.rows(); ++r)
    for (Eigen::Index c = 0; c < F.cols(); ++c)
      if (F(r, c) != cd(0.0, 0.0)) out[r] += F(r, c) * x[c];
  return out;
}

void append(CLinVec& dst, const CLinVec& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

CLinVec scaled(double s, CLinVec x) {
  for (auto& e : x) e *= cd(s, 0.0);
  return x;
}

Symbolic make_symbolic(ProgramBuilder& b, const DesignVariables& dv, Free free,
                       const SystemConfig& cfg) {
  const int M = cfg.M;
  const int K_L = cfg.K_L;
  const int N = static_cast<int>(dv.alpha.size());
  const bool bf_free = free == Free::kBeamforming && cfg.P_B > 0.0;
  const bool alpha_free = free == Free::kAlpha && cfg.P_U > 0.0;
  const int v0 = b.add_variables("v", bf_free ? 2 * M * K_L : 0);
  const int q0 = b.add_variables("Qtilde", bf_free ? 2 * M * M : 0);
  const int a0 = b.add_variables("alpha", alpha_free ? 2 * N : 0);

  Symbolic s;
  s.v.assign(K_L, CLinVec(M));
  for (int l = 0; l < K_L; ++l)
    for (int i = 0; i < M; ++i)
      s.v[l][i] = bf_free ? CLin::variable(v0 + 2 * (l * M + i)) : CLin(dv.v[l](i));
  s.qcols.assign(M, CLinVec(M));
  for (int c = 0; c < M; ++c)
    for (int r = 0; r < M; ++r)
      s.qcols[c][r] =
          bf_free ? CLin::variable(q0 + 2 * (r * M + c)) : CLin(dv.Qtilde(r, c));
  s.alpha.resize(N);
  for (int n = 0; n < N; ++n)
    s.alpha[n] = alpha_free ? CLin::variable(a0 + 2 * n) : CLin(dv.alpha(n));
  return s;
}

// Hbar_k x (legit) or Gbar_m x (eavesdropper) for a symbolic M-vector x.
CLinVec stacked_times(const ChannelRealization& ch, const Symbolic& s, int idx,
                      bool eve, const CLinVec& x) {
  const int N = ch.num_relays();
  CLinVec out(N + 1);
  out[0] = dot(eve ? ch.g[idx] : ch.h[idx], x);
  for (int n = 0; n < N; ++n) {
    const int j = ch.relays[n];
    if (!eve && j == idx) continue;
    const cd gain = eve ? ch.g_d2d(idx, j) : ch.h_d2d(idx, j);
    out[n + 1] = conic::product(gain * s.alpha[n], dot(ch.h[j], x));
  }
  return out;
}

// Square roots of the Zbar diagonal: sigma * gain * alpha_n (entry 0 is 0).
CLinVec zbar_root(const ChannelRealization& ch, const Symbolic& s, int idx,
                  bool eve, double sigma) {
  const int N = ch.num_relays();
  CLinVec out(N + 1);
  for (int n = 0; n < N; ++n) {
    const int j = ch.relays[n];
    if (!eve && j == idx) continue;
    const cd gain = eve ? ch.g_d2d(idx, j) : ch.h_d2d(idx, j);
    out[n + 1] = (sigma * gain) * s.alpha[n];
  }
  return out;
}

ConicProgram assemble(const ChannelRealization& ch, const DesignVariables& dv,
                      const AuxiliaryVariables& aux, const SystemConfig& cfg,
                      Free free) {
  const int M = cfg.M;
  const int K_L = ch.num_legit();
  const int K_E = ch.num_eves();
  const int N = ch.num_relays();
  const double sigma = std::sqrt(cfg.sigma2);
  const double n1 = N + 1;

  ProgramBuilder b;
  const Symbolic s = make_symbolic(b, dv, free, cfg);
  const int t = b.add_variables("t", 1);
  const int R0 = b.add_variables("R", K_L);
  const int A0 = b.add_variables("A", K_E);
  const int B0 = b.add_variables("B", K_E * K_L);
  auto B_index = [&](int k, int m) { return B0 + m * K_L + k; };

  // Rate surrogates.
  for (int k = 0; k < K_L; ++k) {
    const double gamma = aux.info[k].gamma;
    const CVec& theta = aux.info[k].theta;
    const double w = (1.0 + gamma) / kLn2;
    const double rw = std::sqrt(w);
    // Completed square: 2Re(a) - |a|^2 = 1 - |1 - a|^2 keeps the constants
    // O(log gamma) instead of cancelling terms of size gamma.
    const LinExpr bound =
        LinExpr(std::log2(1.0 + gamma) + 1.0 / kLn2) - LinExpr::var(R0 + k);

    CLinVec terms;
    for (int l = 0; l < K_L; ++l) {
      const CLin a = dot(theta, stacked_times(ch, s, k, false, s.v[l]));
      terms.push_back(l == k ? CLin(cd(rw, 0.0)) + cd(-rw, 0.0) * a : rw * a);
    }
    for (int i = 0; i < M; ++i)
      terms.push_back(rw * dot(theta, stacked_times(ch, s, k, false, s.qcols[i])));
    terms.emplace_back(cd(rw * sigma * theta.norm(), 0.0));
    const CLinVec z = zbar_root(ch, s, k, false, sigma);
    for (int n = 1; n <= N; ++n) terms.push_back((rw * std::conj(theta(n))) * z[n]);
    b.add_squared_norm_le(terms, bound, "rate_" + std::to_string(k));
    b.add_nonneg(LinExpr::var(R0 + k) - LinExpr::var(t), "min_" + std::to_string(k));
  }

  const double inv_rt_ln2 = 1.0 / std::sqrt(kLn2);
  for (int m = 0; m < K_E; ++m) {
    // Upper bound on log2 det of the full eavesdropper covariance.
    const CMat& Sigma = aux.sigma[m];
    const Eigen::LLT<CMat> llt(hermitian_part(Sigma));
    const CMat L = llt.matrixL();
    const CMat F = L.triangularView<Eigen::Lower>().solve(
        CMat::Identity(Sigma.rows(), Sigma.cols()));
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < L.rows(); ++i) logdet += 2.0 * std::log2(L(i, i).real());

    CLinVec terms;
    for (int l = 0; l < K_L; ++l)
      append(terms, scaled(inv_rt_ln2, mat_times(F, stacked_times(ch, s, m, true, s.v[l]))));
    for (int i = 0; i < M; ++i)
      append(terms,
             scaled(inv_rt_ln2, mat_times(F, stacked_times(ch, s, m, true, s.qcols[i]))));
    terms.emplace_back(cd(inv_rt_ln2 * sigma * F.norm(), 0.0));
    const CLinVec ze = zbar_root(ch, s, m, true, sigma);
    for (int n = 1; n <= N; ++n)
      terms.push_back((inv_rt_ln2 * F.col(n).norm()) * ze[n]);
    b.add_squared_norm_le(terms, LinExpr::var(A0 + m) - LinExpr(logdet - n1 / kLn2),
                          "abound_" + std::to_string(m));

    // Lower bounds on log2 det C_{E,k,m}, one per stream.
    std::vector<CLinVec> g_v(K_L), g_q(M);
    for (int l = 0; l < K_L; ++l) g_v[l] = stacked_times(ch, s, m, true, s.v[l]);
    for (int i = 0; i < M; ++i) g_q[i] = stacked_times(ch, s, m, true, s.qcols[i]);

    for (int k = 0; k < K_L; ++k) {
      const LeakAux& la = aux.leak[k][m];
      const Eigen::Index P = la.Gamma.rows();
      const CMat IG = CMat::Identity(P, P) + la.Gamma;
      const Eigen::LLT<CMat> lg(hermitian_part(IG));
      const CMat LG = lg.matrixL();
      const CMat Pm = LG.adjoint() * la.Theta.adjoint();

      // Columns of W = Ghat Vhat in the Vhat column order.
      std::vector<CLinVec> cols;
      cols.reserve(P);
      for (int i = 0; i < M; ++i) cols.push_back(g_q[i]);
      for (int l = 0; l < K_L; ++l)
        if (l != k) cols.push_back(g_v[l]);
      for (int n = 0; n <= N; ++n) {
        CLinVec e(N + 1);
        e[n] = ze[n];
        cols.push_back(std::move(e));
      }

      double lgdet = 0.0;
      for (Eigen::Index i = 0; i < P; ++i) lgdet += 2.0 * std::log2(LG(i, i).real());
      // Completed square as for the rate: sum_j |LG^H (e_j - Theta^H w_j)|^2.
      const double cst = lgdet + static_cast<double>(P) / kLn2 -
                         cfg.sigma2 * (IG * la.Theta.adjoint() * la.Theta).trace().real() / kLn2 +
                         n1 * std::log2(cfg.sigma2);
      LinExpr bound(cst);
      CLinVec sq;
      for (Eigen::Index j = 0; j < P; ++j) {
        CLinVec r = scaled(-inv_rt_ln2, mat_times(Pm, cols[j]));
        for (Eigen::Index i = 0; i < P; ++i)
          if (LG(j, i) != cd(0.0, 0.0)) r[i] += CLin(inv_rt_ln2 * std::conj(LG(j, i)));
        append(sq, r);
      }
      bound -= LinExpr::var(B_index(k, m));
      b.add_squared_norm_le(sq, bound,
                            "bbound_" + std::to_string(k) + "_" + std::to_string(m));
      b.add_nonneg(LinExpr(cfg.beta) - LinExpr::var(A0 + m) + LinExpr::var(B_index(k, m)),
                   "leak_" + std::to_string(k) + "_" + std::to_string(m));
    }
  }

  if (free == Free::kBeamforming && cfg.P_B > 0.0) {
    CLinVec all;
    for (const auto& vl : s.v) append(all, vl);
    for (const auto& q : s.qcols) append(all, q);
    b.add_norm_le(all, LinExpr(std::sqrt(cfg.P_B)), "bs_power");
  }
  const bool relay_has_vars =
      (free == Free::kBeamforming && cfg.P_B > 0.0) || (free == Free::kAlpha && cfg.P_U > 0.0);
  if (relay_has_vars) {
    for (int n = 0; n < N; ++n) {
      const CVec& hj = ch.h[ch.relays[n]];
      CLinVec terms;
      for (int l = 0; l < K_L; ++l) terms.push_back(conic::product(s.alpha[n], dot(hj, s.v[l])));
      for (int i = 0; i < M; ++i)
        terms.push_back(conic::product(s.alpha[n], dot(hj, s.qcols[i])));
      terms.push_back(sigma * s.alpha[n]);
      b.add_norm_le(terms, LinExpr(std::sqrt(cfg.P_U)), "relay_" + std::to_string(n));
    }
  }

  b.minimize(LinExpr::var(t, -1.0));
  return std::move(b).build();
}

}  // namespace

ConicProgram assemble_bf_subproblem(const ChannelRealization& ch,
                                    const DesignVariables& current,
                                    const AuxiliaryVariables& aux,
                                    const SystemConfig& cfg) {
  return assemble(ch, current, aux, cfg, Free::kBeamforming);
}

ConicProgram assemble_alpha_subproblem(const ChannelRealization& ch,
                                       const DesignVariables& current,
                                       const AuxiliaryVariables& aux,
                                       const SystemConfig& cfg) {
  return assemble(ch, current, aux, cfg, Free::kAlpha);
}

RVec embed_design(const ConicProgram& cp, const DesignVariables& dv) {
  RVec x = RVec::Zero(cp.n_vars);
  const int M = static_cast<int>(dv.Qtilde.rows());
  const auto& vs = cp.var_index.at("v");
  for (int l = 0; vs.size > 0 && l < static_cast<int>(dv.v.size()); ++l)
    for (int i = 0; i < M; ++i) {
      x(vs.start + 2 * (l * M + i)) = dv.v[l](i).real();
      x(vs.start + 2 * (l * M + i) + 1) = dv.v[l](i).imag();
    }
  const auto& qs = cp.var_index.at("Qtilde");
  for (int r = 0; qs.size > 0 && r < M; ++r)
    for (int c = 0; c < M; ++c) {
      x(qs.start + 2 * (r * M + c)) = dv.Qtilde(r, c).real();
      x(qs.start + 2 * (r * M + c) + 1) = dv.Qtilde(r, c).imag();
    }
  const auto& as = cp.var_index.at("alpha");
  for (Eigen::Index n = 0; as.size > 0 && n < dv.alpha.size(); ++n) {
    x(as.start + 2 * n) = dv.alpha(n).real();
    x(as.start + 2 * n + 1) = dv.alpha(n).imag();
  }
  return x;
}

DesignVariables extract_design(const ConicProgram& cp, const RVec& x,
                               const DesignVariables& base) {
  DesignVariables dv = base;
  const int M = static_cast<int>(dv.Qtilde.rows());
  const auto& vs = cp.var_index.at("v");
  for (int l = 0; vs.size > 0 && l < static_cast<int>(dv.v.size()); ++l)
    for (int i = 0; i < M; ++i)
      dv.v[l](i) = cd(x(vs.start + 2 * (l * M + i)), x(vs.start + 2 * (l * M + i) + 1));
  const auto& qs = cp.var_index.at("Qtilde");
  for (int r = 0; qs.size > 0 && r < M; ++r)
    for (int c = 0; c < M; ++c)
      dv.Qtilde(r, c) = cd(x(qs.start + 2 * (r * M + c)), x(qs.start + 2 * (r * M + c) + 1));
  const auto& as = cp.var_index.at("alpha");
  for (Eigen::Index n = 0; as.size > 0 && n < dv.alpha.size(); ++n)
    dv.alpha(n) = cd(x(as.start + 2 * n), x(as.start + 2 * n + 1));
  return dv;
}

SolveResult solve_subproblem(const ConicProgram& cp,
                             const DesignVariables& current,
                             const conic::SolverSettings& settings) {
  SolveResult res;
  res.dv = current;
  const conic::Solution sol = conic::solve(cp, settings);
  res.iterations = sol.iterations;
  switch (sol.status) {
    case conic::SolveStatus::kOptimal:
      res.status = SubStatus::kOptimal;
      break;
    case conic::SolveStatus::kInfeasible:
      res.status = SubStatus::kInfeasible;
      return res;
    default:
      res.status = SubStatus::kNumericalFailure;
      return res;
  }
  res.dv = extract_design(cp, sol.x, current);
  res.objective = sol.x(cp.slice_start("t"));
  const auto& rs = cp.var_index.at("R");
  for (int k = 0; k < rs.size; ++k) res.R.push_back(sol.x(rs.start + k));
  const auto& as = cp.var_index.at("A");
  for (int m = 0; m < as.size; ++m) res.A.push_back(sol.x(as.start + m));
  const int K_L = rs.size;
  const auto& bs = cp.var_index.at("B");
  res.B.assign(K_L, std::vector<double>(as.size, 0.0));
  for (int i = 0; i < bs.size; ++i) res.B[i % K_L][i / K_L] = sol.x(bs.start + i);
  res.max_violation = cp.max_violation(sol.x);
  return res;
}

double surrogate_objective(const ChannelRealization& ch,
                           const DesignVariables& dv,
                           const AuxiliaryVariables& aux,
                           const SystemConfig& cfg) {
  const StackedMatrices st = build_stacked(ch, dv, cfg);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < ch.num_legit(); ++k)
    best = std::min(best, surrogate_rate_rhs(k, aux, st, dv, cfg));
  return best;
}

bool surrogate_leakage_ok(const ChannelRealization& ch,
                          const DesignVariables& dv,
                          const AuxiliaryVariables& aux,
                          const SystemConfig& cfg, double tol) {
  const StackedMatrices st = build_stacked(ch, dv, cfg);
  for (int k = 0; k < ch.num_legit(); ++k)
    for (int m = 0; m < ch.num_eves(); ++m) {
      const LeakBounds lb = surrogate_leak_terms(k, m, aux, ch, st, dv, cfg);
      if (lb.a_bound - lb.b_bound > cfg.beta + tol) return false;
    }
  return true;
}

}  // namespace d2dsec
