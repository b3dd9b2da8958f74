#include "d2dsec/socp_solver.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace d2dsec::conic {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kNumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One cone of the internal form G x + s = h, s in K. G is stored over the
// columns listed in supp only.
struct Block {
  bool soc = false;
  int off = 0;
  int dim = 0;
  std::vector<int> supp;
  RMat G;
  // Nesterov-Todd scaling: orthant w = sqrt(s/z); SOC w = normalized wbar.
  RVec w;
  double eta = 1.0;
};

struct Problem {
  int n = 0;
  int m = 0;
  int p = 0;
  RVec c, h, b;
  RMat A;
  std::vector<Block> blocks;
  int degree = 0;
};

RVec gather(const RVec& x, const std::vector<int>& idx) {
  RVec out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out(i) = x(idx[i]);
  return out;
}

RVec G_times(const Problem& P, const RVec& x) {
  RVec out(P.m);
  for (const auto& b : P.blocks) out.segment(b.off, b.dim) = b.G * gather(x, b.supp);
  return out;
}

RVec Gt_times(const Problem& P, const RVec& z) {
  RVec out = RVec::Zero(P.n);
  for (const auto& b : P.blocks) {
    const RVec t = b.G.transpose() * z.segment(b.off, b.dim);
    for (std::size_t i = 0; i < b.supp.size(); ++i) out(b.supp[i]) += t(i);
  }
  return out;
}

double soc_det(const RVec& u) {
  const double r = u.tail(u.size() - 1).norm();
  return (u(0) - r) * (u(0) + r);
}

bool interior(const Block& b, const RVec& u) {
  if (!b.soc) return u.minCoeff() > 0.0;
  return u(0) > 0.0 && soc_det(u) > 0.0;
}

// Largest alpha with u + alpha d in the cone (u interior).
double max_step(const Block& b, const RVec& u, const RVec& d) {
  if (!b.soc) {
    double a = kInf;
    for (Eigen::Index i = 0; i < u.size(); ++i)
      if (d(i) < 0.0) a = std::min(a, -u(i) / d(i));
    return a;
  }
  const Eigen::Index k = u.size() - 1;
  const double qa = d(0) * d(0) - d.tail(k).squaredNorm();
  const double qb = u(0) * d(0) - u.tail(k).dot(d.tail(k));
  const double qc = soc_det(u);
  if (qc <= 0.0) return 0.0;
  if (std::abs(qa) <= 1e-15 * (d.squaredNorm() + 1e-300)) {
    return qb < 0.0 ? -qc / (2.0 * qb) : kInf;
  }
  const double disc = qb * qb - qa * qc;
  if (disc < 0.0) return kInf;
  const double sq = std::sqrt(disc);
  const double q = -(qb + std::copysign(sq, qb));
  double best = kInf;
  if (q != 0.0) {
    const double r1 = q / qa;
    const double r2 = qc / q;
    if (r1 > 0.0) best = std::min(best, r1);
    if (r2 > 0.0) best = std::min(best, r2);
  } else {
    const double r = std::sqrt(std::max(0.0, -qc / qa));
    if (r > 0.0) best = r;
  }
  return best;
}

bool compute_scaling(Block& b, const RVec& s, const RVec& z) {
  if (!b.soc) {
    if (s.minCoeff() <= 0.0 || z.minCoeff() <= 0.0) return false;
    b.w = (s.array() / z.array()).sqrt();
    b.eta = 1.0;
    return true;
  }
  const double sJs = soc_det(s);
  const double zJz = soc_det(z);
  if (!(sJs > 0.0) || !(zJz > 0.0) || s(0) <= 0.0 || z(0) <= 0.0) return false;
  const RVec sbar = s / std::sqrt(sJs);
  RVec zbar = z / std::sqrt(zJz);
  const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
  zbar.tail(zbar.size() - 1) *= -1.0;
  b.w = (sbar + zbar) / (2.0 * gamma);
  b.eta = std::pow(sJs / zJz, 0.25);
  return true;
}

// out = W v (or W^{-1} v) for one block.
RVec apply_W(const Block& b, const RVec& v, bool inverse) {
  if (!b.soc) return inverse ? RVec(v.array() / b.w.array()) : RVec(v.array() * b.w.array());
  const Eigen::Index k = v.size() - 1;
  const double w0 = b.w(0);
  const auto w1 = b.w.tail(k);
  const double a = w1.dot(v.tail(k));
  RVec out(v.size());
  if (!inverse) {
    out(0) = b.eta * (w0 * v(0) + a);
    out.tail(k) = b.eta * (v.tail(k) + (v(0) + a / (1.0 + w0)) * w1);
  } else {
    out(0) = (w0 * v(0) - a) / b.eta;
    out.tail(k) = (v.tail(k) + (-v(0) + a / (1.0 + w0)) * w1) / b.eta;
  }
  return out;
}

RMat apply_Winv_cols(const Block& b, const RMat& G) {
  if (!b.soc) return b.w.cwiseInverse().asDiagonal() * G;
  const Eigen::Index k = G.rows() - 1;
  const double w0 = b.w(0);
  const auto w1 = b.w.tail(k);
  const Eigen::RowVectorXd a = w1.transpose() * G.bottomRows(k);
  RMat H(G.rows(), G.cols());
  H.row(0) = (w0 * G.row(0) - a) / b.eta;
  H.bottomRows(k) = (G.bottomRows(k) + w1 * (-G.row(0) + a / (1.0 + w0))) / b.eta;
  return H;
}

RVec jprod(const Block& b, const RVec& u, const RVec& v) {
  if (!b.soc) return u.array() * v.array();
  const Eigen::Index k = u.size() - 1;
  RVec out(u.size());
  out(0) = u.dot(v);
  out.tail(k) = u(0) * v.tail(k) + v(0) * u.tail(k);
  return out;
}

// Solves lam o x = d.
RVec jdiv(const Block& b, const RVec& lam, const RVec& d) {
  if (!b.soc) return d.array() / lam.array();
  const Eigen::Index k = lam.size() - 1;
  const double det = soc_det(lam);
  RVec x(lam.size());
  x(0) = (lam(0) * d(0) - lam.tail(k).dot(d.tail(k))) / det;
  x.tail(k) = (d.tail(k) - x(0) * lam.tail(k)) / lam(0);
  return x;
}

RVec unit(const Block& b) {
  if (!b.soc) return RVec::Ones(b.dim);
  RVec e = RVec::Zero(b.dim);
  e(0) = 1.0;
  return e;
}

Problem convert(const ConicProgram& cp) {
  Problem P;
  P.n = cp.n_vars;
  P.c = cp.cost;
  std::vector<RVec> eq_rows;
  std::vector<double> eq_rhs;
  int off = 0;
  for (const auto& con : cp.constraints) {
    if (con.kind == ConeKind::kZero) {
      for (int r = 0; r < con.dim(); ++r) {
        RVec row = RVec::Zero(P.n);
        for (std::size_t s = 0; s < con.support.size(); ++s)
          row(con.support[s]) += con.coeffs(r, static_cast<Eigen::Index>(s));
        eq_rows.push_back(std::move(row));
        eq_rhs.push_back(-con.offset(r));
      }
      continue;
    }
    Block b;
    b.soc = con.kind == ConeKind::kSoc;
    b.off = off;
    b.dim = con.dim();
    b.supp = con.support;
    b.G = -con.coeffs;
    off += b.dim;
    P.degree += b.soc ? 1 : b.dim;
    P.blocks.push_back(std::move(b));
  }
  P.m = off;
  P.h.resize(P.m);
  {
    int i = 0;
    for (const auto& con : cp.constraints) {
      if (con.kind == ConeKind::kZero) continue;
      P.h.segment(i, con.dim()) = con.offset;
      i += con.dim();
    }
  }
  P.p = static_cast<int>(eq_rows.size());
  P.A = RMat::Zero(P.p, P.n);
  P.b = RVec::Zero(P.p);
  for (int r = 0; r < P.p; ++r) {
    P.A.row(r) = eq_rows[r].transpose();
    P.b(r) = eq_rhs[r];
  }
  return P;
}

struct Scaling {
  RVec D, E, F;  // columns, cone rows, equality rows
};

Scaling equilibrate(Problem& P, int passes) {
  Scaling S{RVec::Ones(P.n), RVec::Ones(P.m), RVec::Ones(P.p)};
  auto clamp = [](double v) {
    if (!(v > 0.0)) return 1.0;
    return std::clamp(1.0 / std::sqrt(v), 1e-4, 1e4);
  };
  for (int pass = 0; pass < passes; ++pass) {
    RVec colmax = RVec::Zero(P.n);
    for (const auto& b : P.blocks)
      for (std::size_t j = 0; j < b.supp.size(); ++j)
        colmax(b.supp[j]) = std::max(colmax(b.supp[j]),
                                     b.G.col(static_cast<Eigen::Index>(j)).cwiseAbs().maxCoeff());
    for (int r = 0; r < P.p; ++r)
      for (int j = 0; j < P.n; ++j) colmax(j) = std::max(colmax(j), std::abs(P.A(r, j)));
    RVec d(P.n);
    for (int j = 0; j < P.n; ++j) d(j) = clamp(colmax(j));
    for (auto& b : P.blocks)
      for (std::size_t j = 0; j < b.supp.size(); ++j)
        b.G.col(static_cast<Eigen::Index>(j)) *= d(b.supp[j]);
    P.A = P.A * d.asDiagonal();
    S.D.array() *= d.array();

    for (auto& b : P.blocks) {
      if (b.soc) {
        const double e = clamp(b.G.size() ? b.G.cwiseAbs().maxCoeff() : 0.0);
        b.G *= e;
        S.E.segment(b.off, b.dim) *= e;
      } else {
        for (int r = 0; r < b.dim; ++r) {
          const double e = clamp(b.G.row(r).cwiseAbs().maxCoeff());
          b.G.row(r) *= e;
          S.E(b.off + r) *= e;
        }
      }
    }
    for (int r = 0; r < P.p; ++r) {
      const double e = clamp(P.A.row(r).cwiseAbs().maxCoeff());
      P.A.row(r) *= e;
      S.F(r) *= e;
    }
  }
  P.c = P.c.cwiseProduct(S.D);
  P.h = P.h.cwiseProduct(S.E);
  P.b = P.b.cwiseProduct(S.F);
  return S;
}

// Factorization of  [0 A' G'; A 0 0; G 0 -W^2]  by elimination of dz.
class Kkt {
 public:
  explicit Kkt(const Problem& P) : P_(P) {}

  // Factors N = G' W^-2 G through a QR of the stacked W^-1 G, which keeps
  // the accuracy that forming N explicitly loses near the boundary.
  bool factor() {
    RMat H = RMat::Zero(P_.m + P_.n, P_.n);
    double scale = 0.0;
    for (const auto& b : P_.blocks) {
      const RMat Hb = apply_Winv_cols(b, b.G);
      for (std::size_t j = 0; j < b.supp.size(); ++j)
        H.block(b.off, b.supp[j], b.dim, 1) = Hb.col(static_cast<Eigen::Index>(j));
      scale = std::max(scale, Hb.colwise().squaredNorm().maxCoeff());
    }
    const double reg = std::sqrt(1e-13 * std::max(1.0, scale));
    H.bottomRows(P_.n).diagonal().setConstant(reg);
    qr_.compute(H);
    R_ = qr_.matrixQR().topRows(P_.n).triangularView<Eigen::Upper>();
    if (!R_.allFinite() || R_.diagonal().cwiseAbs().minCoeff() == 0.0) return false;
    if (P_.p > 0) {
      NinvAt_ = ninv(P_.A.transpose());
      schur_.compute(P_.A * NinvAt_);
      if (schur_.info() != Eigen::Success) return false;
    }
    return true;
  }

  // Solves A'dy + G'dz = bx; A dx = by; G dx - W^2 dz = bz.
  void solve(const RVec& bx, const RVec& by, const RVec& bz, RVec& dx, RVec& dy,
             RVec& dz) const {
    raw_solve(bx, by, bz, dx, dy, dz);
    for (int it = 0; it < 2; ++it) {
      const RVec e1 = bx - P_.A.transpose() * dy - Gt_times(P_, dz);
      const RVec e2 = by - P_.A * dx;
      const RVec e3 = bz - G_times(P_, dx) + W2(dz);
      const double err = std::max({e1.lpNorm<Eigen::Infinity>(),
                                   e2.size() ? e2.lpNorm<Eigen::Infinity>() : 0.0,
                                   e3.lpNorm<Eigen::Infinity>()});
      const double ref = 1e-14 * (1.0 + std::max({bx.lpNorm<Eigen::Infinity>(),
                                                  by.size() ? by.lpNorm<Eigen::Infinity>() : 0.0,
                                                  bz.lpNorm<Eigen::Infinity>()}));
      if (err <= ref) break;
      RVec cx, cy, cz;
      raw_solve(e1, e2, e3, cx, cy, cz);
      dx += cx;
      dy += cy;
      dz += cz;
    }
  }

  RVec W2(const RVec& v) const {
    RVec out(P_.m);
    for (const auto& b : P_.blocks) {
      const RVec seg = v.segment(b.off, b.dim);
      out.segment(b.off, b.dim) = apply_W(b, apply_W(b, seg, false), false);
    }
    return out;
  }

  RVec W2inv(const RVec& v) const {
    RVec out(P_.m);
    for (const auto& b : P_.blocks) {
      const RVec seg = v.segment(b.off, b.dim);
      out.segment(b.off, b.dim) = apply_W(b, apply_W(b, seg, true), true);
    }
    return out;
  }

 private:
  void raw_solve(const RVec& bx, const RVec& by, const RVec& bz, RVec& dx,
                 RVec& dy, RVec& dz) const {
    const RVec r = bx + Gt_times(P_, W2inv(bz));
    if (P_.p > 0) {
      const RVec Ninv_r = ninv(r);
      dy = schur_.solve(P_.A * Ninv_r - by);
      dx = Ninv_r - NinvAt_ * dy;
    } else {
      dy = RVec::Zero(0);
      dx = ninv(r);
    }
    dz = W2inv(G_times(P_, dx) - bz);
  }

  template <typename Rhs>
  RMat ninv(const Rhs& r) const {
    const RMat y = R_.transpose().triangularView<Eigen::Lower>().solve(RMat(r));
    return R_.triangularView<Eigen::Upper>().solve(y);
  }

  const Problem& P_;
  Eigen::HouseholderQR<RMat> qr_;
  RMat R_;
  RMat NinvAt_;
  Eigen::LLT<RMat> schur_;
};

// Shifts u into the cone interior: u + (1 + a) e when a = min shift >= 0.
void shift_interior(const Problem& P, RVec& u) {
  double a = -kInf;
  for (const auto& b : P.blocks) {
    const RVec seg = u.segment(b.off, b.dim);
    if (b.soc)
      a = std::max(a, seg.tail(seg.size() - 1).norm() - seg(0));
    else
      a = std::max(a, -seg.minCoeff());
  }
  if (P.blocks.empty() || a < 0.0) return;
  for (const auto& b : P.blocks) u.segment(b.off, b.dim) += (1.0 + a) * unit(b);
}

}  // namespace

Solution solve(const ConicProgram& cp, const SolverSettings& settings) {
  Solution sol;
  if (cp.trivially_infeasible) {
    sol.status = SolveStatus::kInfeasible;
    return sol;
  }
  const RVec c_orig = cp.cost;
  Problem P = convert(cp);
  const RVec h_orig = P.h;
  const RVec b_orig = P.b;
  const Scaling S = equilibrate(P, settings.equilibration_passes);
  const double resx0 = std::max(1.0, c_orig.norm());
  const double resy0 = std::max(1.0, b_orig.norm());
  const double resz0 = std::max(1.0, h_orig.norm());

  if (P.m == 0) {
    // Equality-only or empty programs are outside the supported class.
    sol.status = SolveStatus::kNumericalFailure;
    return sol;
  }

  Kkt kkt(P);
  for (auto& b : P.blocks) {
    b.w = b.soc ? unit(b) : RVec::Ones(b.dim);
    b.eta = 1.0;
  }
  if (!kkt.factor()) return sol;

  RVec x, y, z, s;
  {
    RVec dx, dy, dz;
    kkt.solve(RVec::Zero(P.n), P.b, P.h, dx, dy, dz);
    x = dx;
    s = -dz;
    kkt.solve(-P.c, RVec::Zero(P.p), RVec::Zero(P.m), dx, dy, dz);
    y = dy;
    z = dz;
  }
  shift_interior(P, s);
  shift_interior(P, z);
  double tau = 1.0;
  double kappa = 1.0;

  auto unscaled_norm = [](const RVec& r, const RVec& scale) {
    return r.cwiseQuotient(scale).norm();
  };

  const double deg1 = static_cast<double>(P.degree + 1);
  bool converged = false;
  // Best iterate seen, kept in case the iteration stalls near the optimum.
  struct Snapshot {
    RVec x, y, z;
    double tau = 1.0;
    double score = kInf;
    double pres = kInf, dres = kInf, gap = kInf, pcost = 0.0, dcost = 0.0;
    int iter = 0;
  } best;
  int iter = 0;
  for (; iter <= settings.max_iter; ++iter) {
    const RVec Gtz = Gt_times(P, z);
    const RVec Gx = G_times(P, x);
    const RVec Aty = P.A.transpose() * y;
    const RVec Ax = P.A * x;
    const RVec rx = Aty + Gtz + tau * P.c;
    const RVec ry = -Ax + tau * P.b;
    const RVec rz = -Gx + tau * P.h - s;
    const double cx = P.c.dot(x);
    const double by_hz = P.b.dot(y) + P.h.dot(z);
    const double rt = -cx - by_hz - kappa;
    const double gap = s.dot(z);
    const double mu = (gap + tau * kappa) / deg1;

    const double pcost = cx / tau;
    const double dcost = -by_hz / tau;
    const double pres = std::max(unscaled_norm(ry, S.F) / resy0,
                                 unscaled_norm(rz, S.E) / resz0) / tau;
    const double dres = unscaled_norm(rx, S.D) / resx0 / tau;
    const double abs_gap = gap / (tau * tau);
    double rel_gap = kInf;
    if (pcost < 0.0)
      rel_gap = abs_gap / -pcost;
    else if (dcost > 0.0)
      rel_gap = abs_gap / dcost;
    sol.primal_residual = pres;
    sol.dual_residual = dres;
    sol.relative_gap = std::min(rel_gap, abs_gap);
    sol.primal_objective = pcost;
    sol.dual_objective = dcost;
    sol.iterations = iter;

    // Dual residuals are weighted by the looser dual acceptance level.
    const double score = std::max(
        {pres, sol.relative_gap, dres * settings.accept_tol / settings.dual_accept_tol});
    if (score < best.score) {
      best = {x, y, z, tau, score, pres, dres, sol.relative_gap, pcost, dcost, iter};
    }

    if (settings.verbose)
      std::fprintf(stderr, "%3d pcost %+.9e dcost %+.9e gap %.2e pres %.2e dres %.2e k/t %.2e\n",
                   iter, pcost, dcost, abs_gap, pres, dres, kappa / tau);

    if (pres <= settings.feastol && dres <= settings.feastol &&
        (abs_gap <= settings.abstol || rel_gap <= settings.reltol)) {
      converged = true;
      break;
    }
    if (by_hz < 0.0) {
      const double pinf = unscaled_norm(Aty + Gtz, S.D) / -by_hz;
      if (pinf <= settings.feastol) {
        sol.status = SolveStatus::kInfeasible;
        sol.iterations = iter;
        return sol;
      }
    }
    if (cx < 0.0) {
      const double dinf = std::max(unscaled_norm(Ax, S.F) / resy0,
                                   unscaled_norm(Gx + s, S.E) / resz0) / -cx;
      if (dinf <= settings.feastol) {
        sol.status = SolveStatus::kUnbounded;
        sol.iterations = iter;
        return sol;
      }
    }
    if (iter == settings.max_iter) break;

    bool ok = true;
    for (auto& b : P.blocks)
      ok = ok && compute_scaling(b, s.segment(b.off, b.dim), z.segment(b.off, b.dim));
    if (!ok || !kkt.factor()) break;

    RVec lambda(P.m);
    for (const auto& b : P.blocks)
      lambda.segment(b.off, b.dim) = apply_W(b, z.segment(b.off, b.dim), false);

    RVec u1x, u1y, u1z;
    kkt.solve(-P.c, P.b, P.h, u1x, u1y, u1z);
    const double u1_dot = P.c.dot(u1x) + P.b.dot(u1y) + P.h.dot(u1z);

    // Returns the full step for the given complementarity targets.
    struct Step {
      RVec dx, dy, dz, ds, ds_s, dz_s;
      double dtau = 0.0, dkappa = 0.0;
    };
    auto direction = [&](double eta, const RVec& d_s, double d_tau) {
      Step st;
      RVec lam_inv_ds(P.m), bz(P.m);
      for (const auto& b : P.blocks) {
        const RVec q = jdiv(b, lambda.segment(b.off, b.dim), d_s.segment(b.off, b.dim));
        lam_inv_ds.segment(b.off, b.dim) = q;
        bz.segment(b.off, b.dim) = apply_W(b, q, false);
      }
      const double f = 1.0 - eta;
      RVec u2x, u2y, u2z;
      kkt.solve(-f * rx, f * ry, f * rz - bz, u2x, u2y, u2z);
      const double num = -f * rt + P.c.dot(u2x) + P.b.dot(u2y) + P.h.dot(u2z) + d_tau / tau;
      const double den = kappa / tau - u1_dot;
      st.dtau = num / den;
      st.dx = u2x + st.dtau * u1x;
      st.dy = u2y + st.dtau * u1y;
      st.dz = u2z + st.dtau * u1z;
      st.dz_s.resize(P.m);
      st.ds_s.resize(P.m);
      st.ds.resize(P.m);
      for (const auto& b : P.blocks) {
        const RVec dzs = apply_W(b, st.dz.segment(b.off, b.dim), false);
        const RVec dss = lam_inv_ds.segment(b.off, b.dim) - dzs;
        st.dz_s.segment(b.off, b.dim) = dzs;
        st.ds_s.segment(b.off, b.dim) = dss;
        st.ds.segment(b.off, b.dim) = apply_W(b, dss, false);
      }
      st.dkappa = (d_tau - kappa * st.dtau) / tau;
      return st;
    };
    auto step_length = [&](const Step& st) {
      double a = kInf;
      for (const auto& b : P.blocks) {
        const RVec lam = lambda.segment(b.off, b.dim);
        a = std::min(a, max_step(b, lam, st.ds_s.segment(b.off, b.dim)));
        a = std::min(a, max_step(b, lam, st.dz_s.segment(b.off, b.dim)));
      }
      if (st.dtau < 0.0) a = std::min(a, -tau / st.dtau);
      if (st.dkappa < 0.0) a = std::min(a, -kappa / st.dkappa);
      return a;
    };

    RVec d_s(P.m);
    for (const auto& b : P.blocks) {
      const RVec lam = lambda.segment(b.off, b.dim);
      d_s.segment(b.off, b.dim) = -jprod(b, lam, lam);
    }
    const Step aff = direction(0.0, d_s, -tau * kappa);
    const double a_aff = std::min(1.0, step_length(aff));
    const double sigma = std::clamp(std::pow(1.0 - a_aff, 3), 0.0, 1.0);

    for (const auto& b : P.blocks) {
      const RVec lam = lambda.segment(b.off, b.dim);
      d_s.segment(b.off, b.dim) =
          -jprod(b, lam, lam) -
          jprod(b, aff.ds_s.segment(b.off, b.dim), aff.dz_s.segment(b.off, b.dim)) +
          sigma * mu * unit(b);
    }
    const Step cmb = direction(sigma, d_s, -tau * kappa - aff.dtau * aff.dkappa + sigma * mu);
    const double a_max = step_length(cmb);
    const double alpha = std::min(1.0, settings.step_fraction * a_max);
    if (!(alpha > 1e-12)) break;

    x += alpha * cmb.dx;
    y += alpha * cmb.dy;
    z += alpha * cmb.dz;
    s += alpha * cmb.ds;
    tau += alpha * cmb.dtau;
    kappa += alpha * cmb.dkappa;
    bool inside = tau > 0.0 && kappa > 0.0;
    for (const auto& b : P.blocks)
      inside = inside && interior(b, s.segment(b.off, b.dim)) &&
               interior(b, z.segment(b.off, b.dim));
    if (!inside) break;
  }

  if (!converged) {
    if (!(best.score <= settings.accept_tol)) {
      sol.status = SolveStatus::kNumericalFailure;
      return sol;
    }
    x = best.x;
    y = best.y;
    z = best.z;
    tau = best.tau;
    sol.primal_residual = best.pres;
    sol.dual_residual = best.dres;
    sol.relative_gap = best.gap;
    sol.primal_objective = best.pcost;
    sol.dual_objective = best.dcost;
  }
  sol.status = SolveStatus::kOptimal;
  sol.x = S.D.cwiseProduct(x) / tau;
  sol.y = S.F.cwiseProduct(y) / tau;
  sol.z = S.E.cwiseProduct(z) / tau;
  sol.iterations = iter;
  return sol;
}

}  // namespace d2dsec::conic
