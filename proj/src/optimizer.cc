#include "d2dsec/optimizer.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace d2dsec {

const char* to_string(SchemeId s) {
  switch (s) {
    case SchemeId::kProposedD2D:
      return "ProposedD2D";
    case SchemeId::kNoD2D:
      return "NoD2D";
    case SchemeId::kRandomD2D:
      return "RandomD2D";
  }
  return "unknown";
}

SchemeId parse_scheme(const std::string& name) {
  for (SchemeId s : {SchemeId::kProposedD2D, SchemeId::kNoD2D, SchemeId::kRandomD2D})
    if (name == to_string(s)) return s;
  throw ConfigError("unknown scheme: " + name);
}

const char* to_string(TraceStatus s) {
  switch (s) {
    case TraceStatus::kConverged:
      return "converged";
    case TraceStatus::kMaxIter:
      return "max_iter";
    case TraceStatus::kFailed:
      return "failed";
  }
  return "unknown";
}

DesignVariables initialize(const ChannelRealization& ch, const SystemConfig& cfg) {
  constexpr double kRho = 0.9;
  constexpr double kRhoAlpha = 0.5;
  DesignVariables dv = zero_design(cfg);
  const double pv = std::sqrt(kRho * cfg.P_B / cfg.K_L);
  for (int l = 0; l < cfg.K_L; ++l) {
    const double nh = ch.h[l].norm();
    if (nh > 0.0) {
      dv.v[l] = pv * ch.h[l] / nh;
    } else {
      dv.v[l](0) = pv;
    }
  }
  dv.Qtilde = std::sqrt((1.0 - kRho) * cfg.P_B / cfg.M) * CMat::Identity(cfg.M, cfg.M);
  for (int n = 0; n < ch.num_relays(); ++n)
    dv.alpha(n) = std::sqrt(kRhoAlpha * cfg.P_U / relay_rx_power(n, ch, dv, cfg));
  return dv;
}

namespace {

SystemConfig normalized(const SystemConfig& cfg) {
  SystemConfig c = cfg;
  c.P_B = cfg.P_B / cfg.sigma2;
  c.P_U = cfg.P_U / cfg.sigma2;
  c.sigma2 = 1.0;
  return c;
}

DesignVariables rescale(DesignVariables dv, double s) {
  for (auto& vl : dv.v) vl *= s;
  dv.Qtilde *= s;
  return dv;
}

// Pulls a solver output that overshoots a budget by round-off back onto it.
void clip_to_budgets(DesignVariables& dv, const ChannelRealization& ch,
                     const SystemConfig& cfg) {
  const double p = bs_power(dv);
  if (p > cfg.P_B) dv = rescale(std::move(dv), std::sqrt(cfg.P_B / p));
  for (int n = 0; n < ch.num_relays(); ++n) {
    const double pr = std::norm(dv.alpha(n)) * relay_rx_power(n, ch, dv, cfg);
    if (pr > cfg.P_U) dv.alpha(n) *= std::sqrt(cfg.P_U / pr);
  }
}

double exact_min_rate(const ChannelRealization& ch, const DesignVariables& dv,
                      const SystemConfig& cfg) {
  const StackedMatrices st = build_stacked(ch, dv, cfg);
  double r = std::numeric_limits<double>::infinity();
  for (int k = 0; k < ch.num_legit(); ++k) r = std::min(r, legit_rate(k, st, dv, cfg));
  return r;
}

// Alternating loop on normalized data (sigma2 = 1).
OptimizationTrace alternate(const ChannelRealization& ch, const SystemConfig& cfg,
                            DesignVariables& dv, bool update_alpha,
                            const OptimizerOptions& opts) {
  OptimizationTrace tr;
  double prev = exact_min_rate(ch, dv, cfg);
  tr.r_min.push_back(prev);
  if (opts.keep_iterates) tr.iterates.push_back(dv);

  int t = 1;
  while (true) {
    bool ok = true;
    for (const bool alpha_block : {false, true}) {
      if (alpha_block && !update_alpha) continue;
      const AuxiliaryVariables aux = update_aux(ch, dv, cfg);
      const conic::ConicProgram cp = alpha_block
                                         ? assemble_alpha_subproblem(ch, dv, aux, cfg)
                                         : assemble_bf_subproblem(ch, dv, aux, cfg);
      const SolveResult res = solve_subproblem(cp, dv, opts.solver);
      tr.steps.push_back({t, alpha_block ? "alpha" : "bf", res.status, res.objective,
                          res.iterations});
      if (res.status != SubStatus::kOptimal) {
        ok = false;
        break;
      }
      dv = res.dv;
      clip_to_budgets(dv, ch, cfg);
    }
    if (!ok) {
      if (t == 1 && tr.shrinks < opts.max_shrinks) {
        // The start point may violate the leakage cap; back off and retry.
        for (auto& vl : dv.v) vl *= 0.5;
        dv.alpha *= 0.5;
        ++tr.shrinks;
        prev = exact_min_rate(ch, dv, cfg);
        tr.r_min.front() = prev;
        if (opts.keep_iterates) tr.iterates.front() = dv;
        continue;
      }
      tr.status = TraceStatus::kFailed;
      tr.iterations_used = t;
      return tr;
    }
    const double r = exact_min_rate(ch, dv, cfg);
    tr.r_min.push_back(r);
    if (opts.keep_iterates) tr.iterates.push_back(dv);
    tr.iterations_used = t;
    if (std::abs(r - prev) <= cfg.delta) {
      tr.status = TraceStatus::kConverged;
      return tr;
    }
    if (t >= cfg.t_max) {
      tr.status = TraceStatus::kMaxIter;
      return tr;
    }
    prev = r;
    ++t;
  }
}

RunResult finish(const ChannelRealization& ch, const SystemConfig& cfg,
                 const DesignVariables& dv_norm, OptimizationTrace tr) {
  const double s = std::sqrt(cfg.sigma2);
  RunResult out;
  out.dv = rescale(dv_norm, s);
  for (auto& it : tr.iterates) it = rescale(it, s);
  out.trace = std::move(tr);
  out.report = report(ch, out.dv, cfg);
  return out;
}

}  // namespace

RunResult run(const ChannelRealization& ch, const SystemConfig& cfg,
              SchemeId scheme, Rng& rng, const OptimizerOptions& opts,
              const RunResult* no_d2d) {
  validate(cfg);
  const SystemConfig nc = normalized(cfg);
  const double inv_s = 1.0 / std::sqrt(cfg.sigma2);

  DesignVariables dv;
  bool update_alpha = false;
  switch (scheme) {
    case SchemeId::kProposedD2D:
      dv = initialize(ch, nc);
      update_alpha = true;
      break;
    case SchemeId::kNoD2D:
      dv = initialize(ch, nc);
      dv.alpha.setZero();
      break;
    case SchemeId::kRandomD2D: {
      RunResult base;
      if (!no_d2d) {
        Rng unused(0);
        base = run(ch, cfg, SchemeId::kNoD2D, unused, opts);
        no_d2d = &base;
      }
      if (no_d2d->trace.status == TraceStatus::kFailed) {
        OptimizationTrace tr;
        tr.status = TraceStatus::kFailed;
        return finish(ch, cfg, rescale(no_d2d->dv, inv_s), std::move(tr));
      }
      dv = rescale(no_d2d->dv, inv_s);
      for (int n = 0; n < ch.num_relays(); ++n) {
        const cd a = sample_cn(rng);
        const double mag = std::abs(a);
        const cd phase = mag > 0.0 ? a / mag : cd(1.0, 0.0);
        dv.alpha(n) = phase * std::sqrt(nc.P_U / relay_rx_power(n, ch, dv, nc));
      }
      break;
    }
  }
  OptimizationTrace tr = alternate(ch, nc, dv, update_alpha, opts);
  return finish(ch, cfg, dv, std::move(tr));
}

double FeasibilityReport::worst_power_residual() const {
  double w = bs_power_residual;
  for (double r : relay_residual) w = std::max(w, r);
  return w;
}

double FeasibilityReport::worst_leakage_margin() const {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& row : leakage_margin)
    for (double v : row) w = std::min(w, v);
  return w;
}

bool FeasibilityReport::ok(double power_tol, double leak_tol) const {
  return worst_power_residual() <= power_tol && worst_leakage_margin() >= -leak_tol;
}

FeasibilityReport verify(const DesignVariables& dv, const ChannelRealization& ch,
                         const SystemConfig& cfg) {
  FeasibilityReport rep;
  rep.bs_power_residual = bs_power(dv) - cfg.P_B;
  for (int n = 0; n < ch.num_relays(); ++n)
    rep.relay_residual.push_back(std::norm(dv.alpha(n)) * relay_rx_power(n, ch, dv, cfg) -
                                 cfg.P_U);
  const StackedMatrices st = build_stacked(ch, dv, cfg);
  rep.leakage_margin.assign(ch.num_legit(), std::vector<double>(ch.num_eves()));
  for (int k = 0; k < ch.num_legit(); ++k)
    for (int m = 0; m < ch.num_eves(); ++m)
      rep.leakage_margin[k][m] = cfg.beta - leakage(k, m, st, dv, cfg);
  return rep;
}

}  // namespace d2dsec
