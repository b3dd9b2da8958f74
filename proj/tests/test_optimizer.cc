#include <cmath>

#include "d2dsec/optimizer.h"
#include "doctest.h"
#include "oracles.h"

using namespace d2dsec;

namespace {

SystemConfig small() {
  SystemConfig cfg;
  cfg.M = 2;
  cfg.K_L = 4;
  cfg.K_E = 2;
  cfg.N = 1;
  cfg.beta = 0.5;
  return cfg;
}

}  // namespace

TEST_CASE("scheme names") {
  for (SchemeId s : {SchemeId::kProposedD2D, SchemeId::kNoD2D, SchemeId::kRandomD2D})
    CHECK(parse_scheme(to_string(s)) == s);
  CHECK_THROWS_AS(parse_scheme("Proposed"), ConfigError);
}

TEST_CASE("initializer") {
  SystemConfig cfg = small();
  int exceed = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto ch = draw_realization(cfg, seed);
    const DesignVariables dv = initialize(ch, cfg);
    CHECK(bs_power(dv) <= cfg.P_B * (1.0 + 1e-12));
    CHECK(bs_power(dv) == doctest::Approx(cfg.P_B));
    CHECK(std::norm(dv.alpha(0)) * relay_rx_power(0, ch, dv, cfg) ==
          doctest::Approx(cfg.P_U / 2.0));
    if (verify(dv, ch, cfg).worst_leakage_margin() < 0.0) ++exceed;
  }
  // The start point ignores the leakage cap; many realizations violate it.
  MESSAGE("initializer exceeds beta on " << exceed << " of 100 realizations");
  CHECK(exceed > 0);

  cfg.P_B = 0.0;
  const auto ch = draw_realization(cfg, 1);
  const DesignVariables zero = initialize(ch, cfg);
  CHECK(bs_power(zero) == 0.0);
}

TEST_CASE("huge delta stops after one iteration") {
  SystemConfig cfg = small();
  cfg.delta = 1e6;
  const auto ch = draw_realization(cfg, 2);
  Rng rng(2);
  const RunResult r = run(ch, cfg, SchemeId::kProposedD2D, rng);
  CHECK(r.trace.status == TraceStatus::kConverged);
  CHECK(r.trace.iterations_used == 1);
  CHECK(r.trace.r_min.size() == 2);
}

TEST_CASE("proposed traces are monotone and feasible") {
  const SystemConfig cfg = small();
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto ch = draw_realization(cfg, seed);
    Rng rng(seed);
    OptimizerOptions opts;
    opts.keep_iterates = true;
    const RunResult r = run(ch, cfg, SchemeId::kProposedD2D, rng, opts);
    REQUIRE(r.trace.status == TraceStatus::kConverged);
    CHECK(r.trace.iterates.size() == r.trace.r_min.size());
    for (std::size_t t = 2; t < r.trace.r_min.size(); ++t)
      CHECK(r.trace.r_min[t] >= r.trace.r_min[t - 1] - 1e-5);
    const FeasibilityReport f = verify(r.dv, ch, cfg);
    CHECK(f.worst_power_residual() <= 1e-6);
    CHECK(f.worst_leakage_margin() >= -1e-5);
    CHECK(r.report.R_min == doctest::Approx(r.trace.r_min.back()).epsilon(1e-9));
  }
}

TEST_CASE("baselines") {
  const SystemConfig cfg = small();
  const auto ch = draw_realization(cfg, 5);
  Rng rng(5);
  const RunResult none = run(ch, cfg, SchemeId::kNoD2D, rng);
  REQUIRE(none.trace.status == TraceStatus::kConverged);
  CHECK(none.dv.alpha.norm() == 0.0);
  for (const auto& s : none.trace.steps) CHECK(s.block == "bf");

  Rng a(9), b(9);
  const RunResult r1 = run(ch, cfg, SchemeId::kRandomD2D, a, {}, &none);
  const RunResult r2 = run(ch, cfg, SchemeId::kRandomD2D, b);
  CHECK(r1.report.R_min == r2.report.R_min);
  CHECK(std::abs(r1.dv.alpha(0)) > 0.0);
  for (const auto& s : r1.trace.steps) CHECK(s.block == "bf");
  CHECK(verify(r1.dv, ch, cfg).ok(1e-6, 1e-5));
}

TEST_CASE("no-relay single user reaches the matched-filter rate") {
  SystemConfig cfg;
  cfg.M = 3;
  cfg.K_L = 1;
  cfg.K_E = 0;
  cfg.N = 1;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto ch = draw_realization(cfg, seed);
    Rng rng(seed);
    const RunResult r = run(ch, cfg, SchemeId::kNoD2D, rng);
    REQUIRE(r.trace.status != TraceStatus::kFailed);
    const double target = std::log2(1.0 + cfg.P_B * ch.h[0].squaredNorm() / cfg.sigma2);
    CHECK(std::abs(r.report.R_min - target) < 1e-3);
  }
}

TEST_CASE("results do not depend on the noise unit") {
  SystemConfig cfg = small();
  const auto ch = draw_realization(cfg, 7);
  SystemConfig scaled = cfg;
  scaled.P_B *= 100.0;
  scaled.P_U *= 100.0;
  scaled.sigma2 *= 100.0;
  Rng a(1), b(1);
  const RunResult r1 = run(ch, cfg, SchemeId::kProposedD2D, a);
  const RunResult r2 = run(ch, scaled, SchemeId::kProposedD2D, b);
  CHECK(r1.report.R_min == doctest::Approx(r2.report.R_min).epsilon(1e-6));
}

TEST_CASE("rates are invariant under a common power scale") {
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const auto ch = oracle::random_channels(2, 3, 2, 2, rng);
    SystemConfig cfg = small();
    cfg.K_L = 3;
    cfg.N = 2;
    cfg.sigma2 = 0.7;
    const DesignVariables dv = oracle::random_design(2, 3, 2, 1.0, rng);
    const double kappa = 0.1 + rep;
    SystemConfig c2 = cfg;
    c2.sigma2 *= kappa;
    c2.P_B *= kappa;
    c2.P_U *= kappa;
    DesignVariables d2 = dv;
    for (auto& v : d2.v) v *= std::sqrt(kappa);
    d2.Qtilde *= std::sqrt(kappa);
    const RateReport a = report(ch, dv, cfg);
    const RateReport b = report(ch, d2, c2);
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(a.R[k] - b.R[k]) < 1e-10);
      for (int m = 0; m < 2; ++m) CHECK(std::abs(a.leak[k][m] - b.leak[k][m]) < 1e-10);
    }
    const FeasibilityReport f1 = verify(dv, ch, cfg), f2 = verify(d2, ch, c2);
    CHECK(f2.bs_power_residual == doctest::Approx(kappa * f1.bs_power_residual));
    CHECK(f2.relay_residual[1] == doctest::Approx(kappa * f1.relay_residual[1]));
  }
}

TEST_CASE("verify") {
  SystemConfig cfg = small();
  const auto ch = draw_realization(cfg, 4);
  const FeasibilityReport z = verify(zero_design(cfg), ch, cfg);
  CHECK(z.bs_power_residual == -cfg.P_B);
  CHECK(z.relay_residual[0] == -cfg.P_U);
  for (const auto& row : z.leakage_margin)
    for (double m : row) CHECK(m == cfg.beta);
  CHECK(z.ok(0.0, 0.0));

  DesignVariables dv = initialize(ch, cfg);
  const double s = std::sqrt(1.01 * cfg.P_B / bs_power(dv));
  for (auto& v : dv.v) v *= s;
  dv.Qtilde *= s;
  const FeasibilityReport f = verify(dv, ch, cfg);
  CHECK(f.bs_power_residual == doctest::Approx(0.01 * cfg.P_B));
  CHECK_FALSE(f.ok(1e-6, 1e9));
}
