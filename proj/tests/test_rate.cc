#include <cmath>
#include <random>

#include "d2dsec/rate_model.h"
#include "doctest.h"
#include "oracles.h"

using namespace d2dsec;

namespace {

SystemConfig shape(int M, int K_L, int K_E, int N, double sigma2 = 1.0) {
  SystemConfig cfg;
  cfg.M = M;
  cfg.K_L = K_L;
  cfg.K_E = K_E;
  cfg.N = N;
  cfg.sigma2 = sigma2;
  return cfg;
}

double min_eig(const CMat& C) {
  Eigen::SelfAdjointEigenSolver<CMat> es(C);
  return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("stacked matrices with alpha = 0") {
  Rng rng(1);
  const auto ch = oracle::random_channels(3, 4, 2, 2, rng);
  const SystemConfig cfg = shape(3, 4, 2, 2);
  auto dv = oracle::random_design(3, 4, 2, 1.0, rng);
  dv.alpha.setZero();
  const StackedMatrices st = build_stacked(ch, dv, cfg);
  for (int k = 0; k < 4; ++k) {
    CHECK(st.Hbar[k].row(0).isApprox(ch.h[k].adjoint()));
    CHECK(st.Hbar[k].bottomRows(2).norm() == 0.0);
    CHECK(st.ZL[k].norm() == 0.0);
  }
  for (int m = 0; m < 2; ++m) {
    CHECK(st.Gbar[m].bottomRows(2).norm() == 0.0);
    CHECK(st.ZE[m].norm() == 0.0);
  }
}

TEST_CASE("stacked matrices zero the relay's own row") {
  Rng rng(2);
  const auto ch = oracle::random_channels(2, 3, 1, 2, rng);
  const SystemConfig cfg = shape(2, 3, 1, 2);
  const auto dv = oracle::random_design(2, 3, 2, 1.0, rng);
  const StackedMatrices st = build_stacked(ch, dv, cfg);
  for (int n = 0; n < 2; ++n) {
    const int j = ch.relays[n];
    CHECK(st.Hbar[j].row(n + 1).norm() == 0.0);
    CHECK(st.ZL[j](n + 1) == 0.0);
    CHECK(st.ZE[0](n + 1) > 0.0);
  }
  for (int k = 0; k < 3; ++k) CHECK(st.ZL[k](0) == 0.0);
}

TEST_CASE("stacked matrices reproduce the signal chain") {
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const int M = 1 + rep % 4, K_L = 1 + (rep / 4) % 4, N = rep % (K_L + 1) % 3;
    const auto ch = oracle::random_channels(M, K_L, 2, N, rng);
    const SystemConfig cfg = shape(M, K_L, 2, N, 0.7);
    const auto dv = oracle::random_design(M, K_L, N, 1.0, rng);
    const StackedMatrices st = build_stacked(ch, dv, cfg);
    for (int k = 0; k < K_L; ++k) {
      const auto sc = oracle::signal_chain(k, false, ch, dv);
      for (int l = 0; l < K_L; ++l)
        CHECK((st.Hbar[k] * dv.v[l] - sc.data.col(l)).norm() < 1e-12);
      CHECK((st.Hbar[k] * dv.Qtilde - sc.an).norm() < 1e-12);
      for (int n = 0; n < N; ++n)
        CHECK(st.ZL[k](n + 1) == doctest::Approx(0.7 * std::norm(sc.relay_noise(n + 1, n))));
    }
    for (int m = 0; m < 2; ++m) {
      const auto sc = oracle::signal_chain(m, true, ch, dv);
      for (int l = 0; l < K_L; ++l)
        CHECK((st.Gbar[m] * dv.v[l] - sc.data.col(l)).norm() < 1e-12);
      for (int n = 0; n < N; ++n)
        CHECK(st.ZE[m](n + 1) == doctest::Approx(0.7 * std::norm(sc.relay_noise(n + 1, n))));
    }
  }
}

TEST_CASE("legit_rate examples") {
  SystemConfig cfg = shape(2, 1, 0, 0);
  ChannelRealization ch;
  ch.h = {CVec::Zero(2)};
  ch.h[0] << cd(1.0, 0.0), cd(0.0, 0.0);
  ch.h_d2d = CMat::Zero(1, 1);
  ch.g_d2d = CMat::Zero(0, 1);
  index_relays(ch);
  DesignVariables dv = zero_design(cfg);
  dv.v[0] << 1.0, 0.0;
  CHECK(legit_rate(0, ch, dv, cfg) == doctest::Approx(1.0).epsilon(1e-14));
  dv.v[0].setZero();
  CHECK(legit_rate(0, ch, dv, cfg) == 0.0);
}

TEST_CASE("leakage examples") {
  Rng rng(4);
  auto ch = oracle::random_channels(2, 3, 1, 1, rng);
  const SystemConfig cfg = shape(2, 3, 1, 1);
  auto dv = oracle::random_design(2, 3, 1, 1.0, rng);
  CHECK(leakage(0, 0, ch, dv, cfg) > 0.0);
  ch.g[0].setZero();
  dv.alpha.setZero();
  CHECK(leakage(0, 0, ch, dv, cfg) == doctest::Approx(0.0).epsilon(1e-15));
  dv = oracle::random_design(2, 3, 1, 1.0, rng);
  dv.v[1].setZero();
  CHECK(leakage(1, 0, ch, dv, cfg) == 0.0);
}

TEST_CASE("rates match independent oracles") {
  Rng rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    std::uniform_int_distribution<int> dm(1, 4), dk(1, 4);
    const int M = dm(rng), K_L = dk(rng);
    const int N = std::uniform_int_distribution<int>(0, std::min(2, K_L))(rng);
    const double sigma2 = std::uniform_real_distribution<double>(0.2, 3.0)(rng);
    const auto ch = oracle::random_channels(M, K_L, 2, N, rng);
    const SystemConfig cfg = shape(M, K_L, 2, N, sigma2);
    const auto dv = oracle::random_design(M, K_L, N, 1.0, rng);
    const StackedMatrices st = build_stacked(ch, dv, cfg);
    for (int k = 0; k < K_L; ++k) {
      const double r = legit_rate(k, st, dv, cfg);
      CHECK(std::abs(r - mi_oracle(st.Hbar[k] * dv.v[k], legit_covariance(k, st, dv, cfg))) < 1e-9);
      CHECK(std::abs(r - oracle::chain_rate(k, oracle::signal_chain(k, false, ch, dv), sigma2)) < 1e-9);
      for (int m = 0; m < 2; ++m) {
        const double f = leakage(k, m, st, dv, cfg);
        CHECK(std::abs(f - mi_oracle(st.Gbar[m] * dv.v[k], eve_covariance(k, m, st, dv, cfg))) < 1e-9);
        CHECK(std::abs(f - oracle::chain_rate(k, oracle::signal_chain(m, true, ch, dv), sigma2)) < 1e-9);
      }
    }
  }
}

TEST_CASE("mi_oracle") {
  CHECK(mi_oracle(CVec::Zero(3), CMat::Identity(3, 3)) == 0.0);
  CVec U(3);
  U << 1.0, cd(0.0, 1.0), 1.0;
  CHECK(mi_oracle(U, CMat::Identity(3, 3)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(mi_oracle(U, -CMat::Identity(3, 3)), std::domain_error);

  Rng rng(6);
  for (int rep = 0; rep < 100; ++rep) {
    const int P = 1 + rep % 4;
    CMat X(P, P);
    CVec u(P);
    for (int i = 0; i < P; ++i) {
      u(i) = sample_cn(rng);
      for (int j = 0; j < P; ++j) X(i, j) = sample_cn(rng);
    }
    const CMat C = X * X.adjoint() + 0.1 * CMat::Identity(P, P);
    const double lemma = std::log2(1.0 + u.dot(C.ldlt().solve(u)).real());
    CHECK(std::abs(mi_oracle(u, C) - lemma) < 1e-10);
  }
}

TEST_CASE("relay_rx_power") {
  SystemConfig cfg = shape(2, 1, 0, 1);
  ChannelRealization ch;
  ch.h = {CVec::Zero(2)};
  ch.h[0] << 1.0, 1.0;
  ch.h_d2d = CMat::Zero(1, 1);
  ch.g_d2d = CMat::Zero(0, 1);
  ch.relays = {0};
  index_relays(ch);
  DesignVariables dv = zero_design(cfg);
  CHECK(relay_rx_power(0, ch, dv, cfg) == 1.0);
  dv.v[0] << 1.0, 0.0;
  dv.v[0] *= std::sqrt(2.0);
  CHECK(relay_rx_power(0, ch, dv, cfg) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("relay_rx_power matches Monte Carlo signal power") {
  Rng rng(7);
  const auto ch = oracle::random_channels(3, 3, 0, 1, rng);
  const SystemConfig cfg = shape(3, 3, 0, 1, 0.8);
  const auto dv = oracle::random_design(3, 3, 1, 1.0, rng);
  const CVec& h = ch.h[ch.relays[0]];
  double acc = 0.0;
  const int n = 100000;
  for (int t = 0; t < n; ++t) {
    CVec x = CVec::Zero(3);
    for (const auto& vl : dv.v) x += vl * sample_cn(rng);
    for (int i = 0; i < 3; ++i) x += dv.Qtilde.col(i) * sample_cn(rng);
    const cd y = h.dot(x) + std::sqrt(0.8) * sample_cn(rng);
    acc += std::norm(y);
  }
  CHECK(std::abs(acc / n / relay_rx_power(0, ch, dv, cfg) - 1.0) < 0.02);
}

TEST_CASE("report") {
  Rng rng(8);
  const auto ch = oracle::random_channels(2, 4, 2, 1, rng);
  SystemConfig cfg = shape(2, 4, 2, 1);
  cfg.beta = 0.2;
  const auto dv = oracle::random_design(2, 4, 1, 1.0, rng);
  const RateReport rep = report(ch, dv, cfg);
  for (int k = 0; k < 4; ++k) {
    CHECK(rep.R_min <= rep.R[k]);
    CHECK(rep.R_sec[k] == std::max(rep.R[k] - 0.2, 0.0));
    CHECK(rep.R_sec_min <= rep.R_sec[k]);
    for (int m = 0; m < 2; ++m) CHECK(rep.leak[k][m] >= 0.0);
  }

  // Per-user examples for the clipping rule.
  SystemConfig one = shape(1, 1, 0, 0);
  one.beta = 0.2;
  ChannelRealization single;
  single.h = {CVec::Ones(1)};
  single.h_d2d = CMat::Zero(1, 1);
  single.g_d2d = CMat::Zero(0, 1);
  index_relays(single);
  DesignVariables d = zero_design(one);
  d.v[0](0) = std::sqrt(std::exp2(0.5) - 1.0);
  CHECK(report(single, d, one).R_sec[0] == doctest::Approx(0.3).epsilon(1e-12));
  d.v[0](0) = std::sqrt(std::exp2(0.1) - 1.0);
  CHECK(report(single, d, one).R_sec[0] == 0.0);
}

TEST_CASE("rate is non-increasing in noise") {
  Rng rng(9);
  for (int rep = 0; rep < 30; ++rep) {
    const auto ch = oracle::random_channels(2, 3, 1, 1, rng);
    const auto dv = oracle::random_design(2, 3, 1, 1.0, rng);
    for (int k = 0; k < 3; ++k) {
      double prev = INFINITY;
      for (double s2 : {0.1, 0.3, 1.0, 3.0, 10.0}) {
        const double r = legit_rate(k, ch, dv, shape(2, 3, 1, 1, s2));
        CHECK(r <= prev + 1e-12);
        prev = r;
      }
    }
  }
}

TEST_CASE("alpha = 0 collapses to the MISO SINR rate") {
  Rng rng(10);
  for (int rep = 0; rep < 50; ++rep) {
    const auto ch = oracle::random_channels(3, 4, 1, 2, rng);
    const SystemConfig cfg = shape(3, 4, 1, 2, 0.5);
    auto dv = oracle::random_design(3, 4, 2, 1.0, rng);
    dv.alpha.setZero();
    for (int k = 0; k < 4; ++k)
      CHECK(std::abs(legit_rate(k, ch, dv, cfg) - oracle::miso_rate(k, ch, dv, 0.5)) < 1e-10);
  }
}

TEST_CASE("covariances are Hermitian with eigenvalues above the noise floor") {
  Rng rng(11);
  for (int rep = 0; rep < 30; ++rep) {
    const auto ch = oracle::random_channels(2, 3, 2, 2, rng);
    const SystemConfig cfg = shape(2, 3, 2, 2, 0.4);
    const auto dv = oracle::random_design(2, 3, 2, 1.0, rng);
    const StackedMatrices st = build_stacked(ch, dv, cfg);
    for (int k = 0; k < 3; ++k) {
      const CMat C = legit_covariance(k, st, dv, cfg);
      CHECK((C - C.adjoint()).norm() < 1e-14);
      CHECK(min_eig(C) >= 0.4 - 1e-12);
      for (int m = 0; m < 2; ++m) CHECK(min_eig(eve_covariance(k, m, st, dv, cfg)) >= 0.4 - 1e-12);
      CHECK(st.ZL[k].minCoeff() >= 0.0);
    }
  }
}
