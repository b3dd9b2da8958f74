#include "d2dsec/channel_model.h"

#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

namespace d2dsec {

void validate(const SystemConfig& cfg) {
  std::ostringstream err;
  if (cfg.M < 1) err << "M must be positive; ";
  if (cfg.K_L < 1) err << "K_L must be positive; ";
  if (cfg.K_E < 0) err << "K_E must be non-negative; ";
  if (cfg.N < 0) err << "N must be non-negative; ";
  if (cfg.N > cfg.K_L) err << "N must not exceed K_L; ";
  if (!(cfg.P_B >= 0.0)) err << "P_B must be non-negative; ";
  if (!(cfg.P_U >= 0.0)) err << "P_U must be non-negative; ";
  if (!(cfg.sigma2 > 0.0)) err << "sigma2 must be positive; ";
  if (!(cfg.beta >= 0.0)) err << "beta must be non-negative; ";
  if (!(cfg.c0 > 0.0)) err << "c0 must be positive; ";
  if (!(cfg.d0 > 0.0)) err << "d0 must be positive; ";
  if (!(cfg.eta >= 0.0)) err << "eta must be non-negative; ";
  if (!(cfg.area_side >= 0.0)) err << "area_side must be non-negative; ";
  if (!(cfg.min_distance > 0.0)) err << "min_distance must be positive; ";
  if (!(cfg.delta >= 0.0)) err << "delta must be non-negative; ";
  if (cfg.t_max < 1) err << "t_max must be at least 1; ";
  const std::string msg = err.str();
  if (!msg.empty()) throw ConfigError("invalid SystemConfig: " + msg);
}

double path_gain(double d, const SystemConfig& cfg) {
  if (!(d > 0.0)) throw std::domain_error("path_gain: distance must be > 0");
  return cfg.c0 * std::pow(d / cfg.d0, -cfg.eta);
}

cd sample_cn(Rng& rng) {
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  const double re = half(rng);
  const double im = half(rng);
  return {re, im};
}

namespace {

Point2 uniform_in_square(const Point2& center, double side, Rng& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const double dx = u(rng) * side;
  const double dy = u(rng) * side;
  return {center.x + dx, center.y + dy};
}

double link_gain(const Point2& a, const Point2& b, const SystemConfig& cfg) {
  return path_gain(std::max(distance(a, b), cfg.min_distance), cfg);
}

}  // namespace

NodePositions sample_geometry(const SystemConfig& cfg, Rng& rng) {
  NodePositions pos;
  pos.bs = cfg.legit_center;
  pos.legit.reserve(cfg.K_L);
  for (int k = 0; k < cfg.K_L; ++k)
    pos.legit.push_back(uniform_in_square(cfg.legit_center, cfg.area_side, rng));
  pos.eve.reserve(cfg.K_E);
  for (int m = 0; m < cfg.K_E; ++m)
    pos.eve.push_back(uniform_in_square(cfg.eve_center, cfg.area_side, rng));
  return pos;
}

std::vector<int> select_relays(const SystemConfig& cfg, Rng& rng) {
  if (cfg.N < 0 || cfg.N > cfg.K_L)
    throw ConfigError("select_relays: need 0 <= N <= K_L");
  std::vector<int> pool(cfg.K_L);
  std::iota(pool.begin(), pool.end(), 0);
  // Partial Fisher-Yates: the first N slots are a uniform ordered sample.
  for (int i = 0; i < cfg.N; ++i) {
    std::uniform_int_distribution<int> pick(i, cfg.K_L - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(cfg.N);
  return pool;
}

void index_relays(ChannelRealization& ch) {
  const int K_L = ch.num_legit();
  ch.n_of.assign(K_L, std::nullopt);
  for (int n = 0; n < ch.num_relays(); ++n) {
    const int j = ch.relays[n];
    if (j < 0 || j >= K_L) throw ConfigError("relay index out of range");
    if (ch.n_of[j]) throw ConfigError("duplicate relay index");
    ch.n_of[j] = n;
  }
}

ChannelRealization sample_channels(const NodePositions& pos,
                                   const SystemConfig& cfg, Rng& rng) {
  const int K_L = static_cast<int>(pos.legit.size());
  const int K_E = static_cast<int>(pos.eve.size());
  ChannelRealization ch;
  ch.h.reserve(K_L);
  for (int k = 0; k < K_L; ++k) {
    const double a = std::sqrt(link_gain(pos.bs, pos.legit[k], cfg));
    CVec hk(cfg.M);
    for (int i = 0; i < cfg.M; ++i) hk(i) = a * sample_cn(rng);
    ch.h.push_back(std::move(hk));
  }
  ch.g.reserve(K_E);
  for (int m = 0; m < K_E; ++m) {
    const double a = std::sqrt(link_gain(pos.bs, pos.eve[m], cfg));
    CVec gm(cfg.M);
    for (int i = 0; i < cfg.M; ++i) gm(i) = a * sample_cn(rng);
    ch.g.push_back(std::move(gm));
  }
  ch.h_d2d = CMat::Zero(K_L, K_L);
  for (int k = 0; k < K_L; ++k) {
    for (int j = 0; j < K_L; ++j) {
      if (j == k) continue;
      ch.h_d2d(k, j) =
          std::sqrt(link_gain(pos.legit[j], pos.legit[k], cfg)) * sample_cn(rng);
    }
  }
  ch.g_d2d = CMat::Zero(K_E, K_L);
  for (int m = 0; m < K_E; ++m) {
    for (int j = 0; j < K_L; ++j) {
      ch.g_d2d(m, j) =
          std::sqrt(link_gain(pos.legit[j], pos.eve[m], cfg)) * sample_cn(rng);
    }
  }
  ch.relays = select_relays(cfg, rng);
  index_relays(ch);
  return ch;
}

ChannelRealization draw_realization(const SystemConfig& cfg,
                                    std::uint64_t seed) {
  validate(cfg);
  Rng rng(seed);
  const NodePositions pos = sample_geometry(cfg, rng);
  return sample_channels(pos, cfg, rng);
}

namespace {

struct Fnv1a {
  std::uint64_t state = 1469598103934665603ULL;
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      state ^= b[i];
      state *= 1099511628211ULL;
    }
  }
  void value(double x) { bytes(&x, sizeof x); }
  void value(cd z) {
    value(z.real());
    value(z.imag());
  }
};

}  // namespace

std::uint64_t fingerprint(const ChannelRealization& ch) {
  Fnv1a f;
  for (const auto& hk : ch.h)
    for (Eigen::Index i = 0; i < hk.size(); ++i) f.value(hk(i));
  for (const auto& gm : ch.g)
    for (Eigen::Index i = 0; i < gm.size(); ++i) f.value(gm(i));
  for (Eigen::Index i = 0; i < ch.h_d2d.size(); ++i) f.value(ch.h_d2d(i));
  for (Eigen::Index i = 0; i < ch.g_d2d.size(); ++i) f.value(ch.g_d2d(i));
  for (int j : ch.relays) f.bytes(&j, sizeof j);
  return f.state;
}

}  // namespace d2dsec
