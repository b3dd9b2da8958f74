#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "d2dsec/types.h"

namespace d2dsec {

struct NodePositions {
  Point2 bs;
  std::vector<Point2> legit;
  std::vector<Point2> eve;
};

/// Every complex gain of one scenario plus the set of D2D transmitters.
struct ChannelRealization {
  std::vector<CVec> h;  // BS -> legitimate user k, length M each
  std::vector<CVec> g;  // BS -> eavesdropper m
  CMat h_d2d;           // K_L x K_L, (k, j): user j -> user k; diagonal unused
  CMat g_d2d;           // K_E x K_L, (m, j): user j -> eavesdropper m
  // relays[n] is the user transmitting on D2D channel n.
  std::vector<int> relays;
  // n_of[k] is the D2D channel user k transmits on, if any.
  std::vector<std::optional<int>> n_of;

  int num_legit() const { return static_cast<int>(h.size()); }
  int num_eves() const { return static_cast<int>(g.size()); }
  int num_relays() const { return static_cast<int>(relays.size()); }
};

/// c0 * (d / d0)^(-eta). Throws std::domain_error for d <= 0.
double path_gain(double d, const SystemConfig& cfg);

/// Uniform positions inside the two squares; the BS sits at legit_center.
NodePositions sample_geometry(const SystemConfig& cfg, Rng& rng);

/// N distinct users drawn uniformly without replacement.
std::vector<int> select_relays(const SystemConfig& cfg, Rng& rng);

/// Rayleigh-faded gains over the path-loss model, followed by a relay draw.
ChannelRealization sample_channels(const NodePositions& pos,
                                   const SystemConfig& cfg, Rng& rng);

/// Geometry and channels from a single seed.
ChannelRealization draw_realization(const SystemConfig& cfg,
                                    std::uint64_t seed);

/// Unit-variance circularly symmetric complex Gaussian sample.
cd sample_cn(Rng& rng);

/// Rebuilds n_of from relays; throws ConfigError on duplicates or bad ids.
void index_relays(ChannelRealization& ch);

/// FNV-1a hash over every gain and relay index.
std::uint64_t fingerprint(const ChannelRealization& ch);

}  // namespace d2dsec
