#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "raca/linalg.hpp"

namespace raca {

struct SystemConfig;

/// Node placement in meters. UE at the origin, relay on the UE-relay axis,
/// AP at the stated perpendicular distance.
struct Geometry {
  double d_ua_m = 10.0;
  double d_ur_m = 1.0;
  double d_ra_m = 10.04987562112089;  // sqrt(d_ua^2 + d_ur^2) for the defaults
};

enum class PathLossModel { inh_nlos, inh_los };

/// Indoor-hotspot path loss in dB. distance_m >= 1, fc_ghz > 0.
/// The NLOS value is the max of the LOS fit and the NLOS-prime fit.
double path_loss_db(double distance_m, double fc_ghz,
                    PathLossModel model = PathLossModel::inh_nlos);

/// One Monte Carlo draw of every link matrix the toolkit needs.
/// Entries are i.i.d. circularly-symmetric complex Gaussian scaled by the
/// link's amplitude gain sqrt(10^(-PL/10)).
struct ChannelSet {
  CMatrix h_ua_fl;  // N_a x N_u, UE->AP on the low band
  CMatrix h_ur_fh;  // N_r x N_u, UE->relay on the high band
  CMatrix h_ra_fl;  // N_a x N_r, relay->AP on the low band
  CMatrix h_ua_fh;  // N_a x N_u, UE->AP on the high band (carrier aggregation)
  CMatrix h_ur_fl;  // N_r x N_u, UE->relay on the low band (relay-only uplink)
  std::uint64_t seed = 0;
};

/// Deterministic stream of doubles / normals keyed by (seed, stream id).
/// Independent ids give independent sequences; the generator is a splitmix64
/// state walk, so results do not depend on platform or thread count.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t next_u64();
  double uniform();  // [0, 1)
  double normal();   // standard normal (Marsaglia polar)
  Complex cnormal(); // CN(0, 1)

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// rows x cols matrix of i.i.d. CN(0,1) entries, filled row by row.
CMatrix rayleigh_matrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng);

/// Draws all five link matrices for one trial. Bit-identical for equal
/// (config, seed); each link uses its own substream.
ChannelSet generate_channels(const SystemConfig& config, std::uint64_t seed);

/// JSON round trip; complex entries serialized as [re, im] pairs row by row.
std::string channelset_to_json(const ChannelSet& ch);
ChannelSet channelset_from_json(const std::string& text);

}  // namespace raca
