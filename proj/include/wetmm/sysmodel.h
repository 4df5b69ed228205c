#ifndef WETMM_SYSMODEL_H_
#define WETMM_SYSMODEL_H_

#include <cstdint>
#include <span>
#include <vector>

#include "wetmm/random.h"
#include "wetmm/types.h"

namespace wetmm {

// Physical constants of one scenario. The frame length is normalized to one,
// so every time is a frame fraction and energy over a fraction of a frame is
// numerically power x fraction.
struct SystemParams {
  int antennas = 0;                // M
  std::vector<double> path_loss;   // beta_k, one per user
  double dl_power = 1.0;           // H-AP energy transmit power [W]
  double ul_noise = 1e-15;         // noise power at the H-AP [W]
  // Receiver noise at the users [W]. Ambient noise energy is not harvested,
  // so no formula reads this value.
  double user_noise = 1e-15;

  int users() const { return static_cast<int>(path_loss.size()); }

  // Throws InvalidParameter unless M >= 2, K >= 1, powers > 0, beta_k > 0.
  void validate() const;
};

// beta_k = beta0 * d_k^(-exponent).
struct PathLossModel {
  double beta0 = 1e-3;
  double exponent = 3.0;
  std::vector<double> distances;
};

// One draw of the true channel together with its estimate. The estimation
// error is estimate - channel; its per-entry variance in column k is
// error_var[k].
struct ChannelRealization {
  CMatrix channel;
  CMatrix estimate;
  std::vector<double> error_var;
  std::uint64_t seed = 0;
};

std::vector<double> path_loss(const PathLossModel& model);

// G = H B^(1/2) with H i.i.d. CN(0, 1). Deterministic in (params, seed).
CMatrix generate_channel(const SystemParams& params, std::uint64_t seed);

// Same as generate_channel but draws from a caller-owned generator.
CMatrix generate_channel(const SystemParams& params, Rng& rng);

}  // namespace wetmm

#endif  // WETMM_SYSMODEL_H_
