#ifndef WETMM_ESTIMATION_H_
#define WETMM_ESTIMATION_H_

#include <cstdint>
#include <span>
#include <vector>

#include "wetmm/random.h"
#include "wetmm/sysmodel.h"
#include "wetmm/types.h"

namespace wetmm {

// Orthogonal uplink pilots. `energy[k]` is the total pilot energy of user k
// (pilot length times per-symbol pilot power); `phi` is L x K with
// orthonormal columns.
struct PilotConfig {
  int length = 0;
  std::vector<double> energy;
  CMatrix phi;
};

// First K columns of the L-point unitary DFT matrix.
PilotConfig make_pilots(int length, int users, std::vector<double> energy);

// Y_p = G (Phi D^(1/2))^T + N, N i.i.d. CN(0, noise).
CMatrix receive_pilots(const CMatrix& channel, const PilotConfig& pilots,
                       double noise, std::uint64_t seed);
CMatrix receive_pilots(const CMatrix& channel, const PilotConfig& pilots,
                       double noise, Rng& rng);

// MMSE estimate  G_hat = Y_p Phi^* (B D + noise I)^(-1) D^(1/2) B.
CMatrix mmse_estimate(const CMatrix& received, const PilotConfig& pilots,
                      std::span<const double> path_loss, double noise);

// Per-entry variance of the MMSE error for one user:
//   beta / (1 + beta * pilot_energy / noise), always in (0, beta].
double error_variance(double beta, double pilot_energy, double noise);

// How the channel estimate is produced in a Monte Carlo trial.
//   kFullPilot:   draw G, simulate the training phase, apply the MMSE filter.
//   kStatistical: draw G_hat and the error directly from their Gaussian laws.
// Both produce the same joint law of (G, G_hat).
enum class ChannelPath { kFullPilot, kStatistical };

ChannelRealization draw_realization(const SystemParams& params,
                                    std::span<const double> pilot_energy,
                                    ChannelPath path, std::uint64_t seed);

}  // namespace wetmm

#endif  // WETMM_ESTIMATION_H_
