#ifndef WETMM_ENERGY_H_
#define WETMM_ENERGY_H_

#include <span>
#include <vector>

#include "wetmm/sysmodel.h"
#include "wetmm/types.h"

namespace wetmm {

// Decision variables of the max-min problem. All times are frame fractions.
struct ResourceAllocation {
  double ce_time = 0.0;       // channel-estimation fraction tau
  double wet_time = 0.0;      // energy-transfer fraction alpha
  double pilot_share = 0.5;   // fraction rho of harvested energy spent on pilots
  std::vector<double> energy_weights;  // xi_k, on the simplex

  double data_time() const { return 1.0 - ce_time - wet_time; }

  // Throws InvalidParameter unless tau, alpha >= 0, tau + alpha <= 1,
  // rho in [0, 1], xi >= 0 with sum 1 (1e-9) and xi has `users` entries.
  void validate(int users) const;
};

// rho is evaluated inside [kSplitFloor, 1 - kSplitFloor]; the energy and
// rate formulas are singular at the closed boundary.
inline constexpr double kSplitFloor = 1e-4;
double clamp_split(double pilot_share);

// Steady-state per-user quantities for one (params, allocation, system).
struct EnergyReport {
  std::vector<double> harvested;     // E_k
  std::vector<double> pilot_energy;  // rho E_k (0 for the ideal system)
  std::vector<double> uplink_power;  // p_k
  std::vector<double> error_var;     // sigma_{e,k}^2 (0 for the ideal system)
};

// w = sum_k sqrt(xi_k) g_hat_k / ||g_hat_k||. Not renormalized: ||w|| = 1
// holds in expectation only. Throws DegenerateChannel on a zero column.
CVector beamformer(const CMatrix& estimate, std::span<const double> weights);

// Orthonormal basis (M x (M-K)) of the orthogonal complement of the column
// span of `estimate`, from a Householder QR.
CMatrix complement_basis(const CMatrix& estimate);

// w0 = sum_k sqrt(xi'_k) g_hat_k/||g_hat_k|| + sum_i sqrt(theta_i) u_i.
// Requires M > K, all weights >= 0 and sum(xi') + sum(theta) = 1.
CVector general_beamformer(const CMatrix& estimate,
                           std::span<const double> weights,
                           std::span<const double> complement_weights);

// Expected harvested energy of one user for a given pilot energy:
//   a p xi beta M [1 - (M-1) s2 / (M (beta Lp + s2))] + a p beta (1 - xi).
double expected_harvested_energy(double pilot_energy, double wet_time,
                                 double weight, double beta, int antennas,
                                 double dl_power, double noise);

// Positive root of E = Q(rho E), i.e. the steady-state harvested energy when
// a fraction rho of it funds the next training phase. Requires rho in (0, 1)
// and alpha > 0.
double harvested_energy_fixedpoint(double wet_time, double pilot_share,
                                   double weight, double beta, int antennas,
                                   double dl_power, double noise);

// Error variance at the steady state: beta s2 / (beta rho E + s2).
double error_variance_split(double wet_time, double pilot_share, double weight,
                            double beta, int antennas, double dl_power,
                            double noise);

// p = (1 - rho) E / (1 - tau - alpha). Throws DomainError if tau + alpha >= 1.
double uplink_power(double ce_time, double wet_time, double pilot_share,
                    double energy);

// Perfect-CSI harvested energy: a p xi beta M + a p beta (1 - xi).
double ideal_energy(double wet_time, double weight, double beta, int antennas,
                    double dl_power);

// Omnidirectional broadcast (w = 1/sqrt(M)): a p beta, independent of M.
double opmm_energy(double wet_time, double beta, double dl_power);

// Large-M limit a p beta xi M.
double asymptotic_energy(double wet_time, double weight, double beta,
                         int antennas, double dl_power);

// Per-user steady state for every system. rho is clamped via clamp_split.
// For the ideal system tau and rho are ignored: no training, p = E/(1-alpha).
EnergyReport energy_report(const SystemParams& params,
                           const ResourceAllocation& alloc, System system);

}  // namespace wetmm

#endif  // WETMM_ENERGY_H_
