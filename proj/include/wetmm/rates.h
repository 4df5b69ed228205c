#ifndef WETMM_RATES_H_
#define WETMM_RATES_H_

#include <span>
#include <vector>

#include "wetmm/energy.h"
#include "wetmm/sysmodel.h"
#include "wetmm/types.h"

namespace wetmm {

// Per-user achievable rates (bits/s/Hz) and SINRs for one evaluation.
// rate_k = (1 - tau - alpha) log2(1 + sinr_k) for WET-MM and OP-MM,
// rate_k = (1 - alpha) log2(1 + sinr_k) for the ideal system.
struct RateReport {
  std::vector<double> rate;
  std::vector<double> sinr;
  Detector detector = Detector::kZf;
  System system = System::kWetMm;
  ResourceAllocation allocation;
  // Set by MRC evaluations with K = 1: no multiuser interference. The
  // asymptotic MRC forms report an unbounded (infinite) rate in that case.
  bool interference_free = false;

  double min_rate() const;
  double max_rate() const;
};

// Finite-M lower bounds for the WET-MM system (Jensen bound on the
// ergodic rate). zf_rate requires M >= K + 1, mrc_rate M >= 2.
RateReport zf_rate(const SystemParams& params, const ResourceAllocation& alloc);
RateReport mrc_rate(const SystemParams& params, const ResourceAllocation& alloc);

// Perfect CSI at the H-AP: no training, E_k = ideal_energy.
RateReport ideal_rate(const SystemParams& params, double wet_time,
                      std::span<const double> weights, Detector detector);

// Omnidirectional powering: E_k = a p beta_k.
RateReport opmm_zf_rate(const SystemParams& params, double ce_time,
                        double wet_time, double pilot_share);
RateReport opmm_mrc_rate(const SystemParams& params, double ce_time,
                         double wet_time, double pilot_share);

// Dispatches to one of the functions above.
RateReport evaluate_rate(const SystemParams& params,
                         const ResourceAllocation& alloc, System system,
                         Detector detector);

// Large-M forms with E_k replaced by a p beta_k xi_k M.
RateReport asymptotic_zf_rate(const SystemParams& params,
                              const ResourceAllocation& alloc);
// Independent of rho. K = 1 yields an infinite rate, tagged interference-free.
RateReport asymptotic_mrc_rate(const SystemParams& params,
                               const ResourceAllocation& alloc);

// Max-min rate limit with tau -> 0, alpha -> 0 (slowly), rho* and xi*:
//   ZF:  log2(1 + M^2 p / (s2 (sqrt(K) + 1)^2 sum_i beta_i^-2))
//   MRC: log2(1 + (M - 1)/(K - 1))   (infinite for K = 1)
double maxmin_asymptotic_rate(const SystemParams& params, Detector detector);

// Large-M perfect-CSI rate with xi = xi*, per user.
RateReport ideal_asymptotic_rate(const SystemParams& params, double wet_time,
                                 Detector detector);

// SINR kernels on precomputed steady-state energies. Used by the rate
// functions above and by the grid search inner loop.
void zf_sinr(const SystemParams& params, double ce_time, double wet_time,
             double pilot_share, std::span<const double> energy,
             std::span<double> sinr);
void mrc_sinr(const SystemParams& params, double ce_time, double wet_time,
              double pilot_share, std::span<const double> energy,
              std::span<double> sinr);
void ideal_zf_sinr(const SystemParams& params, double wet_time,
                   std::span<const double> energy, std::span<double> sinr);
void ideal_mrc_sinr(const SystemParams& params, double wet_time,
                    std::span<const double> energy, std::span<double> sinr);

// Fraction of the frame used for uplink data by `system`.
double data_fraction(System system, double ce_time, double wet_time);

// Allocation-free min-rate evaluation. `scratch` must hold 2K doubles.
// Returns 0 when alpha == 0 (nothing harvested).
double min_rate(const SystemParams& params, System system, Detector detector,
                double ce_time, double wet_time, double pilot_share,
                std::span<const double> weights, std::span<double> scratch);

// Least-squares slope of rate versus log2(M), fitted over the largest decade
// of the grid (points with M >= max(M) / 10).
double mm_dorg(std::span<const double> rates, std::span<const double> antennas);

// Rate when K grows with M at load zeta = K/M:
//   log2(alpha p (1 - zeta) / (c1 s2 zeta^2)).
double large_k_rate(double load, double wet_time, double c1, double dl_power,
                    double noise);
// Unique zeta in (0, 1) with large_k_rate(zeta) = target, by bisection.
double solve_load_for_rate(double target, double wet_time, double c1,
                           double dl_power, double noise);

// c1 = (1/K) sum_i beta_i^-2 and its limit for distances uniform on
// [d_min, d_max] under beta = beta0 d^-u.
double c1_sample(std::span<const double> path_loss);
double c1_limit(double beta0, double exponent, double d_min, double d_max);

}  // namespace wetmm

#endif  // WETMM_RATES_H_
