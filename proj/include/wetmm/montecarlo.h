#ifndef WETMM_MONTECARLO_H_
#define WETMM_MONTECARLO_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wetmm/energy.h"
#include "wetmm/estimation.h"
#include "wetmm/sysmodel.h"
#include "wetmm/types.h"

namespace wetmm {

struct McConfig {
  int trials = 1000;
  std::uint64_t seed = 1;
  ChannelPath path = ChannelPath::kStatistical;
  Detector detector = Detector::kZf;
  System system = System::kWetMm;
  // 0 = std::thread::hardware_concurrency(). Results do not depend on it.
  int threads = 0;
};

// One simulated frame.
struct FrameSample {
  std::vector<double> energy;  // alpha p |g_k^H w|^2
  std::vector<double> sinr;    // instantaneous SINR of the linear detector
  int redraws = 0;             // singular ZF Gram matrices that were redrawn
};

// Instantaneous SINR of user k after the linear detector A (ZF or MRC) built
// from `estimate`, treating estimate-error leakage and noise as Gaussian:
//
//   p_k |a_k^H g_k|^2 / (sum_{i!=k} p_i |a_k^H g_i|^2
//                        + ||a_k||^2 (sum_i p_i s_{e,i}^2 + s2))
//
// with g_i the estimated columns. Returns nullopt if the ZF Gram matrix is
// numerically singular.
std::optional<std::vector<double>> detector_sinr(
    const CMatrix& estimate, std::span<const double> error_var,
    std::span<const double> power, double noise, Detector detector);

// Draws a frame for trial `trial`: channel, estimate (pilot energy rho E_k at
// the steady state), beamformer, harvested-energy samples, detector and SINR.
// Deterministic in (cfg.seed, trial).
FrameSample simulate_frame(const SystemParams& params,
                           const ResourceAllocation& alloc,
                           const McConfig& cfg, std::int64_t trial);

struct McEstimate {
  std::vector<double> mean;
  std::vector<double> std_error;
  int trials = 0;
  int redraws = 0;
};

// Per-user sample mean of (data fraction) * log2(1 + SINR) with its standard
// error (0 for a single trial).
McEstimate estimate_exact_rate(const SystemParams& params,
                               const ResourceAllocation& alloc,
                               const McConfig& cfg);

// Per-user sample mean of the harvested-energy samples.
McEstimate estimate_harvested_energy(const SystemParams& params,
                                     const ResourceAllocation& alloc,
                                     const McConfig& cfg);

enum class BoundVerdict { kHolds, kViolated, kInconclusive };

struct BoundCheck {
  double exact = 0.0;       // MC ergodic rate
  double exact_se = 0.0;
  double bound = 0.0;       // closed-form lower bound
  double gap = 0.0;         // exact - bound
  double relative_gap = 0.0;
  BoundVerdict verdict = BoundVerdict::kInconclusive;
};

// Below this many trials no verdict is issued.
inline constexpr int kMinTrialsForVerdict = 30;

// Holds when gap >= -3 SE. Inconclusive when trials < kMinTrialsForVerdict.
std::vector<BoundCheck> verify_bound_tightness(const SystemParams& params,
                                               const ResourceAllocation& alloc,
                                               const McConfig& cfg);

struct BeamformerComparison {
  double structured = 0.0;     // mean energy, weights xi
  double structured_se = 0.0;
  double general = 0.0;        // mean energy, (1 - theta) xi plus complement
  double general_se = 0.0;
  double difference = 0.0;     // paired mean of structured - general
  double difference_se = 0.0;
};

// Harvested energy of the structured beamformer versus a general one that
// puts mass `theta_mass` on the orthogonal complement of the estimates
// (spread evenly over an orthonormal basis) and (1 - theta_mass) xi on the
// estimate directions. Both use the same channel draws. WET-MM only.
std::vector<BeamformerComparison> verify_beamformer_structure(
    const SystemParams& params, const ResourceAllocation& alloc,
    double theta_mass, const McConfig& cfg);

// One closed-form quantity checked against its sample estimate.
struct ValidationRow {
  std::string quantity;  // "harvested_energy", "error_variance", "opmm_energy"
  int user = 0;
  double closed_form = 0.0;
  double mc_mean = 0.0;
  double mc_se = 0.0;

  double z_score() const;
};

// Harvested energy at the steady state, the MMSE error variance (from the
// full training simulation) and the omnidirectional energy, per user.
std::vector<ValidationRow> validate_closed_forms(const SystemParams& params,
                                                 const ResourceAllocation& alloc,
                                                 const McConfig& cfg);

}  // namespace wetmm

#endif  // WETMM_MONTECARLO_H_
