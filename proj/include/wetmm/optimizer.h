#ifndef WETMM_OPTIMIZER_H_
#define WETMM_OPTIMIZER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "wetmm/energy.h"
#include "wetmm/sysmodel.h"
#include "wetmm/types.h"

namespace wetmm {

enum class WeightPolicy {
  kAnalytic,     // xi_k proportional to beta_k^-2
  kSimplexGrid,  // brute force over the xi simplex (K = 2 only)
};

// Lattice used by grid_search_p1. tau = i * ce_step (i >= 0),
// alpha = j * wet_step (j >= 1), rho = split_min + r * split_step
// (<= split_max), xi_1 = w * weight_step. Only tau + alpha < 1 is feasible.
struct GridSpec {
  double ce_step = 0.00025;
  double wet_step = 0.0005;
  double split_step = 0.0005;
  double split_min = 0.0005;
  double split_max = 0.9995;
  double weight_step = 0.0005;

  // Visit every lattice point instead of coarse-to-fine.
  bool exhaustive = false;
  // Upper bound on the size of the first coarse pass.
  std::int64_t coarse_budget = 2'000'000;
  // Half-width, in fine steps, of the final refinement window.
  int refine_window = 10;
  // 0 = std::thread::hardware_concurrency().
  int threads = 0;
};

struct OptimizationResult {
  ResourceAllocation allocation;
  double min_rate = 0.0;
  std::vector<double> user_rates;
  GridSpec grid;
  std::int64_t evaluations = 0;
  System system = System::kWetMm;
  Detector detector = Detector::kZf;
  WeightPolicy policy = WeightPolicy::kAnalytic;
};

// xi_k = beta_k^-2 / sum_i beta_i^-2.
std::vector<double> optimal_weights(std::span<const double> path_loss);

// sqrt(K) / (sqrt(K) + sqrt(1 - tau - alpha)).
double optimal_split_zf(int users, double ce_time, double wet_time);

struct TimeAllocation {
  double ce_time = 0.0;
  double wet_time = 0.0;
};

// Decay-order starting point for (tau, alpha): tau = 0,
// ZF alpha = scale * M^(-2 nu), MRC alpha = scale * M^(-phi). `exponent` is
// nu for ZF and phi for MRC; pass a negative value for the defaults
// (nu = 0.05, phi = 0.9). alpha is clamped so that tau + alpha < 1.
TimeAllocation asymptotic_allocation(int antennas, Detector detector,
                                     double exponent = -1.0,
                                     double scale = 1.0);

// Maximizes the closed-form minimum rate over the feasible lattice.
// Ties go to the smaller tau, then alpha, then rho, then xi_1. The result
// does not depend on the number of threads.
OptimizationResult grid_search_p1(const SystemParams& params, System system,
                                  Detector detector, const GridSpec& grid = {},
                                  WeightPolicy policy = WeightPolicy::kAnalytic);

// Composition of the asymptotic solution: tau = 0, xi = xi*, rho = rho*_ZF
// (ZF) or `mrc_split` (MRC), and alpha from a golden-section line search on
// the finite-M minimum rate.
OptimizationResult solve_p1_analytic(const SystemParams& params,
                                     Detector detector,
                                     double mrc_split = 0.5);

// Golden-section search for the maximizer of a unimodal function on [lo, hi].
template <typename F>
double golden_section_max(F&& f, double lo, double hi, double tol = 1e-9,
                          int max_iterations = 200);

}  // namespace wetmm

#include "wetmm/optimizer_inl.h"

#endif  // WETMM_OPTIMIZER_H_
