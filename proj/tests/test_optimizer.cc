#include <gtest/gtest.h>

#include <cmath>

#include "wetmm/optimizer.h"
#include "wetmm/rates.h"

namespace wetmm {
namespace {

SystemParams scenario(int m) {
  SystemParams p;
  p.antennas = m;
  p.path_loss = path_loss(PathLossModel{1e-3, 3.0, {6.0, 12.0}});
  return p;
}

GridSpec coarse_grid() {
  GridSpec g;
  g.ce_step = 0.02;
  g.wet_step = 0.02;
  g.split_step = 0.02;
  g.split_min = 0.02;
  g.split_max = 0.98;
  g.weight_step = 0.05;
  return g;
}

struct Brute {
  double rate = -1.0;
  double tau = 0.0, alpha = 0.0, rho = 0.0, xi1 = 0.0;
};

// Plain nested loops over the same lattice through the public rate API.
Brute brute_force(const SystemParams& p, System s, Detector d, const GridSpec& g,
                  bool simplex) {
  Brute best;
  const std::vector<double> analytic = optimal_weights(p.path_loss);
  const int nt = s == System::kIdeal ? 0 : static_cast<int>((1.0 - g.wet_step) / g.ce_step);
  const int nr = s == System::kIdeal
                     ? 0
                     : static_cast<int>(std::lround((g.split_max - g.split_min) / g.split_step));
  const int nw = simplex ? static_cast<int>(std::lround(1.0 / g.weight_step)) : 0;
  for (int i = 0; i <= nt; ++i) {
    for (int j = 1; j * g.wet_step < 1.0; ++j) {
      const double tau = i * g.ce_step, a = j * g.wet_step;
      if (tau + a >= 1.0) continue;
      for (int r = 0; r <= nr; ++r) {
        for (int w = 0; w <= nw; ++w) {
          const std::vector<double> xi =
              simplex ? std::vector<double>{w * g.weight_step, 1.0 - w * g.weight_step}
                      : analytic;
          const double rho = g.split_min + r * g.split_step;
          const double v =
              evaluate_rate(p, {tau, a, rho, xi}, s, d).min_rate();
          if (v > best.rate) best = {v, tau, a, rho, xi[0]};
        }
      }
    }
  }
  return best;
}

TEST(OptimalWeights, InverseSquarePathLoss) {
  const auto xi = optimal_weights(scenario(10).path_loss);
  EXPECT_NEAR(xi[0], 1.0 / 65.0, 1e-15);
  EXPECT_NEAR(xi[1], 64.0 / 65.0, 1e-15);
  // Tiny path losses must not overflow.
  const auto tiny = optimal_weights(std::vector<double>{1e-200, 2e-200});
  EXPECT_NEAR(tiny[0], 0.8, 1e-15);
  EXPECT_THROW(optimal_weights(std::vector<double>{}), InvalidParameter);
  EXPECT_THROW(optimal_weights(std::vector<double>{1.0, 0.0}), InvalidParameter);
}

TEST(OptimalSplit, Values) {
  EXPECT_DOUBLE_EQ(optimal_split_zf(1, 0.0, 0.0), 0.5);
  EXPECT_NEAR(optimal_split_zf(2, 0.00825, 0.076), 0.5965, 1e-4);
  double prev = 0.0;
  for (int k = 1; k <= 64; k *= 2) {
    const double r = optimal_split_zf(k, 0.0, 0.1);
    EXPECT_GT(r, prev);
    EXPECT_LT(r, 1.0);
    prev = r;
  }
  EXPECT_THROW(optimal_split_zf(2, 0.5, 0.5), DomainError);
  EXPECT_THROW(optimal_split_zf(0, 0.0, 0.1), InvalidParameter);
}

TEST(OptimalSplit, MaximizesAsymptoticRate) {
  const SystemParams p = scenario(1000);
  const auto xi = optimal_weights(p.path_loss);
  const double star = optimal_split_zf(2, 0.0, 0.1);
  const double at_star = asymptotic_zf_rate(p, {0.0, 0.1, star, xi}).min_rate();
  for (double rho = 0.01; rho < 1.0; rho += 0.01) {
    EXPECT_LE(asymptotic_zf_rate(p, {0.0, 0.1, rho, xi}).min_rate(), at_star + 1e-12);
  }
}

TEST(AsymptoticAllocation, DecayOrders) {
  const TimeAllocation zf = asymptotic_allocation(10000, Detector::kZf);
  EXPECT_EQ(zf.ce_time, 0.0);
  EXPECT_NEAR(zf.wet_time, std::pow(1e4, -0.1), 1e-12);
  EXPECT_NEAR(zf.wet_time, 0.398, 0.001);
  const TimeAllocation mrc = asymptotic_allocation(10000, Detector::kMrc);
  EXPECT_LT(mrc.wet_time, zf.wet_time);
  EXPECT_LT(asymptotic_allocation(1, Detector::kZf, 0.05, 5.0).wet_time, 1.0);
  EXPECT_THROW(asymptotic_allocation(0, Detector::kZf), InvalidParameter);
}

TEST(GridSearch, CoarseToFineMatchesBruteForce) {
  for (auto [s, d] : {std::pair{System::kWetMm, Detector::kZf},
                      std::pair{System::kWetMm, Detector::kMrc},
                      std::pair{System::kOpMm, Detector::kZf},
                      std::pair{System::kIdeal, Detector::kMrc}}) {
    const SystemParams p = scenario(100);
    GridSpec g = coarse_grid();
    g.coarse_budget = 500;
    g.refine_window = 2;
    const OptimizationResult r = grid_search_p1(p, s, d, g);
    const Brute b = brute_force(p, s, d, g, false);
    EXPECT_NEAR(r.min_rate, b.rate, 1e-12 * b.rate);
    EXPECT_NEAR(r.allocation.ce_time, b.tau, 1e-12);
    EXPECT_NEAR(r.allocation.wet_time, b.alpha, 1e-12);
    EXPECT_NEAR(r.allocation.pilot_share, s == System::kIdeal ? 0.0 : b.rho, 1e-12);
    g.exhaustive = true;
    const OptimizationResult full = grid_search_p1(p, s, d, g);
    EXPECT_EQ(full.min_rate, r.min_rate);
    if (s != System::kIdeal) EXPECT_LT(r.evaluations, full.evaluations);
  }
}

TEST(GridSearch, SimplexMatchesBruteForce) {
  const SystemParams p = scenario(50);
  GridSpec g = coarse_grid();
  g.coarse_budget = 4000;
  const OptimizationResult r =
      grid_search_p1(p, System::kWetMm, Detector::kZf, g, WeightPolicy::kSimplexGrid);
  const Brute b = brute_force(p, System::kWetMm, Detector::kZf, g, true);
  EXPECT_NEAR(r.min_rate, b.rate, 1e-12 * b.rate);
  EXPECT_NEAR(r.allocation.energy_weights[0], b.xi1, 1e-12);
}

TEST(GridSearch, ThreadCountDoesNotChangeResult) {
  const SystemParams p = scenario(200);
  GridSpec g;
  g.threads = 1;
  const OptimizationResult one = grid_search_p1(p, System::kWetMm, Detector::kZf, g);
  g.threads = 7;
  const OptimizationResult many = grid_search_p1(p, System::kWetMm, Detector::kZf, g);
  EXPECT_EQ(one.min_rate, many.min_rate);
  EXPECT_EQ(one.allocation.ce_time, many.allocation.ce_time);
  EXPECT_EQ(one.allocation.wet_time, many.allocation.wet_time);
  EXPECT_EQ(one.allocation.pilot_share, many.allocation.pilot_share);
  EXPECT_EQ(one.evaluations, many.evaluations);
}

TEST(GridSearch, TiesGoToSmallerIndex) {
  // The ideal system ignores tau and rho, so both collapse to index 0.
  const SystemParams p = scenario(100);
  const OptimizationResult r = grid_search_p1(p, System::kIdeal, Detector::kZf, coarse_grid());
  EXPECT_EQ(r.allocation.ce_time, 0.0);
  EXPECT_EQ(r.allocation.pilot_share, 0.0);
  // Symmetric users: the equal split is optimal.
  SystemParams two = scenario(100);
  two.path_loss = {1e-6, 1e-6};
  GridSpec g = coarse_grid();
  const OptimizationResult s =
      grid_search_p1(two, System::kWetMm, Detector::kZf, g, WeightPolicy::kSimplexGrid);
  EXPECT_NEAR(s.allocation.energy_weights[0], 0.5, 1e-12);
}

TEST(GridSearch, FinerLatticeNeverLoses) {
  const SystemParams p = scenario(200);
  GridSpec g = coarse_grid();
  const double coarse = grid_search_p1(p, System::kWetMm, Detector::kZf, g).min_rate;
  g.ce_step /= 4;
  g.wet_step /= 4;
  g.split_step /= 4;
  g.split_min /= 4;
  const double fine = grid_search_p1(p, System::kWetMm, Detector::kZf, g).min_rate;
  EXPECT_GE(fine, coarse);
}

TEST(GridSearch, ReferenceOptimum) {
  const SystemParams p = scenario(200);
  const OptimizationResult r = grid_search_p1(p, System::kWetMm, Detector::kZf);
  EXPECT_EQ(r.allocation.ce_time, 0.0);
  EXPECT_NEAR(r.allocation.wet_time, 0.0785, 1e-12);
  EXPECT_NEAR(r.allocation.pilot_share, 0.5955, 1e-12);
  EXPECT_NEAR(r.min_rate, 16.1003, 1e-3);
  // Constraints hold at the optimum.
  EXPECT_NO_THROW(r.allocation.validate(2));
  EXPECT_LT(r.allocation.ce_time + r.allocation.wet_time, 1.0);
  EXPECT_EQ(r.user_rates.size(), 2u);
}

TEST(GridSearch, SimplexPolicyFindsAnalyticWeights) {
  const SystemParams p = scenario(200);
  const OptimizationResult simplex =
      grid_search_p1(p, System::kWetMm, Detector::kZf, {}, WeightPolicy::kSimplexGrid);
  const OptimizationResult analytic = grid_search_p1(p, System::kWetMm, Detector::kZf);
  EXPECT_NEAR(simplex.allocation.energy_weights[0], 1.0 / 65.0, 0.01);
  EXPECT_NEAR(simplex.min_rate / analytic.min_rate, 1.0, 0.01);
  EXPECT_GE(simplex.min_rate, analytic.min_rate - 1e-9);
}

TEST(AnalyticSolution, AgreesWithGrid) {
  for (auto [m, tol] : {std::pair{200, 0.02}, std::pair{1000, 0.01}}) {
    const SystemParams p = scenario(m);
    const OptimizationResult a = solve_p1_analytic(p, Detector::kZf);
    const OptimizationResult g = grid_search_p1(p, System::kWetMm, Detector::kZf);
    EXPECT_NEAR(a.min_rate / g.min_rate, 1.0, tol) << m;
    EXPECT_EQ(a.allocation.ce_time, 0.0);
    EXPECT_NEAR(a.allocation.pilot_share, optimal_split_zf(2, 0.0, a.allocation.wet_time),
                1e-15);
  }
  const OptimizationResult mrc = solve_p1_analytic(scenario(200), Detector::kMrc);
  EXPECT_EQ(mrc.allocation.pilot_share, 0.5);
  EXPECT_GT(mrc.min_rate, 0.0);
}

TEST(GridSearch, RejectsBadInputs) {
  const SystemParams p = scenario(200);
  GridSpec g;
  g.wet_step = 0.0;
  EXPECT_THROW(grid_search_p1(p, System::kWetMm, Detector::kZf, g), InvalidParameter);
  g = GridSpec{};
  g.split_min = 0.0;
  EXPECT_THROW(grid_search_p1(p, System::kWetMm, Detector::kZf, g), InvalidParameter);
  g = GridSpec{};
  g.wet_step = 1.0;
  EXPECT_THROW(grid_search_p1(p, System::kWetMm, Detector::kZf, g), InvalidParameter);
  EXPECT_THROW(grid_search_p1(scenario(2), System::kWetMm, Detector::kZf), InvalidParameter);
  SystemParams three = scenario(20);
  three.path_loss.push_back(1e-7);
  EXPECT_THROW(grid_search_p1(three, System::kWetMm, Detector::kZf, {},
                              WeightPolicy::kSimplexGrid),
               InvalidParameter);
  EXPECT_THROW(solve_p1_analytic(p, Detector::kMrc, 1.0), InvalidParameter);
}

TEST(GoldenSection, FindsMaximum) {
  const double x = golden_section_max([](double v) { return -(v - 0.3) * (v - 0.3); },
                                      0.0, 1.0);
  EXPECT_NEAR(x, 0.3, 1e-6);
}

}  // namespace
}  // namespace wetmm
