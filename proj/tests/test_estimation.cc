#include <gtest/gtest.h>

#include <cmath>

#include "oracles.h"
#include "wetmm/estimation.h"
#include "wetmm/random.h"

namespace wetmm {
namespace {

SystemParams scenario(int m) {
  SystemParams p;
  p.antennas = m;
  p.path_loss = path_loss(PathLossModel{1e-3, 3.0, {6.0, 12.0}});
  return p;
}

TEST(Pilots, OrthonormalColumns) {
  const PilotConfig pc = make_pilots(5, 3, {1.0, 2.0, 3.0});
  const CMatrix gram = pc.phi.adjoint() * pc.phi;
  EXPECT_TRUE(gram.isApprox(CMatrix::Identity(3, 3), 1e-12));
}

TEST(Pilots, RejectsShortSequences) {
  EXPECT_THROW(make_pilots(1, 2, {1.0, 1.0}), InvalidParameter);
  EXPECT_THROW(make_pilots(2, 2, {1.0}), InvalidParameter);
  EXPECT_THROW(make_pilots(2, 2, {1.0, -1.0}), InvalidParameter);
}

TEST(ErrorVariance, WorkedValue) {
  EXPECT_NEAR(error_variance(5.787e-7, 5.166e-6, 1e-15), 1.935e-10, 0.001e-10);
  // Unit training SNR halves the variance.
  EXPECT_DOUBLE_EQ(error_variance(2e-6, 1e-15 / 2e-6, 1e-15), 1e-6);
}

TEST(ErrorVariance, Limits) {
  const double beta = 1e-6;
  EXPECT_DOUBLE_EQ(error_variance(beta, 0.0, 1e-15), beta);
  EXPECT_LT(error_variance(beta, 1e3, 1e-15), 1e-12 * beta);
  // Matches the difference form beta - beta^2 Lp / (beta Lp + s2).
  for (double lp : {1e-12, 1e-9, 1e-6}) {
    EXPECT_NEAR(error_variance(beta, lp, 1e-15),
                oracle::mmse_error(beta, lp, 1e-15), 1e-9 * beta);
  }
  EXPECT_THROW(error_variance(0.0, 1.0, 1.0), InvalidParameter);
  EXPECT_THROW(error_variance(1.0, -1.0, 1.0), InvalidParameter);
  EXPECT_THROW(error_variance(1.0, 1.0, 0.0), InvalidParameter);
}

TEST(ErrorVariance, MonotoneInPilotEnergy) {
  double prev = 1.0;
  for (double lp = 1e-14; lp < 1e-4; lp *= 3.0) {
    const double v = error_variance(1e-6, lp, 1e-15);
    EXPECT_LT(v, prev);
    EXPECT_GT(v, 0.0);
    prev = v;
  }
}

TEST(Mmse, NoiselessTrainingRecoversChannel) {
  const SystemParams p = scenario(16);
  const CMatrix g = generate_channel(p, 3);
  const PilotConfig pc = make_pilots(2, 2, {1e-6, 2e-6});
  const CMatrix y = receive_pilots(g, pc, 0.0, 4);
  const CMatrix est = mmse_estimate(y, pc, p.path_loss, 0.0);
  EXPECT_TRUE(est.isApprox(g, 1e-10));
}

TEST(Mmse, ZeroPilotEnergyGivesZeroEstimate) {
  const SystemParams p = scenario(8);
  const CMatrix g = generate_channel(p, 3);
  const PilotConfig pc = make_pilots(2, 2, {0.0, 0.0});
  const CMatrix y = receive_pilots(g, pc, 1e-15, 4);
  const CMatrix est = mmse_estimate(y, pc, p.path_loss, 1e-15);
  EXPECT_EQ(est.norm(), 0.0);
}

TEST(Mmse, EmpiricalErrorVarianceMatchesClosedForm) {
  const SystemParams p = scenario(32);
  const std::vector<double> lp = {2e-10, 5e-9};
  std::vector<std::vector<double>> err(2), est_power(2);
  for (std::uint64_t t = 0; t < 3000; ++t) {
    const auto r = draw_realization(p, lp, ChannelPath::kFullPilot, split_seed(11, t));
    for (int k = 0; k < 2; ++k) {
      err[k].push_back((r.estimate.col(k) - r.channel.col(k)).squaredNorm() /
                       p.antennas);
      est_power[k].push_back(r.estimate.col(k).squaredNorm() / p.antennas);
    }
  }
  for (int k = 0; k < 2; ++k) {
    const double closed = error_variance(p.path_loss[k], lp[k], p.ul_noise);
    const auto m = oracle::moments(err[k]);
    EXPECT_NEAR(m.mean, closed, 4.0 * m.se) << "user " << k;
    // Orthogonality: E|g_hat|^2 = beta - s_e^2.
    const auto e = oracle::moments(est_power[k]);
    EXPECT_NEAR(e.mean, p.path_loss[k] - closed, 4.0 * e.se) << "user " << k;
  }
}

TEST(Realization, StatisticalPathHasSameMoments) {
  const SystemParams p = scenario(32);
  const std::vector<double> lp = {2e-10, 5e-9};
  std::vector<std::vector<double>> err(2), cross(2);
  for (std::uint64_t t = 0; t < 3000; ++t) {
    const auto r =
        draw_realization(p, lp, ChannelPath::kStatistical, split_seed(12, t));
    for (int k = 0; k < 2; ++k) {
      const CVector e = r.estimate.col(k) - r.channel.col(k);
      err[k].push_back(e.squaredNorm() / p.antennas);
      cross[k].push_back(r.estimate.col(k).dot(e).real() / p.antennas);
    }
  }
  for (int k = 0; k < 2; ++k) {
    const double closed = error_variance(p.path_loss[k], lp[k], p.ul_noise);
    const auto m = oracle::moments(err[k]);
    EXPECT_NEAR(m.mean, closed, 4.0 * m.se);
    const auto c = oracle::moments(cross[k]);
    EXPECT_NEAR(c.mean, 0.0, 4.0 * c.se);
  }
}

TEST(Realization, DeterministicInSeed) {
  const SystemParams p = scenario(8);
  const std::vector<double> lp = {1e-9, 1e-9};
  for (auto path : {ChannelPath::kFullPilot, ChannelPath::kStatistical}) {
    const auto a = draw_realization(p, lp, path, 99);
    const auto b = draw_realization(p, lp, path, 99);
    EXPECT_TRUE(a.channel == b.channel);
    EXPECT_TRUE(a.estimate == b.estimate);
  }
}

}  // namespace
}  // namespace wetmm
