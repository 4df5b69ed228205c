#include "wetmm/sysmodel.h"

#include <cmath>
#include <string>

namespace wetmm {

void SystemParams::validate() const {
  if (antennas < 2) {
    throw InvalidParameter("antenna count must be at least 2, got " +
                           std::to_string(antennas));
  }
  if (path_loss.empty()) throw InvalidParameter("at least one user required");
  if (!(dl_power > 0.0) || !(ul_noise > 0.0) || !(user_noise > 0.0)) {
    throw InvalidParameter("powers must be positive");
  }
  for (double b : path_loss) {
    if (!(b > 0.0) || !std::isfinite(b)) {
      throw InvalidParameter("path losses must be positive and finite");
    }
  }
}

std::vector<double> path_loss(const PathLossModel& model) {
  if (!(model.beta0 > 0.0)) throw InvalidParameter("beta0 must be positive");
  if (!(model.exponent > 1.0)) {
    throw InvalidParameter("path-loss exponent must exceed 1");
  }
  std::vector<double> beta;
  beta.reserve(model.distances.size());
  for (double d : model.distances) {
    if (!(d > 0.0)) throw InvalidParameter("distances must be positive");
    beta.push_back(model.beta0 * std::pow(d, -model.exponent));
  }
  return beta;
}

CMatrix generate_channel(const SystemParams& params, Rng& rng) {
  params.validate();
  CMatrix g = rng.complex_normal_matrix(params.antennas, params.users());
  for (int k = 0; k < params.users(); ++k) {
    g.col(k) *= std::sqrt(params.path_loss[k]);
  }
  return g;
}

CMatrix generate_channel(const SystemParams& params, std::uint64_t seed) {
  Rng rng(seed);
  return generate_channel(params, rng);
}

}  // namespace wetmm
