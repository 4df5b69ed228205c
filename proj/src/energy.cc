#include "wetmm/energy.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wetmm/estimation.h"

namespace wetmm {

namespace {

constexpr double kSimplexTol = 1e-9;

void check_simplex(std::span<const double> w, const char* what) {
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) throw InvalidParameter(std::string(what) + " must be >= 0");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSimplexTol) {
    throw InvalidParameter(std::string(what) + " must sum to 1, got " +
                           std::to_string(sum));
  }
}

}  // namespace

void ResourceAllocation::validate(int users) const {
  if (!(ce_time >= 0.0) || !(wet_time >= 0.0)) {
    throw InvalidParameter("time fractions must be >= 0");
  }
  if (ce_time + wet_time > 1.0) {
    throw InvalidParameter("tau + alpha must not exceed the frame");
  }
  if (!(pilot_share >= 0.0 && pilot_share <= 1.0)) {
    throw InvalidParameter("pilot share must lie in [0, 1]");
  }
  if (static_cast<int>(energy_weights.size()) != users) {
    throw InvalidParameter("expected " + std::to_string(users) +
                           " energy weights, got " +
                           std::to_string(energy_weights.size()));
  }
  check_simplex(energy_weights, "energy weights");
}

double clamp_split(double pilot_share) {
  return std::clamp(pilot_share, kSplitFloor, 1.0 - kSplitFloor);
}

CVector beamformer(const CMatrix& estimate, std::span<const double> weights) {
  if (static_cast<Eigen::Index>(weights.size()) != estimate.cols()) {
    throw InvalidParameter("one weight per estimate column required");
  }
  check_simplex(weights, "energy weights");
  CVector w = CVector::Zero(estimate.rows());
  for (Eigen::Index k = 0; k < estimate.cols(); ++k) {
    const double norm = estimate.col(k).norm();
    if (!(norm > 0.0)) {
      throw DegenerateChannel("channel estimate column " + std::to_string(k) +
                              " has zero norm");
    }
    w += (std::sqrt(weights[k]) / norm) * estimate.col(k);
  }
  return w;
}

CMatrix complement_basis(const CMatrix& estimate) {
  const Eigen::Index m = estimate.rows();
  const Eigen::Index k = estimate.cols();
  if (m <= k) {
    throw InvalidParameter("orthogonal complement needs more antennas than "
                           "users");
  }
  Eigen::HouseholderQR<CMatrix> qr(estimate);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(m, m);
  return q.rightCols(m - k);
}

CVector general_beamformer(const CMatrix& estimate,
                           std::span<const double> weights,
                           std::span<const double> complement_weights) {
  const Eigen::Index m = estimate.rows();
  const Eigen::Index k = estimate.cols();
  if (m <= k) {
    throw InvalidParameter("general beamformer needs M > K");
  }
  if (static_cast<Eigen::Index>(weights.size()) != k ||
      static_cast<Eigen::Index>(complement_weights.size()) != m - k) {
    throw InvalidParameter("expected K direction weights and M-K complement "
                           "weights");
  }
  double sum = 0.0;
  for (double x : weights) {
    if (!(x >= 0.0)) throw InvalidParameter("weights must be >= 0");
    sum += x;
  }
  for (double x : complement_weights) {
    if (!(x >= 0.0)) throw InvalidParameter("weights must be >= 0");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSimplexTol) {
    throw InvalidParameter("direction and complement weights must sum to 1");
  }

  CVector w = CVector::Zero(m);
  for (Eigen::Index c = 0; c < k; ++c) {
    const double norm = estimate.col(c).norm();
    if (!(norm > 0.0)) {
      throw DegenerateChannel("channel estimate column has zero norm");
    }
    w += (std::sqrt(weights[c]) / norm) * estimate.col(c);
  }
  const bool any_complement =
      std::any_of(complement_weights.begin(), complement_weights.end(),
                  [](double x) { return x > 0.0; });
  if (any_complement) {
    const CMatrix basis = complement_basis(estimate);
    for (Eigen::Index i = 0; i < m - k; ++i) {
      if (complement_weights[i] > 0.0) {
        w += std::sqrt(complement_weights[i]) * basis.col(i);
      }
    }
  }
  return w;
}

double expected_harvested_energy(double pilot_energy, double wet_time,
                                 double weight, double beta, int antennas,
                                 double dl_power, double noise) {
  if (!(wet_time >= 0.0 && wet_time <= 1.0) || !(weight >= 0.0 && weight <= 1.0)) {
    throw InvalidParameter("alpha and xi must lie in [0, 1]");
  }
  if (!(pilot_energy >= 0.0) || !(beta > 0.0) || antennas < 1 ||
      !(dl_power > 0.0) || !(noise > 0.0)) {
    throw InvalidParameter("invalid harvested-energy arguments");
  }
  // M [1 - (M-1) s2 / (M (x + s2))] == (M x + s2) / (x + s2), x = beta Lp.
  const double x = beta * pilot_energy;
  const double m = antennas;
  const double gain = std::isinf(x) ? m : (m * x + noise) / (x + noise);
  return wet_time * dl_power * beta * (weight * gain + (1.0 - weight));
}

double harvested_energy_fixedpoint(double wet_time, double pilot_share,
                                   double weight, double beta, int antennas,
                                   double dl_power, double noise) {
  if (!(pilot_share > 0.0 && pilot_share < 1.0)) {
    throw InvalidParameter("pilot share must lie in (0, 1)");
  }
  if (!(wet_time > 0.0)) throw InvalidParameter("alpha must be positive");
  if (!(weight >= 0.0 && weight <= 1.0) || !(beta > 0.0) || antennas < 1 ||
      !(dl_power > 0.0) || !(noise > 0.0)) {
    throw InvalidParameter("invalid fixed-point arguments");
  }
  // Positive root of E^2 - g E - c = 0.
  const double a_p = wet_time * dl_power;
  const double g = a_p * beta * (weight * (antennas - 1) + 1.0) -
                   noise / (beta * pilot_share);
  const double c = a_p * noise / pilot_share;
  const double root = std::hypot(g, 2.0 * std::sqrt(c));
  return g >= 0.0 ? 0.5 * (g + root) : 2.0 * c / (root - g);
}

double error_variance_split(double wet_time, double pilot_share, double weight,
                            double beta, int antennas, double dl_power,
                            double noise) {
  const double e = harvested_energy_fixedpoint(wet_time, pilot_share, weight,
                                               beta, antennas, dl_power, noise);
  return beta * noise / (beta * pilot_share * e + noise);
}

double uplink_power(double ce_time, double wet_time, double pilot_share,
                    double energy) {
  const double data = 1.0 - ce_time - wet_time;
  if (!(data > 0.0)) {
    throw DomainError("no time left for uplink data (tau + alpha >= 1)");
  }
  return (1.0 - pilot_share) * energy / data;
}

double ideal_energy(double wet_time, double weight, double beta, int antennas,
                    double dl_power) {
  return wet_time * dl_power * beta * (weight * antennas + (1.0 - weight));
}

double opmm_energy(double wet_time, double beta, double dl_power) {
  return wet_time * dl_power * beta;
}

double asymptotic_energy(double wet_time, double weight, double beta,
                         int antennas, double dl_power) {
  return wet_time * dl_power * beta * weight * antennas;
}

EnergyReport energy_report(const SystemParams& params,
                           const ResourceAllocation& alloc, System system) {
  params.validate();
  const int users = params.users();
  alloc.validate(users);
  EnergyReport r;
  r.harvested.resize(users);
  r.pilot_energy.assign(users, 0.0);
  r.uplink_power.resize(users);
  r.error_var.assign(users, 0.0);

  const double a = alloc.wet_time;
  const double p = params.dl_power;
  const double s2 = params.ul_noise;

  if (system == System::kIdeal) {
    if (!(a < 1.0)) throw DomainError("no time left for uplink data");
    for (int k = 0; k < users; ++k) {
      const double b = params.path_loss[k];
      r.harvested[k] = ideal_energy(a, alloc.energy_weights[k], b,
                                    params.antennas, p);
      r.uplink_power[k] = r.harvested[k] / (1.0 - a);
    }
    return r;
  }

  const double rho = clamp_split(alloc.pilot_share);
  for (int k = 0; k < users; ++k) {
    const double b = params.path_loss[k];
    double e = 0.0;
    if (a > 0.0) {
      e = system == System::kOpMm
              ? opmm_energy(a, b, p)
              : harvested_energy_fixedpoint(a, rho, alloc.energy_weights[k], b,
                                            params.antennas, p, s2);
    }
    r.harvested[k] = e;
    r.pilot_energy[k] = rho * e;
    r.error_var[k] = error_variance(b, rho * e, s2);
    r.uplink_power[k] = uplink_power(alloc.ce_time, a, rho, e);
  }
  return r;
}

}  // namespace wetmm
