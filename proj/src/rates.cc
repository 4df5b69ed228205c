#include "wetmm/rates.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wetmm/optimizer.h"

namespace wetmm {

namespace {

double log2_1p(double x) { return std::log1p(x) / std::numbers::ln2; }

void require_zf_antennas(const SystemParams& params) {
  if (params.antennas <= params.users()) {
    throw InvalidParameter("ZF needs M >= K + 1 (M = " +
                           std::to_string(params.antennas) +
                           ", K = " + std::to_string(params.users()) + ")");
  }
}

RateReport make_report(const std::vector<double>& sinr, double fraction,
                       Detector det, System sys, ResourceAllocation alloc) {
  RateReport r;
  r.sinr = sinr;
  r.rate.resize(sinr.size());
  for (std::size_t k = 0; k < sinr.size(); ++k) {
    r.rate[k] = fraction * log2_1p(sinr[k]);
  }
  r.detector = det;
  r.system = sys;
  r.allocation = std::move(alloc);
  return r;
}

RateReport training_rate(const SystemParams& params,
                         const ResourceAllocation& alloc, System system,
                         Detector detector) {
  params.validate();
  if (detector == Detector::kZf) require_zf_antennas(params);
  alloc.validate(params.users());
  const double t = alloc.data_time();
  if (!(t > 0.0)) throw DomainError("tau + alpha must be < 1");
  const EnergyReport er = energy_report(params, alloc, system);
  const double rho = clamp_split(alloc.pilot_share);
  std::vector<double> sinr(params.users());
  if (detector == Detector::kZf) {
    zf_sinr(params, alloc.ce_time, alloc.wet_time, rho, er.harvested, sinr);
  } else {
    mrc_sinr(params, alloc.ce_time, alloc.wet_time, rho, er.harvested, sinr);
  }
  RateReport r = make_report(sinr, t, detector, system, alloc);
  r.interference_free = detector == Detector::kMrc && params.users() == 1;
  return r;
}

}  // namespace

double RateReport::min_rate() const {
  if (rate.empty()) return 0.0;
  return *std::min_element(rate.begin(), rate.end());
}

double RateReport::max_rate() const {
  if (rate.empty()) return 0.0;
  return *std::max_element(rate.begin(), rate.end());
}

double data_fraction(System system, double ce_time, double wet_time) {
  return system == System::kIdeal ? 1.0 - wet_time : 1.0 - ce_time - wet_time;
}

void zf_sinr(const SystemParams& params, double ce_time, double wet_time,
             double pilot_share, std::span<const double> energy,
             std::span<double> sinr) {
  const int users = params.users();
  const double s2 = params.ul_noise;
  const double rho = pilot_share;
  const double t = 1.0 - ce_time - wet_time;
  double leak = 0.0;
  for (int i = 0; i < users; ++i) {
    const double b = params.path_loss[i];
    leak += b * energy[i] / (b * rho * energy[i] + s2);
  }
  const double common = t / (1.0 - rho) + leak;
  const double gain = params.antennas - users;
  for (int k = 0; k < users; ++k) {
    const double e = energy[k];
    const double b = params.path_loss[k];
    if (!(e > 0.0)) {
      sinr[k] = 0.0;
      continue;
    }
    sinr[k] = gain * b * b * rho * e / (s2 * (b * rho + s2 / e) * common);
  }
}

void mrc_sinr(const SystemParams& params, double ce_time, double wet_time,
              double pilot_share, std::span<const double> energy,
              std::span<double> sinr) {
  const int users = params.users();
  const double s2 = params.ul_noise;
  const double rho = pilot_share;
  const double t = 1.0 - ce_time - wet_time;
  double total = 0.0;
  for (int i = 0; i < users; ++i) total += params.path_loss[i] * energy[i];
  const double gain = params.antennas - 1;
  for (int k = 0; k < users; ++k) {
    const double e = energy[k];
    const double b = params.path_loss[k];
    if (!(e > 0.0)) {
      sinr[k] = 0.0;
      continue;
    }
    const double others = total - b * e;
    sinr[k] = gain * b * b * rho * e /
              ((b * rho + s2 / e) * (s2 * t / (1.0 - rho) + others) + b * s2);
  }
}

void ideal_zf_sinr(const SystemParams& params, double wet_time,
                   std::span<const double> energy, std::span<double> sinr) {
  const double gain = params.antennas - params.users();
  const double denom = (1.0 - wet_time) * params.ul_noise;
  for (int k = 0; k < params.users(); ++k) {
    sinr[k] = energy[k] * gain * params.path_loss[k] / denom;
  }
}

void ideal_mrc_sinr(const SystemParams& params, double wet_time,
                    std::span<const double> energy, std::span<double> sinr) {
  const int users = params.users();
  double total = 0.0;
  for (int i = 0; i < users; ++i) total += params.path_loss[i] * energy[i];
  const double gain = params.antennas - 1;
  const double floor = (1.0 - wet_time) * params.ul_noise;
  for (int k = 0; k < users; ++k) {
    const double own = params.path_loss[k] * energy[k];
    sinr[k] = energy[k] * gain * params.path_loss[k] / (total - own + floor);
  }
}

RateReport zf_rate(const SystemParams& params, const ResourceAllocation& alloc) {
  return training_rate(params, alloc, System::kWetMm, Detector::kZf);
}

RateReport mrc_rate(const SystemParams& params,
                    const ResourceAllocation& alloc) {
  return training_rate(params, alloc, System::kWetMm, Detector::kMrc);
}

RateReport ideal_rate(const SystemParams& params, double wet_time,
                      std::span<const double> weights, Detector detector) {
  params.validate();
  if (detector == Detector::kZf) require_zf_antennas(params);
  ResourceAllocation alloc;
  alloc.ce_time = 0.0;
  alloc.wet_time = wet_time;
  alloc.pilot_share = 0.0;
  alloc.energy_weights.assign(weights.begin(), weights.end());
  alloc.validate(params.users());
  if (!(wet_time < 1.0)) throw DomainError("alpha must be < 1");
  const EnergyReport er = energy_report(params, alloc, System::kIdeal);
  std::vector<double> sinr(params.users());
  if (detector == Detector::kZf) {
    ideal_zf_sinr(params, wet_time, er.harvested, sinr);
  } else {
    ideal_mrc_sinr(params, wet_time, er.harvested, sinr);
  }
  RateReport r =
      make_report(sinr, 1.0 - wet_time, detector, System::kIdeal, alloc);
  r.interference_free = detector == Detector::kMrc && params.users() == 1;
  return r;
}

RateReport opmm_zf_rate(const SystemParams& params, double ce_time,
                        double wet_time, double pilot_share) {
  ResourceAllocation alloc{ce_time, wet_time, pilot_share,
                           optimal_weights(params.path_loss)};
  return training_rate(params, alloc, System::kOpMm, Detector::kZf);
}

RateReport opmm_mrc_rate(const SystemParams& params, double ce_time,
                         double wet_time, double pilot_share) {
  ResourceAllocation alloc{ce_time, wet_time, pilot_share,
                           optimal_weights(params.path_loss)};
  return training_rate(params, alloc, System::kOpMm, Detector::kMrc);
}

RateReport evaluate_rate(const SystemParams& params,
                         const ResourceAllocation& alloc, System system,
                         Detector detector) {
  switch (system) {
    case System::kIdeal:
      return ideal_rate(params, alloc.wet_time, alloc.energy_weights, detector);
    case System::kOpMm:
    case System::kWetMm:
      return training_rate(params, alloc, system, detector);
  }
  throw InvalidParameter("unknown system");
}

RateReport asymptotic_zf_rate(const SystemParams& params,
                              const ResourceAllocation& alloc) {
  params.validate();
  require_zf_antennas(params);
  alloc.validate(params.users());
  const double t = alloc.data_time();
  if (!(t > 0.0)) throw DomainError("tau + alpha must be < 1");
  const int users = params.users();
  const double m = params.antennas;
  const double rho = clamp_split(alloc.pilot_share);
  const double denom = params.ul_noise * (users + t * rho / (1.0 - rho));
  std::vector<double> sinr(users);
  for (int k = 0; k < users; ++k) {
    const double b = params.path_loss[k];
    sinr[k] = m * (m - users) * alloc.wet_time * params.dl_power * b * b *
              alloc.energy_weights[k] * rho / denom;
  }
  return make_report(sinr, t, Detector::kZf, System::kWetMm, alloc);
}

RateReport asymptotic_mrc_rate(const SystemParams& params,
                               const ResourceAllocation& alloc) {
  params.validate();
  alloc.validate(params.users());
  const double t = alloc.data_time();
  if (!(t > 0.0)) throw DomainError("tau + alpha must be < 1");
  const int users = params.users();
  double total = 0.0;
  std::vector<double> strength(users);
  for (int i = 0; i < users; ++i) {
    const double b = params.path_loss[i];
    strength[i] = b * b * alloc.energy_weights[i];
    total += strength[i];
  }
  std::vector<double> sinr(users);
  for (int k = 0; k < users; ++k) {
    const double others = total - strength[k];
    sinr[k] = others > 0.0 ? (params.antennas - 1) * strength[k] / others
                           : std::numeric_limits<double>::infinity();
  }
  RateReport r = make_report(sinr, t, Detector::kMrc, System::kWetMm, alloc);
  r.interference_free = users == 1;
  return r;
}

double maxmin_asymptotic_rate(const SystemParams& params, Detector detector) {
  params.validate();
  const int users = params.users();
  const double m = params.antennas;
  if (detector == Detector::kMrc) {
    if (users == 1) return std::numeric_limits<double>::infinity();
    return log2_1p((m - 1.0) / (users - 1.0));
  }
  double inv_sq = 0.0;
  for (double b : params.path_loss) inv_sq += 1.0 / (b * b);
  const double root = std::sqrt(static_cast<double>(users)) + 1.0;
  return log2_1p(m * m * params.dl_power /
                 (params.ul_noise * root * root * inv_sq));
}

RateReport ideal_asymptotic_rate(const SystemParams& params, double wet_time,
                                 Detector detector) {
  params.validate();
  if (detector == Detector::kZf) require_zf_antennas(params);
  if (!(wet_time >= 0.0 && wet_time < 1.0)) {
    throw DomainError("alpha must lie in [0, 1)");
  }
  const int users = params.users();
  const double m = params.antennas;
  ResourceAllocation alloc{0.0, wet_time, 0.0,
                           optimal_weights(params.path_loss)};
  std::vector<double> sinr(users);
  if (detector == Detector::kZf) {
    for (int k = 0; k < users; ++k) {
      const double b = params.path_loss[k];
      sinr[k] = wet_time * params.dl_power * alloc.energy_weights[k] * b * b *
                m * (m - users) / ((1.0 - wet_time) * params.ul_noise);
    }
  } else {
    double total = 0.0;
    std::vector<double> strength(users);
    for (int i = 0; i < users; ++i) {
      const double b = params.path_loss[i];
      strength[i] = alloc.energy_weights[i] * b * b;
      total += strength[i];
    }
    for (int k = 0; k < users; ++k) {
      const double others = total - strength[k];
      sinr[k] = others > 0.0 ? (m - 1.0) * strength[k] / others
                             : std::numeric_limits<double>::infinity();
    }
  }
  RateReport r =
      make_report(sinr, 1.0 - wet_time, detector, System::kIdeal, alloc);
  r.interference_free = detector == Detector::kMrc && users == 1;
  return r;
}

double min_rate(const SystemParams& params, System system, Detector detector,
                double ce_time, double wet_time, double pilot_share,
                std::span<const double> weights, std::span<double> scratch) {
  const int users = params.users();
  if (!(wet_time > 0.0)) return 0.0;
  const double t = data_fraction(system, ce_time, wet_time);
  if (!(t > 0.0)) return 0.0;
  std::span<double> energy = scratch.subspan(0, users);
  std::span<double> sinr = scratch.subspan(users, users);
  const double rho = clamp_split(pilot_share);
  const double p = params.dl_power;
  for (int k = 0; k < users; ++k) {
    const double b = params.path_loss[k];
    switch (system) {
      case System::kWetMm:
        energy[k] = harvested_energy_fixedpoint(wet_time, rho, weights[k], b,
                                                params.antennas, p,
                                                params.ul_noise);
        break;
      case System::kOpMm:
        energy[k] = opmm_energy(wet_time, b, p);
        break;
      case System::kIdeal:
        energy[k] = ideal_energy(wet_time, weights[k], b, params.antennas, p);
        break;
    }
  }
  if (system == System::kIdeal) {
    if (detector == Detector::kZf) {
      ideal_zf_sinr(params, wet_time, energy, sinr);
    } else {
      ideal_mrc_sinr(params, wet_time, energy, sinr);
    }
  } else if (detector == Detector::kZf) {
    zf_sinr(params, ce_time, wet_time, rho, energy, sinr);
  } else {
    mrc_sinr(params, ce_time, wet_time, rho, energy, sinr);
  }
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < users; ++k) worst = std::min(worst, sinr[k]);
  return t * log2_1p(worst);
}

double mm_dorg(std::span<const double> rates,
               std::span<const double> antennas) {
  if (rates.size() != antennas.size()) {
    throw InvalidParameter("rates and antenna grid differ in length");
  }
  if (antennas.empty()) throw InvalidParameter("empty antenna grid");
  const double top = *std::max_element(antennas.begin(), antennas.end());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!(antennas[i] > 0.0)) throw InvalidParameter("antenna counts must be > 0");
    if (antennas[i] < top / 10.0) continue;
    const double x = std::log2(antennas[i]);
    sx += x;
    sy += rates[i];
    sxx += x * x;
    sxy += x * rates[i];
    ++n;
  }
  const double var = sxx - sx * sx / n;
  if (n < 2 || !(var > 0.0)) {
    throw InvalidParameter("need two distinct antenna counts in the fit window");
  }
  return (sxy - sx * sy / n) / var;
}

double large_k_rate(double load, double wet_time, double c1, double dl_power,
                    double noise) {
  if (!(load > 0.0 && load < 1.0)) {
    throw DomainError("load K/M must lie in (0, 1)");
  }
  if (!(wet_time > 0.0) || !(c1 > 0.0) || !(dl_power > 0.0) ||
      !(noise > 0.0)) {
    throw InvalidParameter("alpha, c1, p and noise must be positive");
  }
  return std::log2(wet_time * dl_power * (1.0 - load) /
                   (c1 * noise * load * load));
}

double solve_load_for_rate(double target, double wet_time, double c1,
                           double dl_power, double noise) {
  if (!std::isfinite(target)) throw DomainError("target rate must be finite");
  // The rate falls strictly from +inf to -inf across (0, 1).
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (large_k_rate(mid, wet_time, c1, dl_power, noise) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double c1_sample(std::span<const double> path_loss) {
  if (path_loss.empty()) throw InvalidParameter("no path losses");
  double sum = 0.0;
  for (double b : path_loss) {
    if (!(b > 0.0)) throw InvalidParameter("path losses must be positive");
    sum += 1.0 / (b * b);
  }
  return sum / static_cast<double>(path_loss.size());
}

double c1_limit(double beta0, double exponent, double d_min, double d_max) {
  if (!(beta0 > 0.0) || !(exponent > 0.0) || !(d_min > 0.0) ||
      !(d_max >= d_min)) {
    throw InvalidParameter("c1_limit needs beta0, u > 0 and 0 < a <= b");
  }
  const double q = 2.0 * exponent;
  if (d_max == d_min) return std::pow(d_min, q) / (beta0 * beta0);
  return (std::pow(d_max, q + 1.0) - std::pow(d_min, q + 1.0)) /
         ((d_max - d_min) * (q + 1.0) * beta0 * beta0);
}

}  // namespace wetmm
