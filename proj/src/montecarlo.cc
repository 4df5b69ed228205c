#include "wetmm/montecarlo.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <thread>

#include "wetmm/random.h"
#include "wetmm/rates.h"

namespace wetmm {

namespace {

constexpr int kMaxRedraws = 64;
constexpr double kGramRcondFloor = 1e-12;

int worker_count(int requested, int trials) {
  const int hw = requested > 0
                     ? requested
                     : static_cast<int>(
                           std::max(1u, std::thread::hardware_concurrency()));
  return std::max(1, std::min(hw, trials));
}

// Runs body(trial) for every trial; outputs land in slot `trial`, so the
// result does not depend on the thread count.
template <typename T>
std::vector<T> run_trials(int trials, int threads,
                          const std::function<T(std::int64_t)>& body) {
  std::vector<T> out(trials);
  const int workers = worker_count(threads, trials);
  if (workers == 1) {
    for (int t = 0; t < trials; ++t) out[t] = body(t);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int t = w; t < trials; t += workers) out[t] = body(t);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

Moments moments(const std::vector<double>& x) {
  Moments m;
  const double n = static_cast<double>(x.size());
  if (x.empty()) return m;
  double sum = 0.0;
  for (double v : x) sum += v;
  m.mean = sum / n;
  if (x.size() < 2) return m;
  double ss = 0.0;
  for (double v : x) ss += (v - m.mean) * (v - m.mean);
  m.se = std::sqrt(ss / (n - 1.0) / n);
  return m;
}

void check_config(const SystemParams& params, const McConfig& cfg) {
  params.validate();
  if (cfg.trials < 1) throw InvalidParameter("trial count must be >= 1");
  if (cfg.detector == Detector::kZf && params.antennas <= params.users()) {
    throw InvalidParameter("ZF needs M >= K + 1");
  }
}

struct Draw {
  CMatrix channel;
  CMatrix estimate;
  std::vector<double> error_var;
};

Draw draw(const SystemParams& params, const EnergyReport& er, System system,
          ChannelPath path, std::uint64_t seed) {
  Draw d;
  if (system == System::kIdeal) {
    Rng rng(seed);
    d.channel = generate_channel(params, rng);
    d.estimate = d.channel;
    d.error_var.assign(params.users(), 0.0);
    return d;
  }
  ChannelRealization r = draw_realization(params, er.pilot_energy, path, seed);
  d.channel = std::move(r.channel);
  d.estimate = std::move(r.estimate);
  d.error_var = std::move(r.error_var);
  return d;
}

std::vector<double> energy_samples(const CMatrix& channel, const CVector& w,
                                   double scale) {
  std::vector<double> e(channel.cols());
  for (Eigen::Index k = 0; k < channel.cols(); ++k) {
    e[k] = scale * std::norm(channel.col(k).dot(w));
  }
  return e;
}

}  // namespace

std::optional<std::vector<double>> detector_sinr(
    const CMatrix& estimate, std::span<const double> error_var,
    std::span<const double> power, double noise, Detector detector) {
  const Eigen::Index users = estimate.cols();
  if (static_cast<Eigen::Index>(error_var.size()) != users ||
      static_cast<Eigen::Index>(power.size()) != users) {
    throw InvalidParameter("one error variance and power per user required");
  }
  double floor = noise;
  for (Eigen::Index i = 0; i < users; ++i) floor += power[i] * error_var[i];

  const CMatrix gram = estimate.adjoint() * estimate;
  std::vector<double> sinr(users);
  if (detector == Detector::kZf) {
    if (estimate.rows() <= users) {
      throw InvalidParameter("ZF needs M >= K + 1");
    }
    Eigen::LLT<CMatrix> llt(gram);
    if (llt.info() != Eigen::Success || !(llt.rcond() > kGramRcondFloor)) {
      return std::nullopt;
    }
    const CMatrix inv = llt.solve(CMatrix::Identity(users, users));
    // a_k^H g_i = delta_ki, ||a_k||^2 = [(G^H G)^-1]_kk.
    for (Eigen::Index k = 0; k < users; ++k) {
      sinr[k] = power[k] / (inv(k, k).real() * floor);
    }
    return sinr;
  }
  for (Eigen::Index k = 0; k < users; ++k) {
    const double own = gram(k, k).real();
    if (!(own > 0.0)) return std::nullopt;
    double interference = 0.0;
    for (Eigen::Index i = 0; i < users; ++i) {
      if (i != k) interference += power[i] * std::norm(gram(k, i));
    }
    sinr[k] = power[k] * own * own / (interference + own * floor);
  }
  return sinr;
}

FrameSample simulate_frame(const SystemParams& params,
                           const ResourceAllocation& alloc, const McConfig& cfg,
                           std::int64_t trial) {
  check_config(params, cfg);
  alloc.validate(params.users());
  const EnergyReport er = energy_report(params, alloc, cfg.system);
  const std::uint64_t trial_seed =
      split_seed(cfg.seed, static_cast<std::uint64_t>(trial));
  const double scale = alloc.wet_time * params.dl_power;

  FrameSample out;
  for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
    const Draw d = draw(params, er, cfg.system, cfg.path,
                        split_seed(trial_seed, attempt));
    std::optional<std::vector<double>> sinr = detector_sinr(
        d.estimate, d.error_var, er.uplink_power, params.ul_noise, cfg.detector);
    if (!sinr) {
      ++out.redraws;
      continue;
    }
    CVector w;
    if (cfg.system == System::kOpMm) {
      w = CVector::Constant(params.antennas,
                            Complex(1.0 / std::sqrt(params.antennas), 0.0));
    } else {
      w = beamformer(d.estimate, alloc.energy_weights);
    }
    out.energy = energy_samples(d.channel, w, scale);
    out.sinr = std::move(*sinr);
    return out;
  }
  throw DegenerateChannel("ZF Gram matrix stayed singular after " +
                          std::to_string(kMaxRedraws) + " redraws");
}

McEstimate estimate_exact_rate(const SystemParams& params,
                               const ResourceAllocation& alloc,
                               const McConfig& cfg) {
  check_config(params, cfg);
  const std::vector<FrameSample> frames = run_trials<FrameSample>(
      cfg.trials, cfg.threads,
      [&](std::int64_t t) { return simulate_frame(params, alloc, cfg, t); });
  const double fraction =
      data_fraction(cfg.system, alloc.ce_time, alloc.wet_time);
  McEstimate est;
  est.trials = cfg.trials;
  const int users = params.users();
  std::vector<double> samples(cfg.trials);
  for (int k = 0; k < users; ++k) {
    for (int t = 0; t < cfg.trials; ++t) {
      samples[t] =
          fraction * std::log1p(frames[t].sinr[k]) / std::numbers::ln2;
    }
    const Moments m = moments(samples);
    est.mean.push_back(m.mean);
    est.std_error.push_back(m.se);
  }
  for (const FrameSample& f : frames) est.redraws += f.redraws;
  return est;
}

McEstimate estimate_harvested_energy(const SystemParams& params,
                                     const ResourceAllocation& alloc,
                                     const McConfig& cfg) {
  check_config(params, cfg);
  const std::vector<FrameSample> frames = run_trials<FrameSample>(
      cfg.trials, cfg.threads,
      [&](std::int64_t t) { return simulate_frame(params, alloc, cfg, t); });
  McEstimate est;
  est.trials = cfg.trials;
  std::vector<double> samples(cfg.trials);
  for (int k = 0; k < params.users(); ++k) {
    for (int t = 0; t < cfg.trials; ++t) samples[t] = frames[t].energy[k];
    const Moments m = moments(samples);
    est.mean.push_back(m.mean);
    est.std_error.push_back(m.se);
  }
  for (const FrameSample& f : frames) est.redraws += f.redraws;
  return est;
}

std::vector<BoundCheck> verify_bound_tightness(const SystemParams& params,
                                               const ResourceAllocation& alloc,
                                               const McConfig& cfg) {
  const McEstimate exact = estimate_exact_rate(params, alloc, cfg);
  const RateReport bound =
      evaluate_rate(params, alloc, cfg.system, cfg.detector);
  std::vector<BoundCheck> out(params.users());
  for (int k = 0; k < params.users(); ++k) {
    BoundCheck& c = out[k];
    c.exact = exact.mean[k];
    c.exact_se = exact.std_error[k];
    c.bound = bound.rate[k];
    c.gap = c.exact - c.bound;
    c.relative_gap = c.exact > 0.0 ? c.gap / c.exact : 0.0;
    if (cfg.trials < kMinTrialsForVerdict) {
      c.verdict = BoundVerdict::kInconclusive;
    } else {
      c.verdict = c.gap >= -3.0 * c.exact_se ? BoundVerdict::kHolds
                                             : BoundVerdict::kViolated;
    }
  }
  return out;
}

std::vector<BeamformerComparison> verify_beamformer_structure(
    const SystemParams& params, const ResourceAllocation& alloc,
    double theta_mass, const McConfig& cfg) {
  params.validate();
  if (cfg.trials < 1) throw InvalidParameter("trial count must be >= 1");
  if (cfg.system != System::kWetMm) {
    throw InvalidParameter("beamformer comparison applies to WET-MM only");
  }
  if (!(theta_mass >= 0.0 && theta_mass <= 1.0)) {
    throw InvalidParameter("theta mass must lie in [0, 1]");
  }
  const int users = params.users();
  if (params.antennas <= users) {
    throw InvalidParameter("orthogonal complement needs M > K");
  }
  alloc.validate(users);
  const EnergyReport er = energy_report(params, alloc, System::kWetMm);
  const double scale = alloc.wet_time * params.dl_power;
  std::vector<double> shrunk(users);
  for (int k = 0; k < users; ++k) {
    shrunk[k] = (1.0 - theta_mass) * alloc.energy_weights[k];
  }
  const std::vector<double> spread(params.antennas - users,
                                   theta_mass / (params.antennas - users));

  using Pair = std::pair<std::vector<double>, std::vector<double>>;
  const std::vector<Pair> samples = run_trials<Pair>(
      cfg.trials, cfg.threads, [&](std::int64_t t) {
        const std::uint64_t seed = split_seed(
            split_seed(cfg.seed, static_cast<std::uint64_t>(t)), 0);
        const Draw d = draw(params, er, System::kWetMm, cfg.path, seed);
        const CVector ws = beamformer(d.estimate, alloc.energy_weights);
        const CVector wg = general_beamformer(d.estimate, shrunk, spread);
        return Pair{energy_samples(d.channel, ws, scale),
                    energy_samples(d.channel, wg, scale)};
      });

  std::vector<BeamformerComparison> out(users);
  std::vector<double> a(cfg.trials), b(cfg.trials), diff(cfg.trials);
  for (int k = 0; k < users; ++k) {
    for (int t = 0; t < cfg.trials; ++t) {
      a[t] = samples[t].first[k];
      b[t] = samples[t].second[k];
      diff[t] = a[t] - b[t];
    }
    const Moments ma = moments(a), mb = moments(b), md = moments(diff);
    out[k] = {ma.mean, ma.se, mb.mean, mb.se, md.mean, md.se};
  }
  return out;
}

double ValidationRow::z_score() const {
  const double diff = mc_mean - closed_form;
  if (mc_se > 0.0) return diff / mc_se;
  return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

std::vector<ValidationRow> validate_closed_forms(const SystemParams& params,
                                                 const ResourceAllocation& alloc,
                                                 const McConfig& cfg) {
  params.validate();
  if (cfg.trials < 1) throw InvalidParameter("trial count must be >= 1");
  const int users = params.users();
  alloc.validate(users);
  if (!(alloc.wet_time > 0.0)) {
    throw InvalidParameter("closed-form validation needs alpha > 0");
  }
  const EnergyReport er = energy_report(params, alloc, System::kWetMm);
  const double scale = alloc.wet_time * params.dl_power;
  const CVector omni = CVector::Constant(
      params.antennas, Complex(1.0 / std::sqrt(params.antennas), 0.0));

  // Per trial: harvested energy, per-antenna error power, omni energy.
  struct Sample {
    std::vector<double> energy, error, omni;
  };
  const std::vector<Sample> samples = run_trials<Sample>(
      cfg.trials, cfg.threads, [&](std::int64_t t) {
        const std::uint64_t seed = split_seed(
            split_seed(cfg.seed, static_cast<std::uint64_t>(t)), 0);
        const ChannelRealization r = draw_realization(
            params, er.pilot_energy, ChannelPath::kFullPilot, seed);
        Sample s;
        s.energy = energy_samples(
            r.channel, beamformer(r.estimate, alloc.energy_weights), scale);
        s.omni = energy_samples(r.channel, omni, scale);
        s.error.resize(users);
        for (int k = 0; k < users; ++k) {
          s.error[k] = (r.channel.col(k) - r.estimate.col(k)).squaredNorm() /
                       params.antennas;
        }
        return s;
      });

  std::vector<ValidationRow> rows;
  std::vector<double> x(cfg.trials);
  auto add = [&](const char* name, int k, double closed,
                 std::vector<double> Sample::*field) {
    for (int t = 0; t < cfg.trials; ++t) x[t] = (samples[t].*field)[k];
    const Moments m = moments(x);
    rows.push_back({name, k, closed, m.mean, m.se});
  };
  for (int k = 0; k < users; ++k) {
    add("harvested_energy", k, er.harvested[k], &Sample::energy);
  }
  for (int k = 0; k < users; ++k) {
    add("error_variance", k, er.error_var[k], &Sample::error);
  }
  for (int k = 0; k < users; ++k) {
    add("opmm_energy", k,
        opmm_energy(alloc.wet_time, params.path_loss[k], params.dl_power),
        &Sample::omni);
  }
  return rows;
}

}  // namespace wetmm
