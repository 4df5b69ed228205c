#include "wetmm/estimation.h"

#include <cmath>
#include <numbers>
#include <string>

namespace wetmm {

PilotConfig make_pilots(int length, int users, std::vector<double> energy) {
  if (users < 1) throw InvalidParameter("at least one user required");
  if (length < users) {
    throw InvalidParameter("pilot length " + std::to_string(length) +
                           " is shorter than the user count " +
                           std::to_string(users));
  }
  if (static_cast<int>(energy.size()) != users) {
    throw InvalidParameter("one pilot energy per user required");
  }
  for (double e : energy) {
    if (!(e >= 0.0)) throw InvalidParameter("pilot energy must be >= 0");
  }
  PilotConfig pilots;
  pilots.length = length;
  pilots.energy = std::move(energy);
  pilots.phi.resize(length, users);
  const double scale = 1.0 / std::sqrt(static_cast<double>(length));
  for (int l = 0; l < length; ++l) {
    for (int k = 0; k < users; ++k) {
      const double angle = -2.0 * std::numbers::pi * l * k / length;
      pilots.phi(l, k) = std::polar(scale, angle);
    }
  }
  return pilots;
}

namespace {

Eigen::VectorXd sqrt_energy(const PilotConfig& pilots) {
  Eigen::VectorXd s(pilots.energy.size());
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    s(k) = std::sqrt(pilots.energy[k]);
  }
  return s;
}

}  // namespace

CMatrix receive_pilots(const CMatrix& channel, const PilotConfig& pilots,
                       double noise, Rng& rng) {
  if (channel.cols() != pilots.phi.cols()) {
    throw InvalidParameter("channel has " + std::to_string(channel.cols()) +
                           " columns but pilots serve " +
                           std::to_string(pilots.phi.cols()) + " users");
  }
  if (!(noise >= 0.0)) throw InvalidParameter("noise power must be >= 0");
  const CMatrix sequences = pilots.phi * sqrt_energy(pilots).asDiagonal();
  CMatrix received = channel * sequences.transpose();
  if (noise > 0.0) {
    received += rng.complex_normal_matrix(received.rows(), received.cols(),
                                          noise);
  }
  return received;
}

CMatrix receive_pilots(const CMatrix& channel, const PilotConfig& pilots,
                       double noise, std::uint64_t seed) {
  Rng rng(seed);
  return receive_pilots(channel, pilots, noise, rng);
}

CMatrix mmse_estimate(const CMatrix& received, const PilotConfig& pilots,
                      std::span<const double> path_loss, double noise) {
  const Eigen::Index users = pilots.phi.cols();
  if (received.cols() != pilots.phi.rows() ||
      static_cast<Eigen::Index>(path_loss.size()) != users) {
    throw InvalidParameter("received block, pilots and path losses disagree");
  }
  if (!(noise >= 0.0)) throw InvalidParameter("noise power must be >= 0");
  // Despreading leaves y_k = sqrt(D_k) g_k + n_k; each column is then
  // scaled by its scalar MMSE gain.
  CMatrix estimate = received * pilots.phi.conjugate();
  for (Eigen::Index k = 0; k < users; ++k) {
    const double d = pilots.energy[k];
    const double b = path_loss[k];
    const double denom = b * d + noise;
    if (!(denom > 0.0)) {
      throw InvalidParameter("MMSE scaling is singular (zero noise and zero "
                             "pilot energy)");
    }
    estimate.col(k) *= std::sqrt(d) * b / denom;
  }
  return estimate;
}

double error_variance(double beta, double pilot_energy, double noise) {
  if (!(beta > 0.0) || !(pilot_energy >= 0.0) || !(noise > 0.0)) {
    throw InvalidParameter("error_variance needs beta > 0, energy >= 0, "
                           "noise > 0");
  }
  // beta s2 / (s2 + beta Lp), written to stay accurate for huge SNR.
  return beta * noise / (noise + beta * pilot_energy);
}

ChannelRealization draw_realization(const SystemParams& params,
                                    std::span<const double> pilot_energy,
                                    ChannelPath path, std::uint64_t seed) {
  params.validate();
  const int users = params.users();
  if (static_cast<int>(pilot_energy.size()) != users) {
    throw InvalidParameter("one pilot energy per user required");
  }
  ChannelRealization out;
  out.seed = seed;
  out.error_var.resize(users);
  for (int k = 0; k < users; ++k) {
    out.error_var[k] =
        error_variance(params.path_loss[k], pilot_energy[k], params.ul_noise);
  }

  Rng rng(seed);
  if (path == ChannelPath::kFullPilot) {
    const PilotConfig pilots = make_pilots(
        users, users, std::vector<double>(pilot_energy.begin(),
                                          pilot_energy.end()));
    out.channel = generate_channel(params, rng);
    const CMatrix received =
        receive_pilots(out.channel, pilots, params.ul_noise, rng);
    out.estimate =
        mmse_estimate(received, pilots, params.path_loss, params.ul_noise);
    return out;
  }

  out.estimate.resize(params.antennas, users);
  out.channel.resize(params.antennas, users);
  for (int k = 0; k < users; ++k) {
    const double est_var = params.path_loss[k] - out.error_var[k];
    for (int m = 0; m < params.antennas; ++m) {
      out.estimate(m, k) = rng.complex_normal(est_var);
    }
    for (int m = 0; m < params.antennas; ++m) {
      out.channel(m, k) = out.estimate(m, k) - rng.complex_normal(out.error_var[k]);
    }
  }
  return out;
}

}  // namespace wetmm
