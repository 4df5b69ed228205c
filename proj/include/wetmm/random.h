#ifndef WETMM_RANDOM_H_
#define WETMM_RANDOM_H_

#include <cstdint>
#include <random>

#include "wetmm/types.h"

namespace wetmm {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Seed-splitting rule used everywhere a reproducible sub-stream is needed:
//
//   split_seed(parent, index) = mix64(parent ^ mix64(index + 0x9E3779B97F4A7C15))
//
// Monte Carlo trial t of a run with master seed s uses split_seed(s, t); the
// r-th redraw inside that trial uses split_seed(split_seed(s, t), r). Streams
// depend only on (seed, index), never on the order in which trials execute.
std::uint64_t split_seed(std::uint64_t parent, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  // Circularly symmetric complex Gaussian with E|z|^2 = variance.
  Complex complex_normal(double variance = 1.0);

  // Fills a rows x cols matrix with i.i.d. CN(0, variance) entries,
  // column-major order.
  CMatrix complex_normal_matrix(Eigen::Index rows, Eigen::Index cols,
                                double variance = 1.0);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace wetmm

#endif  // WETMM_RANDOM_H_
