#include "wetmm/random.h"

#include <cmath>

namespace wetmm {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t split_seed(std::uint64_t parent, std::uint64_t index) {
  return mix64(parent ^ mix64(index + 0x9E3779B97F4A7C15ULL));
}

Complex Rng::complex_normal(double variance) {
  const double s = std::sqrt(variance / 2.0);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

CMatrix Rng::complex_normal_matrix(Eigen::Index rows, Eigen::Index cols,
                                   double variance) {
  CMatrix out(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      out(r, c) = complex_normal(variance);
    }
  }
  return out;
}

}  // namespace wetmm
