#ifndef WETMM_OPTIMIZER_INL_H_
#define WETMM_OPTIMIZER_INL_H_

#include <cmath>

namespace wetmm {

template <typename F>
double golden_section_max(F&& f, double lo, double hi, double tol,
                          int max_iterations) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iterations && (hi - lo) > tol; ++i) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

}  // namespace wetmm

#endif  // WETMM_OPTIMIZER_INL_H_
