// Independent reference computations used only by the tests. Each one takes a
// different route from the library code it checks.
#ifndef WETMM_TESTS_ORACLES_H_
#define WETMM_TESTS_ORACLES_H_

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

// Expected harvested energy in the textbook form, before any rearrangement.
inline double harvested(double pilot_energy, double alpha, double xi,
                        double beta, int m, double p, double s2) {
  return alpha * p * xi * beta * m *
             (1.0 - (m - 1.0) * s2 / (m * (beta * pilot_energy + s2))) +
         alpha * p * beta * (1.0 - xi);
}

// Steady state by plain fixed-point iteration E <- Q(rho E). Q is concave
// and increasing with Q(0) > 0, so the iteration converges monotonically.
inline double fixed_point_iterate(double alpha, double rho, double xi,
                                  double beta, int m, double p, double s2) {
  double e = alpha * p * beta;
  for (int i = 0; i < 100000; ++i) {
    const double next = harvested(rho * e, alpha, xi, beta, m, p, s2);
    if (std::abs(next - e) <= 1e-15 * next) return next;
    e = next;
  }
  return e;
}

inline double mmse_error(double beta, double pilot_energy, double s2) {
  return beta - beta * beta * pilot_energy / (beta * pilot_energy + s2);
}

struct Users {
  std::vector<double> beta, power, error_var;
};

// ZF SINR written in powers and error variances:
//   p_k (M - K)(beta_k - s_ek^2) / (s2 + sum_i p_i s_ei^2).
inline std::vector<double> zf_sinr(const Users& u, int m, double s2) {
  const int k_users = static_cast<int>(u.beta.size());
  double leak = s2;
  for (int i = 0; i < k_users; ++i) leak += u.power[i] * u.error_var[i];
  std::vector<double> out(k_users);
  for (int k = 0; k < k_users; ++k) {
    out[k] = u.power[k] * (m - k_users) * (u.beta[k] - u.error_var[k]) / leak;
  }
  return out;
}

// MRC SINR in the same variables:
//   p_k (M - 1)(beta_k - s_ek^2) / (sum_{i!=k} p_i beta_i + p_k s_ek^2 + s2).
inline std::vector<double> mrc_sinr(const Users& u, int m, double s2) {
  const int k_users = static_cast<int>(u.beta.size());
  std::vector<double> out(k_users);
  for (int k = 0; k < k_users; ++k) {
    double den = s2 + u.power[k] * u.error_var[k];
    for (int i = 0; i < k_users; ++i) {
      if (i != k) den += u.power[i] * u.beta[i];
    }
    out[k] = u.power[k] * (m - 1) * (u.beta[k] - u.error_var[k]) / den;
  }
  return out;
}

// Builds the per-user powers and error variances of the WET-MM steady state
// by iteration.
inline Users steady_state(const std::vector<double>& beta,
                          const std::vector<double>& xi, double tau,
                          double alpha, double rho, int m, double p,
                          double s2) {
  Users u;
  u.beta = beta;
  for (std::size_t k = 0; k < beta.size(); ++k) {
    const double e = fixed_point_iterate(alpha, rho, xi[k], beta[k], m, p, s2);
    u.power.push_back((1.0 - rho) * e / (1.0 - tau - alpha));
    u.error_var.push_back(mmse_error(beta[k], rho * e, s2));
  }
  return u;
}

inline double rate(double fraction, double sinr) {
  return fraction * std::log2(1.0 + sinr);
}

// Composite Simpson integration.
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n = 2000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

inline Moments moments(const std::vector<double>& x) {
  Moments m;
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m.mean) * (v - m.mean);
  m.se = std::sqrt(ss / (x.size() - 1.0) / x.size());
  return m;
}

// Least-squares slope of y on x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

}  // namespace oracle

#endif  // WETMM_TESTS_ORACLES_H_
