#include "wetmm/optimizer.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "wetmm/rates.h"

namespace wetmm {

std::vector<double> optimal_weights(std::span<const double> path_loss) {
  if (path_loss.empty()) throw InvalidParameter("no users");
  std::vector<double> xi(path_loss.size());
  // Normalize by the smallest beta first so beta^-2 cannot overflow.
  const double bmin = *std::min_element(path_loss.begin(), path_loss.end());
  if (!(bmin > 0.0)) throw InvalidParameter("path losses must be positive");
  double sum = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) {
    const double r = bmin / path_loss[k];
    xi[k] = r * r;
    sum += xi[k];
  }
  for (double& x : xi) x /= sum;
  return xi;
}

double optimal_split_zf(int users, double ce_time, double wet_time) {
  if (users < 1) throw InvalidParameter("at least one user required");
  const double t = 1.0 - ce_time - wet_time;
  if (!(ce_time >= 0.0 && wet_time >= 0.0) || !(t > 0.0)) {
    throw DomainError("need tau, alpha >= 0 and tau + alpha < 1");
  }
  const double rk = std::sqrt(static_cast<double>(users));
  return rk / (rk + std::sqrt(t));
}

TimeAllocation asymptotic_allocation(int antennas, Detector detector,
                                     double exponent, double scale) {
  if (antennas < 1) throw InvalidParameter("antenna count must be positive");
  if (!(scale > 0.0)) throw InvalidParameter("scale must be positive");
  double e = exponent;
  if (e < 0.0) e = detector == Detector::kZf ? 0.05 : 0.9;
  const double power = detector == Detector::kZf ? 2.0 * e : e;
  TimeAllocation out;
  out.ce_time = 0.0;
  out.wet_time = std::min(scale * std::pow(antennas, -power), 0.999);
  return out;
}

namespace {

constexpr int kDims = 4;  // tau, alpha, rho, xi_1
using Index = std::array<std::int64_t, kDims>;

struct Candidate {
  double rate = -std::numeric_limits<double>::infinity();
  Index idx{};
  bool valid = false;
};

// Higher rate wins; ties go to the lexicographically smaller index.
bool better(const Candidate& a, const Candidate& b) {
  if (!a.valid) return false;
  if (!b.valid) return true;
  if (a.rate != b.rate) return a.rate > b.rate;
  return a.idx < b.idx;
}

struct Window {
  Index lo{};
  Index hi{};
  std::int64_t stride = 1;
};

class LatticeSearch {
 public:
  LatticeSearch(const SystemParams& params, System system, Detector detector,
                const GridSpec& grid, WeightPolicy policy)
      : params_(params),
        system_(system),
        detector_(detector),
        grid_(grid),
        policy_(policy),
        analytic_(optimal_weights(params.path_loss)) {
    const bool ideal = system == System::kIdeal;
    bound_lo_ = {0, 1, 0, 0};
    bound_hi_[0] = ideal ? 0
                         : static_cast<std::int64_t>(
                               std::floor((1.0 - grid.wet_step) / grid.ce_step));
    bound_hi_[1] =
        static_cast<std::int64_t>(std::floor((1.0 - 1e-12) / grid.wet_step));
    bound_hi_[2] =
        ideal ? 0
              : static_cast<std::int64_t>(std::floor(
                    (grid.split_max - grid.split_min) / grid.split_step + 1e-9));
    bound_hi_[3] = policy == WeightPolicy::kSimplexGrid
                       ? static_cast<std::int64_t>(
                             std::llround(1.0 / grid.weight_step))
                       : 0;
    threads_ = grid.threads > 0
                   ? grid.threads
                   : static_cast<int>(
                         std::max(1u, std::thread::hardware_concurrency()));
  }

  double ce(const Index& i) const {
    return system_ == System::kIdeal ? 0.0 : i[0] * grid_.ce_step;
  }
  double wet(const Index& i) const { return i[1] * grid_.wet_step; }
  double split(const Index& i) const {
    if (system_ == System::kIdeal) return 0.0;
    // Keep lattice values like 0.6005 free of accumulated rounding when
    // split_min sits on the step lattice.
    const double base = grid_.split_min / grid_.split_step;
    if (std::abs(base - std::round(base)) < 1e-9) {
      return (std::round(base) + i[2]) * grid_.split_step;
    }
    return grid_.split_min + i[2] * grid_.split_step;
  }
  std::vector<double> weights(const Index& i) const {
    if (policy_ == WeightPolicy::kAnalytic) return analytic_;
    const double x = std::min(1.0, i[3] * grid_.weight_step);
    return {x, 1.0 - x};
  }

  Candidate evaluate(const Index& i, std::vector<double>& scratch,
                     std::vector<double>& xi) const {
    Candidate c;
    c.idx = i;
    const double tau = ce(i);
    const double a = wet(i);
    if (!(tau + a < 1.0)) return c;
    if (policy_ == WeightPolicy::kSimplexGrid) {
      const double x = std::min(1.0, i[3] * grid_.weight_step);
      xi[0] = x;
      xi[1] = 1.0 - x;
    }
    const double r = min_rate(params_, system_, detector_, tau, a, split(i),
                              xi, scratch);
    if (std::isnan(r)) return c;
    c.rate = r;
    c.valid = true;
    return c;
  }

  // Best point of one window, split across threads.
  Candidate scan(const Window& w) {
    std::vector<Index> points;
    Index cur = w.lo;
    for (;;) {
      points.push_back(cur);
      int d = kDims - 1;
      for (; d >= 0; --d) {
        cur[d] += w.stride;
        if (cur[d] <= w.hi[d]) break;
        cur[d] = w.lo[d];
      }
      if (d < 0) break;
    }
    evaluations_ += static_cast<std::int64_t>(points.size());

    const int workers = static_cast<int>(std::min<std::size_t>(
        threads_, std::max<std::size_t>(1, points.size() / 4096)));
    std::vector<Candidate> partial(workers);
    auto work = [&](int t) {
      std::vector<double> scratch(2 * params_.path_loss.size());
      std::vector<double> xi = analytic_;
      Candidate best;
      for (std::size_t p = t; p < points.size(); p += workers) {
        const Candidate c = evaluate(points[p], scratch, xi);
        if (better(c, best)) best = c;
      }
      partial[t] = best;
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < workers; ++t) pool.emplace_back(work, t);
      for (auto& th : pool) th.join();
    }
    Candidate best;
    for (const Candidate& c : partial) {
      if (better(c, best)) best = c;
    }
    return best;
  }

  Window around(const Index& center, std::int64_t half, std::int64_t stride) const {
    Window w;
    w.stride = stride;
    for (int d = 0; d < kDims; ++d) {
      // lo stays on the center's stride lattice so the center is visited.
      const std::int64_t below =
          std::min(half, (center[d] - bound_lo_[d]) / stride * stride);
      w.lo[d] = center[d] - below;
      w.hi[d] = std::min(bound_hi_[d], center[d] + half);
    }
    return w;
  }

  bool on_inner_edge(const Candidate& c, const Window& w) const {
    for (int d = 0; d < kDims; ++d) {
      if (c.idx[d] == w.lo[d] && w.lo[d] > bound_lo_[d]) return true;
      if (c.idx[d] + w.stride > w.hi[d] && w.hi[d] < bound_hi_[d]) return true;
    }
    return false;
  }

  // Scans a window around `seed`, re-centering while the best point sits
  // on an edge that is not a lattice boundary.
  Candidate local(Candidate seed, std::int64_t half, std::int64_t stride) {
    for (int moves = 0; moves < 10000; ++moves) {
      const Window w = around(seed.idx, half, stride);
      const Candidate c = scan(w);
      const bool moved = better(c, seed);
      if (moved) seed = c;
      if (!moved || !on_inner_edge(seed, w)) break;
    }
    return seed;
  }

  Candidate run() {
    if (grid_.exhaustive) {
      return scan(Window{bound_lo_, bound_hi_, 1});
    }
    std::int64_t stride = 1;
    auto coarse_size = [&](std::int64_t s) {
      double n = 1.0;
      for (int d = 0; d < kDims; ++d) {
        n *= static_cast<double>((bound_hi_[d] - bound_lo_[d]) / s + 1);
      }
      return n;
    };
    while (coarse_size(stride) > static_cast<double>(grid_.coarse_budget)) {
      stride *= 2;
    }
    Candidate best = scan(Window{bound_lo_, bound_hi_, stride});
    if (!best.valid) return best;
    while (stride > 1) {
      const std::int64_t prev = stride;
      stride /= 2;
      best = local(best, 2 * prev, stride);
    }
    return local(best, grid_.refine_window, 1);
  }

  std::int64_t evaluations() const { return evaluations_; }

 private:
  const SystemParams& params_;
  System system_;
  Detector detector_;
  GridSpec grid_;
  WeightPolicy policy_;
  std::vector<double> analytic_;
  Index bound_lo_{};
  Index bound_hi_{};
  int threads_ = 1;
  std::int64_t evaluations_ = 0;
};

void check_grid(const GridSpec& g) {
  if (!(g.ce_step > 0.0) || !(g.wet_step > 0.0) || !(g.split_step > 0.0) ||
      !(g.weight_step > 0.0)) {
    throw InvalidParameter("grid steps must be positive");
  }
  if (!(g.split_min > 0.0) || !(g.split_max < 1.0) ||
      !(g.split_min <= g.split_max)) {
    throw InvalidParameter("rho range must satisfy 0 < min <= max < 1");
  }
  if (!(g.wet_step < 1.0)) {
    throw InvalidParameter("empty feasible grid: alpha step must be < 1");
  }
  if (g.coarse_budget < 1 || g.refine_window < 1) {
    throw InvalidParameter("coarse budget and refine window must be positive");
  }
}

}  // namespace

OptimizationResult grid_search_p1(const SystemParams& params, System system,
                                  Detector detector, const GridSpec& grid,
                                  WeightPolicy policy) {
  params.validate();
  check_grid(grid);
  if (detector == Detector::kZf && params.antennas <= params.users()) {
    throw InvalidParameter("ZF needs M >= K + 1");
  }
  if (policy == WeightPolicy::kSimplexGrid && params.users() != 2) {
    throw InvalidParameter("simplex weight search supports K = 2 only");
  }
  LatticeSearch search(params, system, detector, grid, policy);
  const Candidate best = search.run();
  if (!best.valid) throw InvalidParameter("empty feasible grid");

  OptimizationResult out;
  out.allocation.ce_time = search.ce(best.idx);
  out.allocation.wet_time = search.wet(best.idx);
  out.allocation.pilot_share = search.split(best.idx);
  out.allocation.energy_weights = search.weights(best.idx);
  const RateReport report =
      evaluate_rate(params, out.allocation, system, detector);
  out.user_rates = report.rate;
  out.min_rate = report.min_rate();
  out.grid = grid;
  out.evaluations = search.evaluations();
  out.system = system;
  out.detector = detector;
  out.policy = policy;
  return out;
}

OptimizationResult solve_p1_analytic(const SystemParams& params,
                                     Detector detector, double mrc_split) {
  params.validate();
  if (detector == Detector::kZf && params.antennas <= params.users()) {
    throw InvalidParameter("ZF needs M >= K + 1");
  }
  if (!(mrc_split > 0.0 && mrc_split < 1.0)) {
    throw InvalidParameter("MRC split must lie in (0, 1)");
  }
  const int users = params.users();
  const std::vector<double> xi = optimal_weights(params.path_loss);
  std::vector<double> scratch(2 * users);
  std::int64_t evaluations = 0;
  auto split_for = [&](double a) {
    return detector == Detector::kZf ? optimal_split_zf(users, 0.0, a)
                                     : mrc_split;
  };
  auto objective = [&](double a) {
    ++evaluations;
    return min_rate(params, System::kWetMm, detector, 0.0, a, split_for(a), xi,
                    scratch);
  };
  const double a = golden_section_max(objective, 1e-6, 1.0 - 1e-6, 1e-10);

  OptimizationResult out;
  out.allocation = ResourceAllocation{0.0, a, split_for(a), xi};
  const RateReport report =
      evaluate_rate(params, out.allocation, System::kWetMm, detector);
  out.user_rates = report.rate;
  out.min_rate = report.min_rate();
  out.evaluations = evaluations;
  out.system = System::kWetMm;
  out.detector = detector;
  out.policy = WeightPolicy::kAnalytic;
  return out;
}

}  // namespace wetmm
