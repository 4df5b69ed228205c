// Command-line runner for the WET-MM experiments.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wetmm/experiments.h"

namespace {

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> detector;
  std::optional<std::string> system;
  std::optional<int> trials;
  std::optional<int> antennas;
  std::optional<int> threads;
  std::optional<std::string> power_unit;
};

wetmm::ExperimentSpec resolve(const GlobalFlags& g, const std::string& kind) {
  std::optional<wetmm::PowerUnit> unit;
  if (g.power_unit) {
    unit = *g.power_unit == "dbm" ? wetmm::PowerUnit::kDbm
                                  : wetmm::PowerUnit::kWatt;
  }
  wetmm::ExperimentSpec spec;
  if (!g.config.empty()) spec = wetmm::load_spec(g.config, unit);
  spec.experiment = kind;
  if (g.seed) spec.seed = *g.seed;
  if (g.out) spec.output_dir = *g.out;
  if (g.detector) spec.detector = wetmm::parse_detector(*g.detector);
  if (g.system) spec.system = wetmm::parse_system(*g.system);
  if (g.trials) spec.trials = *g.trials;
  if (g.antennas) spec.antennas = *g.antennas;
  if (g.threads) spec.grid.threads = *g.threads;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wireless-powered massive MIMO experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags g;
  app.add_option("--config", g.config, "key = value experiment file")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--detector", g.detector, "zf or mrc")
      ->check(CLI::IsMember({"zf", "mrc"}));
  app.add_option("--system", g.system, "wetmm, ideal or opmm")
      ->check(CLI::IsMember({"wetmm", "ideal", "opmm"}));
  app.add_option("--trials", g.trials, "Monte Carlo trials")
      ->check(CLI::PositiveNumber);
  app.add_option("--antennas", g.antennas, "antenna count M")
      ->check(CLI::Range(2, 1 << 20));
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--power-unit", g.power_unit,
                 "unit of powers in the config file")
      ->check(CLI::IsMember({"watt", "dbm"}));

  const std::vector<std::pair<std::string, std::string>> kinds = {
      {"optimize", "max-min allocation by grid search (and analytic solve)"},
      {"table1", "optimal allocation and rates versus M"},
      {"contour", "rate over (tau, alpha) at fixed rho"},
      {"rho-sweep", "rate versus rho at fixed (tau, alpha)"},
      {"rate-vs-m", "optimized min rate versus M for every system"},
      {"fairness", "per-user Monte Carlo rates versus M"},
      {"mc-validate", "closed forms against Monte Carlo"},
      {"large-k", "user-load scaling and c1 convergence"},
  };
  for (const auto& [name, help] : kinds) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const std::string kind = app.get_subcommands().front()->get_name();
    const wetmm::ExperimentSpec spec = resolve(g, kind);
    const wetmm::ExperimentOutput out = wetmm::run_experiment(spec);
    for (const auto& path : wetmm::write_output(spec, out)) {
      std::cout << path.string() << "\n";
    }
    std::cout << out.summary.dump(2) << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
