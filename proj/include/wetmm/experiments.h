#ifndef WETMM_EXPERIMENTS_H_
#define WETMM_EXPERIMENTS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wetmm/estimation.h"
#include "wetmm/optimizer.h"
#include "wetmm/sysmodel.h"
#include "wetmm/types.h"

namespace wetmm {

enum class PowerUnit { kWatt, kDbm };

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

// Everything an experiment run depends on. Powers are linear watts here;
// the config file may give them in dBm (power_unit = dbm).
struct ExperimentSpec {
  std::string experiment = "optimize";

  double dl_power = 1.0;
  double ul_noise = 1e-15;
  double user_noise = 1e-15;
  double beta0 = 1e-3;
  double path_loss_exponent = 3.0;
  std::vector<double> distances{6.0, 12.0};
  double carrier_frequency = 5e9;  // metadata only
  double bandwidth = 1e5;          // metadata only

  int antennas = 200;
  std::vector<int> antenna_grid{25, 50, 100, 200, 400, 600, 800, 1000};
  std::vector<int> rate_grid{3,  4,  5,  6,   8,   10,  12,  15,  20,
                             25, 30, 40, 50,  60,  80,  100, 150, 200,
                             300, 400, 500, 600, 800, 1000};
  std::vector<int> validate_grid{10, 50, 200};

  Detector detector = Detector::kZf;
  System system = System::kWetMm;
  WeightPolicy policy = WeightPolicy::kAnalytic;
  GridSpec grid;

  int trials = 1000;
  std::uint64_t seed = 1;
  ChannelPath path = ChannelPath::kStatistical;

  // contour and rho-sweep
  double fixed_split = 0.5965;
  double fixed_ce_time = 0.00825;
  double fixed_wet_time = 0.0760;
  double contour_ce_max = 0.05;
  double contour_wet_max = 0.2;

  // mc-validate
  std::vector<double> theta_masses{0.1, 0.2, 0.5};

  // large-k
  std::vector<int> large_k_users{10, 100, 1000, 10000};
  double large_k_wet_time = 0.1;
  double load_step = 0.01;
  double target_rate = 10.0;

  // rate-vs-m
  std::vector<double> rate_targets{10.0, 8.0, 6.4};

  std::filesystem::path output_dir = "out";

  SystemParams system_params(int antennas) const;
  void validate() const;
  nlohmann::json to_json() const;
};

// Flat "key = value" text, '#' starts a comment, list values are comma
// separated. Unknown keys throw InvalidParameter naming the line.
// `unit_override` replaces any power_unit given in the text.
ExperimentSpec parse_spec(std::string_view text,
                          std::optional<PowerUnit> unit_override = {},
                          ExperimentSpec base = {});
ExperimentSpec load_spec(const std::filesystem::path& path,
                         std::optional<PowerUnit> unit_override = {},
                         ExperimentSpec base = {});

struct Table {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
};

struct ExperimentOutput {
  std::vector<Table> tables;
  nlohmann::json summary = nlohmann::json::object();
};

// Shortest round-trip decimal form, '.' separator, locale independent.
std::string format_number(double x);
std::string format_number(std::int64_t x);
std::string to_csv(const Table& table);

// Writes each table as <dir>/<name>.csv and the sidecar <dir>/<experiment>.json
// (resolved spec plus summary). Every file goes through a temporary file and
// a rename.
std::vector<std::filesystem::path> write_output(const ExperimentSpec& spec,
                                                const ExperimentOutput& out);
void write_atomic(const std::filesystem::path& path, std::string_view data);

ExperimentOutput run_optimize(const ExperimentSpec& spec);
ExperimentOutput run_table1(const ExperimentSpec& spec);
ExperimentOutput run_contour(const ExperimentSpec& spec);
ExperimentOutput run_rho_sweep(const ExperimentSpec& spec);
ExperimentOutput run_rate_vs_m(const ExperimentSpec& spec);
ExperimentOutput run_fairness(const ExperimentSpec& spec);
ExperimentOutput run_mc_validate(const ExperimentSpec& spec);
ExperimentOutput run_large_k(const ExperimentSpec& spec);

// Dispatch on spec.experiment.
ExperimentOutput run_experiment(const ExperimentSpec& spec);

// Smallest M at which the piecewise-linear (in log M) interpolation of
// `rates` reaches `target`. nullopt if the grid never reaches it.
std::optional<double> antennas_for_rate(std::span<const double> antennas,
                                        std::span<const double> rates,
                                        double target);

}  // namespace wetmm

#endif  // WETMM_EXPERIMENTS_H_
