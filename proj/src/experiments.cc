#include "wetmm/experiments.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "wetmm/montecarlo.h"
#include "wetmm/random.h"
#include "wetmm/rates.h"

namespace wetmm {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watt_to_dbm(double watt) {
  if (!(watt > 0.0)) throw InvalidParameter("power must be positive");
  return 10.0 * std::log10(watt) + 30.0;
}

// ---------------------------------------------------------------------------
// Spec

SystemParams ExperimentSpec::system_params(int m) const {
  SystemParams p;
  p.antennas = m;
  p.path_loss = path_loss(PathLossModel{beta0, path_loss_exponent, distances});
  p.dl_power = dl_power;
  p.ul_noise = ul_noise;
  p.user_noise = user_noise;
  p.validate();
  return p;
}

void ExperimentSpec::validate() const {
  system_params(antennas);
  if (trials < 1) throw InvalidParameter("trials must be >= 1");
  auto check_grid = [](const std::vector<int>& g, const char* name) {
    if (g.empty()) throw InvalidParameter(std::string(name) + " is empty");
    for (int m : g) {
      if (m < 2) throw InvalidParameter(std::string(name) + " needs M >= 2");
    }
  };
  check_grid(antenna_grid, "antenna_grid");
  check_grid(rate_grid, "rate_grid");
  check_grid(validate_grid, "validate_grid");
  if (large_k_users.empty()) throw InvalidParameter("large_k_users is empty");
  for (int k : large_k_users) {
    if (k < 1) throw InvalidParameter("large_k_users entries must be >= 1");
  }
  for (double t : theta_masses) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw InvalidParameter("theta masses must lie in [0, 1]");
    }
  }
  if (!(load_step > 0.0 && load_step < 0.5)) {
    throw InvalidParameter("load_step must lie in (0, 0.5)");
  }
  if (!(contour_ce_max >= 0.0) || !(contour_wet_max > 0.0) ||
      !(contour_ce_max + contour_wet_max < 1.0)) {
    throw InvalidParameter("contour ranges must satisfy tau + alpha < 1");
  }
  if (output_dir.empty()) throw InvalidParameter("output_dir is empty");
}

namespace {

std::string_view weight_policy_name(WeightPolicy p) {
  return p == WeightPolicy::kAnalytic ? "analytic" : "simplex";
}

std::string_view path_name(ChannelPath p) {
  return p == ChannelPath::kStatistical ? "statistical" : "full-pilot";
}

}  // namespace

nlohmann::json ExperimentSpec::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["dl_power_w"] = dl_power;
  j["ul_noise_w"] = ul_noise;
  j["ul_noise_dbm"] = watt_to_dbm(ul_noise);
  j["user_noise_w"] = user_noise;
  j["beta0"] = beta0;
  j["path_loss_exponent"] = path_loss_exponent;
  j["distances_m"] = distances;
  j["carrier_frequency_hz"] = carrier_frequency;
  j["bandwidth_hz"] = bandwidth;
  j["antennas"] = antennas;
  j["antenna_grid"] = antenna_grid;
  j["rate_grid"] = rate_grid;
  j["validate_grid"] = validate_grid;
  j["detector"] = std::string(to_string(detector));
  j["system"] = std::string(to_string(system));
  j["weight_policy"] = std::string(weight_policy_name(policy));
  j["grid"] = {{"ce_step", grid.ce_step},
               {"wet_step", grid.wet_step},
               {"split_step", grid.split_step},
               {"split_min", grid.split_min},
               {"split_max", grid.split_max},
               {"weight_step", grid.weight_step},
               {"exhaustive", grid.exhaustive},
               {"coarse_budget", grid.coarse_budget},
               {"refine_window", grid.refine_window}};
  j["trials"] = trials;
  j["seed"] = seed;
  j["channel_path"] = std::string(path_name(path));
  j["fixed_split"] = fixed_split;
  j["fixed_ce_time"] = fixed_ce_time;
  j["fixed_wet_time"] = fixed_wet_time;
  j["contour_ce_max"] = contour_ce_max;
  j["contour_wet_max"] = contour_wet_max;
  j["theta_masses"] = theta_masses;
  j["large_k_users"] = large_k_users;
  j["large_k_wet_time"] = large_k_wet_time;
  j["load_step"] = load_step;
  j["target_rate"] = target_rate;
  j["rate_targets"] = rate_targets;
  j["output_dir"] = output_dir.generic_string();
  return j;
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InvalidParameter("not a number: '" + std::string(s) + "'");
  }
  return v;
}

template <typename T>
T parse_integer(std::string_view s) {
  s = trim(s);
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InvalidParameter("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

bool parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw InvalidParameter("not a boolean: '" + std::string(s) + "'");
}

template <typename T, typename F>
std::vector<T> parse_list(std::string_view s, F&& item) {
  std::vector<T> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(item(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

PowerUnit parse_unit(std::string_view s) {
  s = trim(s);
  if (s == "watt" || s == "w") return PowerUnit::kWatt;
  if (s == "dbm") return PowerUnit::kDbm;
  throw InvalidParameter("power_unit must be watt or dbm");
}

using Setter = std::function<void(ExperimentSpec&, std::string_view)>;

struct RawPowers {
  std::optional<double> dl, ul, user;
};

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"experiment", [](auto& s, auto v) { s.experiment = std::string(trim(v)); }},
      {"beta0", [](auto& s, auto v) { s.beta0 = parse_double(v); }},
      {"path_loss_exponent",
       [](auto& s, auto v) { s.path_loss_exponent = parse_double(v); }},
      {"distances",
       [](auto& s, auto v) { s.distances = parse_list<double>(v, parse_double); }},
      {"carrier_frequency",
       [](auto& s, auto v) { s.carrier_frequency = parse_double(v); }},
      {"bandwidth", [](auto& s, auto v) { s.bandwidth = parse_double(v); }},
      {"antennas", [](auto& s, auto v) { s.antennas = parse_integer<int>(v); }},
      {"antenna_grid",
       [](auto& s, auto v) {
         s.antenna_grid = parse_list<int>(v, parse_integer<int>);
       }},
      {"rate_grid",
       [](auto& s, auto v) { s.rate_grid = parse_list<int>(v, parse_integer<int>); }},
      {"validate_grid",
       [](auto& s, auto v) {
         s.validate_grid = parse_list<int>(v, parse_integer<int>);
       }},
      {"detector", [](auto& s, auto v) { s.detector = parse_detector(trim(v)); }},
      {"system", [](auto& s, auto v) { s.system = parse_system(trim(v)); }},
      {"weight_policy",
       [](auto& s, auto v) {
         v = trim(v);
         if (v == "analytic") {
           s.policy = WeightPolicy::kAnalytic;
         } else if (v == "simplex") {
           s.policy = WeightPolicy::kSimplexGrid;
         } else {
           throw InvalidParameter("weight_policy must be analytic or simplex");
         }
       }},
      {"ce_step", [](auto& s, auto v) { s.grid.ce_step = parse_double(v); }},
      {"wet_step", [](auto& s, auto v) { s.grid.wet_step = parse_double(v); }},
      {"split_step", [](auto& s, auto v) { s.grid.split_step = parse_double(v); }},
      {"split_min", [](auto& s, auto v) { s.grid.split_min = parse_double(v); }},
      {"split_max", [](auto& s, auto v) { s.grid.split_max = parse_double(v); }},
      {"weight_step", [](auto& s, auto v) { s.grid.weight_step = parse_double(v); }},
      {"exhaustive", [](auto& s, auto v) { s.grid.exhaustive = parse_bool(v); }},
      {"coarse_budget",
       [](auto& s, auto v) {
         s.grid.coarse_budget = parse_integer<std::int64_t>(v);
       }},
      {"refine_window",
       [](auto& s, auto v) { s.grid.refine_window = parse_integer<int>(v); }},
      {"threads", [](auto& s, auto v) { s.grid.threads = parse_integer<int>(v); }},
      {"trials", [](auto& s, auto v) { s.trials = parse_integer<int>(v); }},
      {"seed", [](auto& s, auto v) { s.seed = parse_integer<std::uint64_t>(v); }},
      {"channel_path",
       [](auto& s, auto v) {
         v = trim(v);
         if (v == "statistical") {
           s.path = ChannelPath::kStatistical;
         } else if (v == "full-pilot") {
           s.path = ChannelPath::kFullPilot;
         } else {
           throw InvalidParameter("channel_path must be statistical or full-pilot");
         }
       }},
      {"fixed_split", [](auto& s, auto v) { s.fixed_split = parse_double(v); }},
      {"fixed_ce_time", [](auto& s, auto v) { s.fixed_ce_time = parse_double(v); }},
      {"fixed_wet_time",
       [](auto& s, auto v) { s.fixed_wet_time = parse_double(v); }},
      {"contour_ce_max",
       [](auto& s, auto v) { s.contour_ce_max = parse_double(v); }},
      {"contour_wet_max",
       [](auto& s, auto v) { s.contour_wet_max = parse_double(v); }},
      {"theta_masses",
       [](auto& s, auto v) {
         s.theta_masses = parse_list<double>(v, parse_double);
       }},
      {"large_k_users",
       [](auto& s, auto v) {
         s.large_k_users = parse_list<int>(v, parse_integer<int>);
       }},
      {"large_k_wet_time",
       [](auto& s, auto v) { s.large_k_wet_time = parse_double(v); }},
      {"load_step", [](auto& s, auto v) { s.load_step = parse_double(v); }},
      {"target_rate", [](auto& s, auto v) { s.target_rate = parse_double(v); }},
      {"rate_targets",
       [](auto& s, auto v) {
         s.rate_targets = parse_list<double>(v, parse_double);
       }},
      {"output_dir",
       [](auto& s, auto v) { s.output_dir = std::string(trim(v)); }},
  };
  return table;
}

}  // namespace

ExperimentSpec parse_spec(std::string_view text,
                          std::optional<PowerUnit> unit_override,
                          ExperimentSpec base) {
  ExperimentSpec spec = std::move(base);
  RawPowers raw;
  PowerUnit unit = PowerUnit::kWatt;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidParameter("line " + std::to_string(line_no) +
                             ": expected key = value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    try {
      if (key == "power_unit") {
        unit = parse_unit(value);
      } else if (key == "dl_power") {
        raw.dl = parse_double(value);
      } else if (key == "ul_noise") {
        raw.ul = parse_double(value);
      } else if (key == "user_noise") {
        raw.user = parse_double(value);
      } else if (auto it = setters().find(key); it != setters().end()) {
        it->second(spec, value);
      } else {
        throw InvalidParameter("unknown key '" + std::string(key) + "'");
      }
    } catch (const InvalidParameter& e) {
      throw InvalidParameter("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (unit_override) unit = *unit_override;
  auto convert = [unit](double v) {
    return unit == PowerUnit::kDbm ? dbm_to_watt(v) : v;
  };
  if (raw.dl) spec.dl_power = convert(*raw.dl);
  if (raw.ul) spec.ul_noise = convert(*raw.ul);
  if (raw.user) spec.user_noise = convert(*raw.user);
  return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path,
                         std::optional<PowerUnit> unit_override,
                         ExperimentSpec base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidParameter("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str(), unit_override, std::move(base));
}

// ---------------------------------------------------------------------------
// Output

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != header.size()) {
    throw InvalidParameter("row width does not match header of " + name);
  }
  rows.push_back(std::move(row));
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string format_number(std::int64_t x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string fmt(double x) { return format_number(x); }
std::string fmt_int(std::int64_t x) { return format_number(x); }

}  // namespace

std::string to_csv(const Table& table) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cells[i]);
    }
    out += "\r\n";
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view data) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::filesystem::path> write_output(const ExperimentSpec& spec,
                                                const ExperimentOutput& out) {
  std::filesystem::create_directories(spec.output_dir);
  std::vector<std::filesystem::path> written;
  nlohmann::json files = nlohmann::json::array();
  for (const Table& t : out.tables) {
    const auto path = spec.output_dir / (t.name + ".csv");
    write_atomic(path, to_csv(t));
    written.push_back(path);
    files.push_back(t.name + ".csv");
  }
  nlohmann::json sidecar;
  sidecar["spec"] = spec.to_json();
  sidecar["summary"] = out.summary;
  sidecar["files"] = files;
  const auto path = spec.output_dir / (spec.experiment + ".json");
  write_atomic(path, sidecar.dump(2) + "\n");
  written.push_back(path);
  return written;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

McConfig mc_config(const ExperimentSpec& spec, Detector det, System sys,
                   std::uint64_t stream) {
  McConfig c;
  c.trials = spec.trials;
  c.seed = split_seed(spec.seed, stream);
  c.path = spec.path;
  c.detector = det;
  c.system = sys;
  c.threads = spec.grid.threads;
  return c;
}

std::vector<std::string> user_columns(const std::string& prefix, int users) {
  std::vector<std::string> cols;
  for (int k = 1; k <= users; ++k) cols.push_back(prefix + std::to_string(k));
  return cols;
}

void append(std::vector<std::string>& a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
}

std::vector<std::string> fmt_all(const std::vector<double>& v) {
  std::vector<std::string> out;
  for (double x : v) out.push_back(fmt(x));
  return out;
}

nlohmann::json allocation_json(const ResourceAllocation& a) {
  return {{"ce_time", a.ce_time},
          {"wet_time", a.wet_time},
          {"pilot_share", a.pilot_share},
          {"energy_weights", a.energy_weights}};
}

// Stream tags that keep MC seeds of different experiments apart.
constexpr std::uint64_t kStreamTable1 = 1;
constexpr std::uint64_t kStreamFairness = 2;
constexpr std::uint64_t kStreamValidate = 3;
constexpr std::uint64_t kStreamLargeK = 4;

std::uint64_t stream(std::uint64_t tag, std::uint64_t m, std::uint64_t sub = 0) {
  return (tag << 48) ^ (m << 8) ^ sub;
}

}  // namespace

ExperimentOutput run_optimize(const ExperimentSpec& spec) {
  spec.validate();
  const SystemParams params = spec.system_params(spec.antennas);
  const int users = params.users();
  ExperimentOutput out;
  Table t;
  t.name = "optimize";
  t.header = {"method", "M", "system", "detector", "tau", "alpha", "rho"};
  append(t.header, user_columns("xi_", users));
  t.header.push_back("min_rate");
  append(t.header, user_columns("rate_user", users));
  t.header.push_back("evaluations");

  auto add = [&](const char* method, const OptimizationResult& r) {
    std::vector<std::string> row = {
        method,
        fmt_int(spec.antennas),
        std::string(to_string(r.system)),
        std::string(to_string(r.detector)),
        fmt(r.allocation.ce_time),
        fmt(r.allocation.wet_time),
        fmt(r.allocation.pilot_share)};
    append(row, fmt_all(r.allocation.energy_weights));
    row.push_back(fmt(r.min_rate));
    append(row, fmt_all(r.user_rates));
    row.push_back(fmt_int(r.evaluations));
    t.add_row(std::move(row));
    out.summary[method] = {{"allocation", allocation_json(r.allocation)},
                           {"min_rate", r.min_rate},
                           {"user_rates", r.user_rates}};
  };
  add("grid", grid_search_p1(params, spec.system, spec.detector, spec.grid,
                             spec.policy));
  if (spec.system == System::kWetMm) {
    add("analytic", solve_p1_analytic(params, spec.detector));
  }
  out.tables.push_back(std::move(t));
  return out;
}

ExperimentOutput run_table1(const ExperimentSpec& spec) {
  spec.validate();
  const int users = static_cast<int>(spec.distances.size());
  ExperimentOutput out;
  Table t;
  t.name = "table1";
  t.header = {"M",        "tau_grid",        "alpha_grid",    "rho_analytic",
              "rho_grid", "rate_asymptotic", "rate_analytic"};
  append(t.header, user_columns("mc_rate_user", users));
  nlohmann::json rows = nlohmann::json::array();
  for (int m : spec.antenna_grid) {
    const SystemParams params = spec.system_params(m);
    const OptimizationResult opt = grid_search_p1(
        params, System::kWetMm, Detector::kZf, spec.grid, WeightPolicy::kAnalytic);
    const ResourceAllocation& a = opt.allocation;
    const double rho_analytic = optimal_split_zf(users, a.ce_time, a.wet_time);
    const double asym = asymptotic_zf_rate(params, a).min_rate();
    const McEstimate mc = estimate_exact_rate(
        params, a,
        mc_config(spec, Detector::kZf, System::kWetMm, stream(kStreamTable1, m)));
    std::vector<std::string> row = {fmt_int(m),          fmt(a.ce_time),
                                    fmt(a.wet_time),     fmt(rho_analytic),
                                    fmt(a.pilot_share),  fmt(asym),
                                    fmt(opt.min_rate)};
    append(row, fmt_all(mc.mean));
    t.add_row(std::move(row));
    rows.push_back({{"M", m},
                    {"mc_std_error", mc.std_error},
                    {"mc_redraws", mc.redraws},
                    {"evaluations", opt.evaluations}});
  }
  out.summary["rows"] = rows;
  out.tables.push_back(std::move(t));
  return out;
}

ExperimentOutput run_contour(const ExperimentSpec& spec) {
  spec.validate();
  const SystemParams params = spec.system_params(spec.antennas);
  const int users = params.users();
  const std::vector<double> xi = optimal_weights(params.path_loss);
  ExperimentOutput out;
  Table t;
  t.name = "contour";
  t.header = {"tau", "alpha"};
  append(t.header, user_columns("rate_user", users));
  t.header.push_back("min_rate");
  const auto n_ce = static_cast<std::int64_t>(
      std::floor(spec.contour_ce_max / spec.grid.ce_step + 1e-9));
  const auto n_wet = static_cast<std::int64_t>(
      std::floor(spec.contour_wet_max / spec.grid.wet_step + 1e-9));
  double best = -1.0;
  ResourceAllocation best_alloc;
  for (std::int64_t i = 0; i <= n_ce; ++i) {
    for (std::int64_t j = 0; j <= n_wet; ++j) {
      const ResourceAllocation a{i * spec.grid.ce_step, j * spec.grid.wet_step,
                                 spec.fixed_split, xi};
      const RateReport r = evaluate_rate(params, a, spec.system, spec.detector);
      std::vector<std::string> row = {fmt(a.ce_time), fmt(a.wet_time)};
      append(row, fmt_all(r.rate));
      row.push_back(fmt(r.min_rate()));
      t.add_row(std::move(row));
      if (r.min_rate() > best) {
        best = r.min_rate();
        best_alloc = a;
      }
    }
  }
  out.summary["argmax"] = allocation_json(best_alloc);
  out.summary["max_min_rate"] = best;
  out.tables.push_back(std::move(t));
  return out;
}

ExperimentOutput run_rho_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const SystemParams params = spec.system_params(spec.antennas);
  const int users = params.users();
  const std::vector<double> xi = optimal_weights(params.path_loss);
  ExperimentOutput out;
  Table t;
  t.name = "rho_sweep";
  t.header = {"rho"};
  append(t.header, user_columns("rate_user", users));
  t.header.push_back("min_rate");
  t.header.push_back("asymptotic_min_rate");
  const auto n = static_cast<std::int64_t>(std::floor(
      (spec.grid.split_max - spec.grid.split_min) / spec.grid.split_step + 1e-9));
  std::vector<double> series;
  double best = -1.0, best_rho = 0.0;
  for (std::int64_t r = 0; r <= n; ++r) {
    const double rho = spec.grid.split_min + r * spec.grid.split_step;
    const ResourceAllocation a{spec.fixed_ce_time, spec.fixed_wet_time, rho, xi};
    const RateReport rep = evaluate_rate(params, a, spec.system, spec.detector);
    double asym = std::nan("");
    if (spec.system == System::kWetMm) {
      asym = spec.detector == Detector::kZf
                 ? asymptotic_zf_rate(params, a).min_rate()
                 : asymptotic_mrc_rate(params, a).min_rate();
    }
    std::vector<std::string> row = {fmt(rho)};
    append(row, fmt_all(rep.rate));
    row.push_back(fmt(rep.min_rate()));
    row.push_back(fmt(asym));
    t.add_row(std::move(row));
    series.push_back(rep.min_rate());
    if (rep.min_rate() > best) {
      best = rep.min_rate();
      best_rho = rho;
    }
  }
  // Unimodal: discrete differences change sign at most once (+ to -).
  int sign_changes = 0;
  int last = 0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double d = series[i] - series[i - 1];
    const int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++sign_changes;
    last = s;
  }
  out.summary["argmax_rho"] = best_rho;
  out.summary["max_min_rate"] = best;
  out.summary["sign_changes"] = sign_changes;
  out.tables.push_back(std::move(t));
  return out;
}

std::optional<double> antennas_for_rate(std::span<const double> antennas,
                                        std::span<const double> rates,
                                        double target) {
  if (antennas.size() != rates.size()) {
    throw InvalidParameter("antenna and rate series differ in length");
  }
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!(rates[i] >= target)) continue;
    if (i == 0) return antennas[0];
    const double x0 = std::log(antennas[i - 1]);
    const double x1 = std::log(antennas[i]);
    const double f = (target - rates[i - 1]) / (rates[i] - rates[i - 1]);
    return std::exp(x0 + f * (x1 - x0));
  }
  return std::nullopt;
}

ExperimentOutput run_rate_vs_m(const ExperimentSpec& spec) {
  spec.validate();
  struct Curve {
    const char* name;
    System system;
    Detector detector;
  };
  const std::vector<Curve> curves = {
      {"wetmm_zf", System::kWetMm, Detector::kZf},
      {"wetmm_mrc", System::kWetMm, Detector::kMrc},
      {"ideal_zf", System::kIdeal, Detector::kZf},
      {"ideal_mrc", System::kIdeal, Detector::kMrc},
      {"opmm_zf", System::kOpMm, Detector::kZf},
      {"opmm_mrc", System::kOpMm, Detector::kMrc},
  };
  std::vector<int> grid = spec.rate_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const int users = static_cast<int>(spec.distances.size());

  ExperimentOutput out;
  Table t;
  t.name = "rate_vs_m";
  t.header = {"M"};
  for (const Curve& c : curves) t.header.push_back(c.name);
  std::vector<std::vector<double>> ms(curves.size()), rates(curves.size());
  for (int m : grid) {
    const SystemParams params = spec.system_params(m);
    std::vector<std::string> row = {fmt_int(m)};
    for (std::size_t c = 0; c < curves.size(); ++c) {
      if (curves[c].detector == Detector::kZf && m <= users) {
        row.push_back("");
        continue;
      }
      const OptimizationResult r = grid_search_p1(
          params, curves[c].system, curves[c].detector, spec.grid);
      row.push_back(fmt(r.min_rate));
      ms[c].push_back(m);
      rates[c].push_back(r.min_rate);
    }
    t.add_row(std::move(row));
  }

  Table s;
  s.name = "rate_vs_m_summary";
  s.header = {"curve", "quantity", "target", "value"};
  for (std::size_t c = 0; c < curves.size(); ++c) {
    double slope = std::nan("");
    if (ms[c].size() >= 2) {
      try {
        slope = mm_dorg(rates[c], ms[c]);
      } catch (const InvalidParameter&) {
      }
    }
    s.add_row({curves[c].name, "mm_dorg", "", fmt(slope)});
    out.summary["mm_dorg"][curves[c].name] = slope;
    for (double target : spec.rate_targets) {
      const auto n = antennas_for_rate(ms[c], rates[c], target);
      const double v = n ? *n : std::nan("");
      s.add_row({curves[c].name, "antennas_for_rate", fmt(target), fmt(v)});
      out.summary["antennas_for_rate"][curves[c].name].push_back(
          {{"target", target}, {"antennas", n ? nlohmann::json(*n) : nullptr}});
    }
  }
  out.tables.push_back(std::move(t));
  out.tables.push_back(std::move(s));
  return out;
}

ExperimentOutput run_fairness(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentOutput out;
  Table t;
  t.name = "fairness";
  t.header = {"M", "system", "user", "mc_rate", "mc_std_error", "bound_rate"};
  const std::vector<System> systems = {System::kWetMm, System::kOpMm};
  for (int m : spec.antenna_grid) {
    const SystemParams params = spec.system_params(m);
    for (System sys : systems) {
      const OptimizationResult opt =
          grid_search_p1(params, sys, spec.detector, spec.grid);
      const McEstimate mc = estimate_exact_rate(
          params, opt.allocation,
          mc_config(spec, spec.detector, sys,
                    stream(kStreamFairness, m, static_cast<std::uint64_t>(sys))));
      for (int k = 0; k < params.users(); ++k) {
        t.add_row({fmt_int(m), std::string(to_string(sys)), fmt_int(k + 1),
                   fmt(mc.mean[k]), fmt(mc.std_error[k]),
                   fmt(opt.user_rates[k])});
      }
      const double hi = *std::max_element(mc.mean.begin(), mc.mean.end());
      const double lo = *std::min_element(mc.mean.begin(), mc.mean.end());
      out.summary["relative_gap"][std::string(to_string(sys))].push_back(
          {{"M", m}, {"gap", hi > 0.0 ? (hi - lo) / hi : 0.0}});
    }
  }
  out.tables.push_back(std::move(t));
  return out;
}

ExperimentOutput run_mc_validate(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentOutput out;
  Table v;
  v.name = "mc_validate";
  v.header = {"M", "quantity", "user", "closed_form", "mc_mean", "mc_std_error",
              "z_score"};
  Table b;
  b.name = "mc_bound";
  b.header = {"M",   "user", "exact", "exact_std_error", "bound",
              "gap", "relative_gap", "verdict"};
  Table f;
  f.name = "mc_beamformer";
  f.header = {"M",       "theta",      "user",          "structured",
              "structured_std_error",  "general",       "general_std_error",
              "difference",            "difference_std_error"};
  for (int m : spec.validate_grid) {
    const SystemParams params = spec.system_params(m);
    const OptimizationResult opt =
        grid_search_p1(params, System::kWetMm, spec.detector, spec.grid);
    const ResourceAllocation& a = opt.allocation;
    McConfig cfg = mc_config(spec, spec.detector, System::kWetMm,
                             stream(kStreamValidate, m));
    for (const ValidationRow& r : validate_closed_forms(params, a, cfg)) {
      v.add_row({fmt_int(m), r.quantity, fmt_int(r.user + 1), fmt(r.closed_form),
                 fmt(r.mc_mean), fmt(r.mc_se), fmt(r.z_score())});
    }
    const auto checks = verify_bound_tightness(params, a, cfg);
    for (std::size_t k = 0; k < checks.size(); ++k) {
      const BoundCheck& c = checks[k];
      const char* verdict = c.verdict == BoundVerdict::kHolds      ? "holds"
                            : c.verdict == BoundVerdict::kViolated ? "violated"
                                                                   : "inconclusive";
      b.add_row({fmt_int(m), fmt_int(static_cast<std::int64_t>(k) + 1),
                 fmt(c.exact), fmt(c.exact_se), fmt(c.bound), fmt(c.gap),
                 fmt(c.relative_gap), verdict});
    }
    if (m > params.users()) {
      for (std::size_t i = 0; i < spec.theta_masses.size(); ++i) {
        const double theta = spec.theta_masses[i];
        const McConfig bcfg = mc_config(spec, spec.detector, System::kWetMm,
                                        stream(kStreamValidate, m, i + 1));
        const auto cmp = verify_beamformer_structure(params, a, theta, bcfg);
        for (std::size_t k = 0; k < cmp.size(); ++k) {
          const BeamformerComparison& c = cmp[k];
          f.add_row({fmt_int(m), fmt(theta),
                     fmt_int(static_cast<std::int64_t>(k) + 1), fmt(c.structured),
                     fmt(c.structured_se), fmt(c.general), fmt(c.general_se),
                     fmt(c.difference), fmt(c.difference_se)});
        }
      }
    }
  }
  out.tables.push_back(std::move(v));
  out.tables.push_back(std::move(b));
  out.tables.push_back(std::move(f));
  return out;
}

ExperimentOutput run_large_k(const ExperimentSpec& spec) {
  spec.validate();
  const double d_min =
      *std::min_element(spec.distances.begin(), spec.distances.end());
  const double d_max =
      *std::max_element(spec.distances.begin(), spec.distances.end());
  const double limit =
      c1_limit(spec.beta0, spec.path_loss_exponent, d_min, d_max);
  ExperimentOutput out;

  Table c;
  c.name = "large_k_c1";
  c.header = {"users", "c1_sample", "c1_limit", "ratio"};
  for (int k : spec.large_k_users) {
    Rng rng(split_seed(spec.seed, stream(kStreamLargeK, k)));
    PathLossModel model{spec.beta0, spec.path_loss_exponent, {}};
    model.distances.resize(k);
    for (double& d : model.distances) d = rng.uniform(d_min, d_max);
    const double sample = c1_sample(path_loss(model));
    c.add_row({fmt_int(k), fmt(sample), fmt(limit), fmt(sample / limit)});
    out.summary["c1_samples"].push_back({{"users", k}, {"c1", sample}});
  }

  Table r;
  r.name = "large_k_rate";
  r.header = {"load", "rate"};
  const auto n = static_cast<std::int64_t>(std::floor(1.0 / spec.load_step - 1e-9));
  for (std::int64_t i = 1; i <= n; ++i) {
    const double z = i * spec.load_step;
    if (!(z < 1.0)) break;
    r.add_row({fmt(z), fmt(large_k_rate(z, spec.large_k_wet_time, limit,
                                        spec.dl_power, spec.ul_noise))});
  }
  const double z0 = solve_load_for_rate(spec.target_rate, spec.large_k_wet_time,
                                        limit, spec.dl_power, spec.ul_noise);
  out.summary["c1_limit"] = limit;
  out.summary["target_rate"] = spec.target_rate;
  out.summary["load_for_target"] = z0;
  out.summary["rate_at_load"] =
      large_k_rate(z0, spec.large_k_wet_time, limit, spec.dl_power, spec.ul_noise);
  out.tables.push_back(std::move(c));
  out.tables.push_back(std::move(r));
  return out;
}

ExperimentOutput run_experiment(const ExperimentSpec& spec) {
  const std::string& e = spec.experiment;
  if (e == "optimize") return run_optimize(spec);
  if (e == "table1") return run_table1(spec);
  if (e == "contour") return run_contour(spec);
  if (e == "rho-sweep") return run_rho_sweep(spec);
  if (e == "rate-vs-m") return run_rate_vs_m(spec);
  if (e == "fairness") return run_fairness(spec);
  if (e == "mc-validate") return run_mc_validate(spec);
  if (e == "large-k") return run_large_k(spec);
  throw InvalidParameter("unknown experiment '" + e + "'");
}

}  // namespace wetmm
