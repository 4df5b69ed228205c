#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wetmm/experiments.h"

namespace wetmm {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("wetmm_test_" + name);
  fs::remove_all(d);
  return d;
}

TEST(Units, DbmRoundTrip) {
  EXPECT_DOUBLE_EQ(dbm_to_watt(30.0), 1.0);
  EXPECT_NEAR(dbm_to_watt(-120.0), 1e-15, 1e-27);
  EXPECT_NEAR(watt_to_dbm(dbm_to_watt(-87.5)), -87.5, 1e-12);
}

TEST(Config, ParsesKeysListsAndComments) {
  const ExperimentSpec s = parse_spec(
      "# scenario\n"
      "experiment = rate-vs-m\n"
      "antennas = 64   # trailing comment\n"
      "distances = 5, 10, 20\n"
      "detector = mrc\n"
      "system = opmm\n"
      "seed = 99\n"
      "trials = 12\n"
      "\n"
      "wet_step = 0.001\n");
  EXPECT_EQ(s.experiment, "rate-vs-m");
  EXPECT_EQ(s.antennas, 64);
  EXPECT_EQ(s.distances, (std::vector<double>{5.0, 10.0, 20.0}));
  EXPECT_EQ(s.detector, Detector::kMrc);
  EXPECT_EQ(s.system, System::kOpMm);
  EXPECT_EQ(s.seed, 99u);
  EXPECT_EQ(s.trials, 12);
  EXPECT_DOUBLE_EQ(s.grid.wet_step, 0.001);
}

TEST(Config, UnknownKeyNamesLine) {
  try {
    parse_spec("antennas = 10\nantenas = 20\n");
    FAIL() << "expected InvalidParameter";
  } catch (const InvalidParameter& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("antenas"), std::string::npos) << msg;
  }
  EXPECT_THROW(parse_spec("antennas 10\n"), InvalidParameter);
  EXPECT_THROW(parse_spec("antennas = ten\n"), InvalidParameter);
}

TEST(Config, PowerUnits) {
  const ExperimentSpec dbm =
      parse_spec("power_unit = dbm\ndl_power = 30\nul_noise = -120\n");
  EXPECT_DOUBLE_EQ(dbm.dl_power, 1.0);
  EXPECT_NEAR(dbm.ul_noise, 1e-15, 1e-27);
  // Order in the file does not matter.
  const ExperimentSpec late = parse_spec("dl_power = 30\npower_unit = dbm\n");
  EXPECT_DOUBLE_EQ(late.dl_power, 1.0);
  const ExperimentSpec over = parse_spec("power_unit = dbm\ndl_power = 2\n",
                                         PowerUnit::kWatt);
  EXPECT_DOUBLE_EQ(over.dl_power, 2.0);
}

TEST(Config, ValidationRejectsNonsense) {
  ExperimentSpec s;
  s.trials = 0;
  EXPECT_THROW(s.validate(), InvalidParameter);
  s = ExperimentSpec{};
  s.experiment = "nope";
  EXPECT_THROW(run_experiment(s), InvalidParameter);
}

TEST(Csv, NumbersAndQuoting) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1e-15), "1e-15");
  EXPECT_EQ(format_number(std::int64_t{42}), "42");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(std::stod(format_number(16.100312345678901)), 16.100312345678901);
  Table t;
  t.name = "x";
  t.header = {"a", "b"};
  t.add_row({"1", "he said \"hi\", twice"});
  EXPECT_EQ(to_csv(t), "a,b\r\n1,\"he said \"\"hi\"\", twice\"\r\n");
  EXPECT_THROW(t.add_row({"only one"}), InvalidParameter);
}

TEST(Output, AtomicWriteLeavesNoTemporary) {
  const fs::path d = scratch_dir("atomic");
  fs::create_directories(d);
  write_atomic(d / "a.csv", "first");
  write_atomic(d / "a.csv", "second");
  EXPECT_EQ(slurp(d / "a.csv"), "second");
  EXPECT_FALSE(fs::exists(d / "a.csv.tmp"));
  fs::remove_all(d);
}

TEST(Output, SidecarListsFiles) {
  ExperimentSpec s;
  s.experiment = "large-k";
  s.output_dir = scratch_dir("sidecar");
  const auto files = write_output(s, run_experiment(s));
  ASSERT_FALSE(files.empty());
  for (const auto& f : files) EXPECT_TRUE(fs::exists(f)) << f;
  const auto json = nlohmann::json::parse(slurp(s.output_dir / "large-k.json"));
  EXPECT_EQ(json["spec"]["experiment"], "large-k");
  EXPECT_EQ(json["files"].size(), files.size() - 1);
  fs::remove_all(s.output_dir);
}

TEST(Output, RerunsAreByteIdentical) {
  ExperimentSpec s;
  s.experiment = "mc-validate";
  s.trials = 60;
  s.validate_grid = {10, 20};
  s.theta_masses = {0.3};
  std::vector<std::string> runs;
  for (int threads : {1, 3}) {
    s.grid.threads = threads;
    s.output_dir = scratch_dir("rerun" + std::to_string(threads));
    write_output(s, run_experiment(s));
    std::string all;
    for (const auto& e : fs::directory_iterator(s.output_dir)) {
      if (e.path().extension() == ".csv") all += slurp(e.path());
    }
    runs.push_back(all);
    fs::remove_all(s.output_dir);
  }
  EXPECT_FALSE(runs[0].empty());
  EXPECT_EQ(runs[0], runs[1]);
}

TEST(Interpolation, AntennasForRate) {
  const std::vector<double> m = {10, 100, 1000};
  const std::vector<double> r = {1.0, 3.0, 5.0};
  EXPECT_NEAR(*antennas_for_rate(m, r, 2.0), std::sqrt(1000.0), 1e-9);
  EXPECT_NEAR(*antennas_for_rate(m, r, 1.0), 10.0, 1e-12);
  EXPECT_FALSE(antennas_for_rate(m, r, 6.0).has_value());
}

TEST(Experiments, RhoSweepIsUnimodal) {
  ExperimentSpec s;
  s.experiment = "rho-sweep";
  const ExperimentOutput out = run_experiment(s);
  EXPECT_EQ(out.summary["sign_changes"], 1);
  EXPECT_NEAR(out.summary["argmax_rho"].get<double>(), 0.5965, 0.01);
}

}  // namespace
}  // namespace wetmm
