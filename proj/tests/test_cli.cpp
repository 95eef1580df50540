// Copyright 2026 The ftcal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "ftcal/cli.hpp"
#include "ftcal/io.hpp"
#include "ftcal/synth.hpp"

namespace fs = std::filesystem;
namespace io = ftcal::io;

namespace
{

struct Result
{
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args)
{
  args.insert(args.begin(), "ftcal");
  std::vector<const char *> argv;
  for (const auto & a : args) {argv.push_back(a.c_str());}
  std::ostringstream out, err;
  const int code = ftcal::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test
{
protected:
  void SetUp() override
  {
    dir_ = fs::temp_directory_path() /
      ("ftcal_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override {fs::remove_all(dir_);}

  std::string path(const std::string & name) const {return (dir_ / name).string();}

  /// Grid, balancing and validation sets of one simulated sensor plus its
  /// workbench matrix.
  void make_scenario(const std::string & noise = "1", std::size_t n = 1000)
  {
    ASSERT_EQ(run({"generate", "--kind", "grid", "--n", std::to_string(n), "--seed", "1",
        "--noise-scale", noise, "--out", path("grid.csv"), "--workbench-out", path("cw.csv")}).code, 0);
    ASSERT_EQ(run({"generate", "--kind", "balancing", "--n", std::to_string(n), "--seed", "2",
        "--noise-scale", noise, "--out", path("balancing.csv")}).code, 0);
    ASSERT_EQ(run({"generate", "--kind", "random", "--n", std::to_string(n), "--seed", "3",
        "--noise-scale", noise, "--out", path("validation.csv")}).code, 0);
  }

  fs::path dir_;
};

std::size_t count_lines(const std::string & s)
{
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

double csv_value(const std::string & text, const std::string & key)
{
  const std::size_t at = text.find("\n" + key + ",");
  if (at == std::string::npos) {return std::nan("");}
  const std::size_t start = at + key.size() + 2;
  return io::parse_double(text.substr(start, text.find('\n', start) - start));
}

}  // namespace

TEST_F(Cli, GenerateIsByteIdenticalUnderSeed)
{
  // Same file name in two directories: the truth file records the dataset name.
  for (const char * sub : {"a", "b"}) {
    fs::create_directories(path(sub));
    const Result r = run({"generate", "--kind", "grid", "--n", "1000", "--temp", "32:41.2",
        "--seed", "1", "--out", path(std::string(sub) + "/grid.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(io::read_file(path("a/grid.csv")), io::read_file(path("b/grid.csv")));
  EXPECT_EQ(io::read_file(path("a/grid.truth.json")), io::read_file(path("b/grid.truth.json")));
  const io::DatasetFile f = io::load_dataset(path("a/grid.csv"));
  EXPECT_EQ(f.dataset.size(), 1000u);
  EXPECT_EQ(f.dataset[0].temperature, 32.0);
  EXPECT_EQ(f.dataset[999].temperature, 41.2);
}

TEST_F(Cli, GenerateRecordsTemperatureRangeInHeader)
{
  ASSERT_EQ(run({"generate", "--kind", "balancing", "--temp", "38.1:41.6", "--out",
      path("bal.csv")}).code, 0);
  const io::DatasetFile f = io::load_dataset(path("bal.csv"));
  EXPECT_EQ(io::metadata_value(f.metadata, "kind"), "balancing");
  EXPECT_EQ(io::metadata_value(f.metadata, "temp_start"), "38.1");
  EXPECT_EQ(io::metadata_value(f.metadata, "temp_end"), "41.6");
  EXPECT_EQ(f.dataset.kind(), ftcal::DatasetKind::balancing);
}

TEST_F(Cli, GenerateMassSetsForceMagnitude)
{
  ASSERT_EQ(run({"generate", "--kind", "grid", "--mass", "33", "--out", path("g.csv")}).code, 0);
  const io::DatasetFile f = io::load_dataset(path("g.csv"));
  double max_norm = 0.0;
  for (const auto & s : f.dataset.samples()) {
    max_norm = std::max(max_norm, s.reference.force.norm());
  }
  EXPECT_NEAR(max_norm, 323.6, 0.05);
  EXPECT_EQ(io::metadata_value(f.metadata, "mass"), "33");
}

TEST_F(Cli, GenerateRejectsBadArguments)
{
  EXPECT_EQ(run({"generate", "--kind", "spiral", "--out", path("x.csv")}).code, 2);
  EXPECT_EQ(run({"generate", "--kind", "grid", "--temp", "41:32", "--out", path("x.csv")}).code, 2);
  EXPECT_EQ(run({"generate", "--kind", "grid", "--temp", "abc", "--out", path("x.csv")}).code, 2);
  EXPECT_EQ(run({"generate", "--kind", "grid", "--n", "3", "--out", path("x.csv")}).code, 2);
  EXPECT_FALSE(fs::exists(path("x.csv")));
}

TEST_F(Cli, CalibrateNoiselessCenteredFitsExactly)
{
  make_scenario("0", 500);
  const Result r = run({"calibrate", "--data", path("grid.csv"), "--type", "CwT", "--lambda", "0",
      "--out", path("c.json"), "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char * axis : {"fx", "fy", "fz", "tx", "ty", "tz"}) {
    EXPECT_LT(csv_value(r.out, std::string(axis) + "_mse"), 1e-10) << axis;
  }
  EXPECT_GT(csv_value(r.out, "rcond"), 0.0);
  const ftcal::CalibrationModel m = io::load_calibration(path("c.json"));
  EXPECT_EQ(m.metadata().estimation_type, "CwT");
  EXPECT_EQ(m.metadata().source_datasets, std::vector<std::string>{"grid"});
}

TEST_F(Cli, SphereTypeDefaultsToFirstDataFileForOffset)
{
  make_scenario("1", 400);
  const Result r = run({"calibrate", "--data", path("grid.csv"), path("balancing.csv"),
      "--type", "SwT", "--workbench", path("cw.csv"), "--out", path("c.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("sphere fit on grid"), std::string::npos) << r.out;
  const Result o = run({"calibrate", "--data", path("grid.csv"), path("balancing.csv"),
      "--offset-data", path("balancing.csv"), "--type", "SwT", "--workbench", path("cw.csv"),
      "--out", path("c2.json")});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("sphere fit on balancing"), std::string::npos) << o.out;
}

TEST_F(Cli, StrongRegularizationPullsTowardWorkbench)
{
  make_scenario("1", 400);
  auto dist = [&](const std::string & lambda) {
      const Result r = run({"calibrate", "--data", path("grid.csv"), "--type", "CwT",
          "--lambda", lambda, "--workbench", path("cw.csv"), "--out", path("c.json"),
          "--format", "csv"});
      EXPECT_EQ(r.code, 0) << r.err;
      return csv_value(r.out, "c_minus_workbench");
    };
  EXPECT_LT(dist("1e6"), dist("0"));
}

TEST_F(Cli, CalibratePreconditionsExitWithTwo)
{
  make_scenario("1", 100);
  const Result bad_type = run({"calibrate", "--data", path("missing.csv"), "--type", "XnT",
      "--out", path("c.json")});
  EXPECT_EQ(bad_type.code, 2);
  EXPECT_FALSE(fs::exists(path("c.json")));
  const Result no_wb = run({"calibrate", "--data", path("grid.csv"), "--type", "CnT",
      "--lambda", "10", "--out", path("c.json")});
  EXPECT_EQ(no_wb.code, 2);
  EXPECT_NE(no_wb.err.find("--workbench"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("c.json")));
  EXPECT_EQ(run({"calibrate", "--data", path("grid.csv"), "--type", "CnT", "--lambda", "-1",
      "--out", path("c.json")}).code, 2);
  EXPECT_EQ(run({"calibrate", "--type", "CnT", "--out", path("c.json")}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST_F(Cli, CalibrateParseAndSolveFailuresExitWithOne)
{
  make_scenario("1", 100);
  EXPECT_EQ(run({"calibrate", "--data", path("missing.csv"), "--type", "CnT",
      "--out", path("c.json")}).code, 1);
  io::atomic_write(path("broken.csv"), "time,r0\n1,2\n");
  EXPECT_EQ(run({"calibrate", "--data", path("broken.csv"), "--type", "CnT",
      "--out", path("c.json")}).code, 1);
  io::atomic_write(path("bad_cw.csv"), "1,2,3\n");
  EXPECT_EQ(run({"calibrate", "--data", path("grid.csv"), "--type", "CnT", "--lambda", "1",
      "--workbench", path("bad_cw.csv"), "--out", path("c.json")}).code, 1);
}

TEST_F(Cli, SweepDefaultScheduleWritesFiftyThreeRows)
{
  make_scenario("1", 400);
  const Result r = run({"sweep", "--data", path("grid.csv"), "--validation", path("validation.csv"),
      "--workbench", path("cw.csv"), "--out", path("sweep.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = io::read_file(path("sweep.csv"));
  EXPECT_EQ(count_lines(csv), 1u + 53u);
  EXPECT_NE(r.out.find("best: "), std::string::npos);
}

TEST_F(Cli, SweepSingleCell)
{
  make_scenario("1", 200);
  const Result r = run({"sweep", "--data", path("grid.csv"), "--validation", path("validation.csv"),
      "--lambdas", "0", "--types", "CnT", "--out", path("sweep.csv"), "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(io::read_file(path("sweep.csv"))), 3u);
  EXPECT_EQ(r.out.rfind(io::read_file(path("sweep.csv")), 0), 0u);
}

TEST_F(Cli, SweepOnDriftScenarioPrefersTemperature)
{
  make_scenario("1", 1000);
  const Result r = run({"sweep", "--data", path("grid.csv"), path("balancing.csv"),
      "--validation", path("validation.csv"), "--workbench", path("cw.csv"),
      "--out", path("sweep.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::size_t at = r.out.find("best: ");
  ASSERT_NE(at, std::string::npos);
  const std::string type = r.out.substr(at + 6, 3);
  EXPECT_TRUE(type == "SwT" || type == "CwT") << r.out.substr(at);
}

TEST_F(Cli, SweepPreconditionsAndFailures)
{
  make_scenario("1", 200);
  EXPECT_EQ(run({"sweep", "--data", path("grid.csv"), "--validation", path("grid.csv"),
      "--lambdas", "0"}).code, 2);
  EXPECT_EQ(run({"sweep", "--data", path("grid.csv"), "--validation", path("validation.csv"),
      "--lambdas", "0,10"}).code, 2);
  EXPECT_EQ(run({"sweep", "--data", path("grid.csv"), "--validation", path("validation.csv"),
      "--types", "CnT,Foo", "--lambdas", "0"}).code, 2);

  // Every sphere cell fails on a flat offset dataset: exit 1, CSV still written.
  io::DatasetFile g = io::load_dataset(path("grid.csv"));
  std::vector<ftcal::RawSample> flat;
  for (int i = 0; i < 40; ++i) {
    ftcal::RawSample s = g.dataset[0];
    s.time = i;
    s.raw(0) += 0.001 * i;
    s.raw(1) += 0.001 * ((i * 7) % 11);
    flat.push_back(s);
  }
  io::atomic_write(path("flat.csv"), io::format_dataset_csv(
      ftcal::Dataset(flat, ftcal::DatasetKind::custom, "flat")));
  const Result r = run({"sweep", "--data", path("grid.csv"), "--validation", path("validation.csv"),
      "--offset-data", path("flat.csv"), "--types", "SnT,SwT", "--lambdas", "0",
      "--out", path("sweep.csv")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(io::read_file(path("sweep.csv")).find("failed:degenerate_geometry"), std::string::npos);
  // A partial failure still exits 0.
  EXPECT_EQ(run({"sweep", "--data", path("grid.csv"), "--validation", path("validation.csv"),
      "--offset-data", path("flat.csv"), "--types", "SnT,CnT", "--lambdas", "0"}).code, 0);
}

TEST_F(Cli, ValidatePerfectModelGivesZeroTable)
{
  make_scenario("0", 300);
  const Result r = run({"validate", "--calibration", path("validation.truth.json"),
      "--validation", path("validation.csv"), "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char * axis : {"fx", "fy", "fz", "tx", "ty", "tz"}) {
    const std::size_t at = r.out.find(std::string(axis) + ",");
    ASSERT_NE(at, std::string::npos);
    const std::size_t s = at + 3;
    EXPECT_LT(io::parse_double(r.out.substr(s, r.out.find(',', s) - s)), 1e-12);
  }
}

TEST_F(Cli, ValidateReportsTemperatureBenefit)
{
  make_scenario("1", 1000);
  ASSERT_EQ(run({"calibrate", "--data", path("grid.csv"), "--type", "SnT", "--workbench",
      path("cw.csv"), "--out", path("snt.json")}).code, 0);
  ASSERT_EQ(run({"calibrate", "--data", path("grid.csv"), "--type", "SwT", "--workbench",
      path("cw.csv"), "--out", path("swt.json")}).code, 0);
  const Result r = run({"validate", "--calibration", path("swt.json"), "--validation",
      path("grid.csv"), "--baseline", path("snt.json"), "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  // Drift acts on fx, fy and fz.
  for (const char * axis : {"fx", "fy", "fz"}) {
    const std::size_t at = r.out.find(std::string("\n") + axis + ",");
    ASSERT_NE(at, std::string::npos);
    const std::string line = r.out.substr(at + 1, r.out.find('\n', at + 1) - at - 1);
    const double pct = io::parse_double(line.substr(line.rfind(',') + 1));
    EXPECT_GT(pct, 0.0) << line;
  }
}

TEST_F(Cli, ValidateCombinedBeatsWorkbenchTwofold)
{
  make_scenario("1", 1000);
  const ftcal::Matrix6d Cw = io::load_matrix6(path("cw.csv"));
  io::atomic_write(path("workbench.json"),
    io::format_calibration(ftcal::CalibrationModel::workbench(Cw)));
  ASSERT_EQ(run({"calibrate", "--data", path("grid.csv"), path("balancing.csv"), "--type", "SwT",
      "--workbench", path("cw.csv"), "--out", path("swt.json")}).code, 0);
  const Result r = run({"validate", "--calibration", path("swt.json"), "--validation",
      path("validation.csv"), "--baseline", path("workbench.json"), "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::size_t at = r.out.find("force_norm_mean,");
  ASSERT_NE(at, std::string::npos);
  const auto cells = io::split(r.out.substr(at, r.out.find('\n', at) - at), ',');
  ASSERT_GE(cells.size(), 4u);
  const double model = io::parse_double(cells[1]);
  const double base = io::parse_double(cells[3]);
  EXPECT_GE(base, 2.0 * model);
}

TEST_F(Cli, ValidateDimensionMismatchExitsWithOne)
{
  make_scenario("1", 100);
  const ftcal::CalibrationModel m(ftcal::Matrix6d::Identity(), ftcal::Vector6d::Zero(),
    ftcal::Matrix6Xd::Zero(6, 1), {"humidity"});
  io::atomic_write(path("h.json"), io::format_calibration(m));
  const Result r = run({"validate", "--calibration", path("h.json"), "--validation",
      path("validation.csv")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("dimension"), std::string::npos);
}

TEST_F(Cli, ReportRendersSweepCsv)
{
  make_scenario("1", 200);
  ASSERT_EQ(run({"sweep", "--data", path("grid.csv"), "--validation", path("validation.csv"),
      "--workbench", path("cw.csv"), "--lambdas", "0,1000", "--out", path("sweep.csv")}).code, 0);
  const Result text = run({"report", "--input", path("sweep.csv")});
  ASSERT_EQ(text.code, 0) << text.err;
  EXPECT_NE(text.out.find("Workbench"), std::string::npos);
  EXPECT_NE(text.out.find("best: "), std::string::npos);
  const Result csv = run({"report", "--input", path("sweep.csv"), "--format", "csv"});
  EXPECT_EQ(csv.out, io::read_file(path("sweep.csv")));
  EXPECT_EQ(run({"report", "--input", path("nope.csv")}).code, 1);
}

TEST_F(Cli, EverySubcommandIsReproducible)
{
  make_scenario("1", 300);
  auto twice = [&](std::vector<std::string> args, const std::string & out_file) {
      std::vector<std::string> a = args, b = args;
      a.insert(a.end(), {"--out", path("1_" + out_file)});
      b.insert(b.end(), {"--out", path("2_" + out_file)});
      const Result ra = run(a), rb = run(b);
      EXPECT_EQ(ra.code, 0) << ra.err;
      EXPECT_EQ(io::read_file(path("1_" + out_file)), io::read_file(path("2_" + out_file)));
    };
  twice({"generate", "--kind", "random", "--seed", "7"}, "gen.csv");
  twice({"calibrate", "--data", path("grid.csv"), "--type", "SwT", "--workbench", path("cw.csv"),
      "--lambda", "100"}, "cal.json");
  twice({"sweep", "--data", path("grid.csv"), "--validation", path("validation.csv"),
      "--workbench", path("cw.csv")}, "sweep.csv");
  twice({"validate", "--calibration", path("1_cal.json"), "--validation", path("validation.csv")},
    "val.txt");
  twice({"report", "--input", path("1_sweep.csv")}, "report.txt");
}

TEST_F(Cli, HelpExitsCleanly)
{
  const Result r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("calibrate"), std::string::npos);
}
