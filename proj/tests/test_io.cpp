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

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "ftcal/calibrate.hpp"
#include "ftcal/io.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
namespace io = ftcal::io;

namespace
{

fs::path temp_dir(const std::string & name)
{
  const fs::path dir = fs::temp_directory_path() / ("ftcal_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string csv_with(const std::string & row)
{
  return std::string(io::kDatasetHeader) + "\n" + row + "\n";
}

}  // namespace

TEST(Numbers, RoundTripExactly)
{
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, (i % 20) - 10);
    EXPECT_EQ(io::parse_double(io::format_double(v)), v);
  }
  EXPECT_EQ(io::parse_double("1e6"), 1e6);
  EXPECT_EQ(io::parse_double(" 5e+05 "), 5e5);
  EXPECT_THROW(io::parse_double("1,5"), ftcal::ParseError);
  EXPECT_THROW(io::parse_double(""), ftcal::ParseError);
  EXPECT_EQ(io::format_double(0.1), "0.1");
}

TEST(DatasetCsv, RoundTripsSamplesAndMetadata)
{
  const ftcal::DriftScenario sc = ftcal::make_drift_scenario(1, 50);
  const io::Metadata md = {{"kind", "grid"}, {"temp_start", "32"}};
  const std::string text = io::format_dataset_csv(sc.grid, md);
  EXPECT_EQ(text.rfind("# kind=grid\n# temp_start=32\n" + std::string(io::kDatasetHeader), 0), 0u);
  const io::DatasetFile f = io::parse_dataset_csv(text, "grid");
  EXPECT_EQ(f.metadata, md);
  EXPECT_EQ(f.dataset.kind(), ftcal::DatasetKind::grid);
  ASSERT_EQ(f.dataset.size(), sc.grid.size());
  for (std::size_t i = 0; i < f.dataset.size(); ++i) {
    EXPECT_EQ(f.dataset[i].raw, sc.grid[i].raw);
    EXPECT_EQ(f.dataset[i].temperature, sc.grid[i].temperature);
    EXPECT_EQ(f.dataset[i].reference.as_vector(), sc.grid[i].reference.as_vector());
    EXPECT_EQ(f.dataset[i].time, sc.grid[i].time);
  }
  EXPECT_EQ(io::format_dataset_csv(f.dataset, f.metadata), text);
}

TEST(DatasetCsv, AcceptsCrlfAndRejectsMalformedInput)
{
  const std::string row = "0,1,2,3,4,5,6,35,0,0,0,0,0,0";
  EXPECT_EQ(io::parse_dataset_csv(csv_with(row + "\r"), "x").dataset.size(), 1u);
  EXPECT_THROW(io::parse_dataset_csv("time,r0\n" + row + "\n", "x"), ftcal::ParseError);
  EXPECT_THROW(io::parse_dataset_csv(csv_with("0,1,2,3,4,5,6,35,0,0,0,0,0"), "x"), ftcal::ParseError);
  EXPECT_THROW(io::parse_dataset_csv(csv_with("0,1,2,3,4,5,x,35,0,0,0,0,0,0"), "x"), ftcal::ParseError);
  EXPECT_THROW(io::parse_dataset_csv(csv_with("0,1,2,3,4,5,6,150,0,0,0,0,0,0"), "x"), ftcal::ParseError);
  EXPECT_THROW(io::parse_dataset_csv(csv_with("0,1,2,3,4,5,nan,35,0,0,0,0,0,0"), "x"), ftcal::ParseError);
  EXPECT_THROW(io::parse_dataset_csv("", "x"), ftcal::ParseError);
  EXPECT_THROW(io::parse_dataset_csv(std::string(io::kDatasetHeader) + "\n", "x"), ftcal::DataError);
}

TEST(Matrix6, RoundTripAndErrors)
{
  std::mt19937_64 rng(2);
  const ftcal::Matrix6d M = oracle::random_matrix(6, 6, rng, 300.0);
  EXPECT_EQ(io::parse_matrix6(io::format_matrix6(M)), M);
  EXPECT_THROW(io::parse_matrix6("1,2,3\n"), ftcal::ParseError);
  std::string five;
  for (int i = 0; i < 5; ++i) {five += "1,0,0,0,0,0\n";}
  EXPECT_THROW(io::parse_matrix6(five), ftcal::ParseError);
  EXPECT_THROW(io::parse_matrix6(five + "1,0,0,0,0,0\n1,0,0,0,0,0\n"), ftcal::ParseError);
}

TEST(CalibrationJson, RoundTripPreservesPredictionsBitForBit)
{
  const ftcal::DriftScenario sc = ftcal::make_drift_scenario(3, 300);
  for (ftcal::EstimationType t : ftcal::kAllEstimationTypes) {
    ftcal::EstimationConfig cfg;
    cfg.estimation_type = t;
    cfg.workbench = sc.sensor.workbench;
    cfg.lambda = 10.0;
    const ftcal::CalibrationModel a = ftcal::calibrate(sc.grid, cfg).model;
    const ftcal::CalibrationModel b = io::parse_calibration(io::format_calibration(a));
    EXPECT_EQ(b.C(), a.C());
    EXPECT_EQ(b.o(), a.o());
    EXPECT_EQ(b.Ct(), a.Ct());
    EXPECT_EQ(b.extra_variable_names(), a.extra_variable_names());
    EXPECT_EQ(b.metadata().estimation_type, std::string(ftcal::to_string(t)));
    EXPECT_EQ(b.metadata().lambda, 10.0);
    EXPECT_EQ(b.metadata().temperature_range, a.metadata().temperature_range);
    EXPECT_EQ(b.metadata().centering.has_value(), a.metadata().centering.has_value());
    const auto names = a.extra_variable_names();
    EXPECT_EQ(
      b.predict_rows(sc.validation.raw_matrix(), sc.validation.extras_matrix(names)),
      a.predict_rows(sc.validation.raw_matrix(), sc.validation.extras_matrix(names)));
    EXPECT_EQ(io::format_calibration(b), io::format_calibration(a));
  }
}

TEST(CalibrationJson, RejectsMalformedDocuments)
{
  EXPECT_THROW(io::parse_calibration("{"), ftcal::ParseError);
  EXPECT_THROW(io::parse_calibration("{}"), ftcal::ParseError);
  const ftcal::CalibrationModel m(ftcal::Matrix6d::Identity(), ftcal::Vector6d::Zero());
  nlohmann::json j = io::to_json(m);
  j["o"] = {1, 2, 3};
  EXPECT_THROW(io::model_from_json(j), ftcal::ParseError);
  j = io::to_json(m);
  j["C"][2] = {1, 2};
  EXPECT_THROW(io::model_from_json(j), ftcal::ParseError);
}

TEST(SweepCsv, RoundTripsThroughText)
{
  const ftcal::DriftScenario sc = ftcal::make_drift_scenario(4, 200);
  ftcal::SweepSpec spec;
  spec.lambdas = {0.0, 5e5};
  spec.workbench = sc.sensor.workbench;
  const ftcal::SweepReport rep = ftcal::run_sweep(sc.grid, sc.validation, spec);
  const std::string csv = io::format_sweep_csv(rep);
  EXPECT_EQ(csv.rfind(std::string(io::kSweepHeader) + "\n", 0), 0u);
  const ftcal::SweepReport back = io::parse_sweep_csv(csv);
  EXPECT_EQ(back.rows.size(), rep.rows.size());
  EXPECT_EQ(io::format_sweep_csv(back), csv);
  EXPECT_NE(csv.find("grid,SwT,5e+05,"), std::string::npos);
  EXPECT_NE(csv.find("grid,Workbench,0,"), std::string::npos);
  const std::string text = io::format_sweep_text(rep);
  EXPECT_NE(text.find("Workbench"), std::string::npos);
  EXPECT_THROW(io::parse_sweep_csv("dataset,type\n"), ftcal::ParseError);
}

TEST(AtomicWrite, ReplacesContentAndLeavesNoTemporary)
{
  const fs::path dir = temp_dir("atomic");
  const fs::path p = dir / "out.txt";
  io::atomic_write(p, "first\n");
  io::atomic_write(p, "second\n");
  EXPECT_EQ(io::read_file(p), "second\n");
  EXPECT_FALSE(fs::exists(dir / "out.txt.tmp"));
  EXPECT_THROW(io::atomic_write(dir / "missing" / "x.txt", "x"), ftcal::IoError);
  EXPECT_THROW(io::read_file(dir / "nope.csv"), ftcal::IoError);
  fs::remove_all(dir);
}
