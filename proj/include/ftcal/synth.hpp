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

#ifndef FTCAL__SYNTH_HPP_
#define FTCAL__SYNTH_HPP_

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ftcal/errors.hpp"
#include "ftcal/model.hpp"

namespace ftcal
{

inline constexpr double kStandardGravity = 9.80665;

enum class MotionKind { grid, balancing, random };

inline std::string_view to_string(MotionKind k)
{
  switch (k) {
    case MotionKind::grid: return "grid";
    case MotionKind::balancing: return "balancing";
    case MotionKind::random: return "random";
  }
  return "?";
}

inline MotionKind parse_motion_kind(std::string_view s)
{
  for (auto k : {MotionKind::grid, MotionKind::balancing, MotionKind::random}) {
    if (to_string(k) == s) {return k;}
  }
  throw ParseError("unknown motion kind '" + std::string(s) + "' (expected grid, balancing, random)");
}

inline DatasetKind dataset_kind(MotionKind k)
{
  switch (k) {
    case MotionKind::grid: return DatasetKind::grid;
    case MotionKind::balancing: return DatasetKind::balancing;
    case MotionKind::random: return DatasetKind::random;
  }
  return DatasetKind::custom;
}

enum class RampShape { linear, saturating };

struct TemperatureProfile
{
  double start = 32.0;  // degC
  double end = 41.2;    // degC
  RampShape shape = RampShape::linear;
  /// Saturating ramps approach `end` as 1 − exp(−s/τ), s ∈ [0, 1] being the
  /// fraction of the dataset; τ is expressed in the same fraction.
  double time_constant = 0.25;
};

/// Temperature at each of n samples; the first and last samples hit
/// `start` and `end` exactly.
inline Eigen::VectorXd temperature_series(const TemperatureProfile & p, std::size_t n)
{
  Eigen::VectorXd t(static_cast<Eigen::Index>(n));
  const double span = p.end - p.start;
  const double norm = 1.0 - std::exp(-1.0 / p.time_constant);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    double frac = s;
    if (p.shape == RampShape::saturating) {
      frac = (1.0 - std::exp(-s / p.time_constant)) / norm;
    }
    t(static_cast<Eigen::Index>(i)) = p.start + span * frac;
  }
  t(0) = p.start;
  if (n > 1) {
    t(static_cast<Eigen::Index>(n - 1)) = p.end;
  }
  return t;
}

/// Centers of mass of the suspended load, sensor frame, meters. Three
/// non-collinear configurations are needed for the gravity wrenches to span
/// all six axes.
inline std::vector<Eigen::Vector3d> default_lever_arms()
{
  return {
    Eigen::Vector3d(0.02, 0.01, -0.25),
    Eigen::Vector3d(0.09, -0.04, -0.18),
    Eigen::Vector3d(-0.05, 0.07, -0.21)};
}

struct ScenarioSpec
{
  MotionKind kind = MotionKind::grid;
  std::size_t n = 1000;
  double mass = 33.0;  // kg
  double gravity = kStandardGravity;
  TemperatureProfile temp;
  Matrix6d C_true = Matrix6d::Identity();
  Vector6d o_true = Vector6d::Zero();
  Vector6d Ct_true = Vector6d::Zero();  // wrench units per degC
  Vector6d noise_sigma = Vector6d::Zero();  // raw counts, per channel
  /// Weight of the lagged temperature in the drift term (0 disables).
  double hysteresis_gain = 0.0;
  double hysteresis_time_constant = 60.0;  // s
  double sample_period = 0.01;  // s
  /// Largest roll/pitch of the grid and balancing motions, rad.
  double max_tilt = 75.0 * std::numbers::pi / 180.0;
  std::vector<Eigen::Vector3d> lever_arms = default_lever_arms();
  std::uint64_t seed = 0;
  std::string name = "synthetic";

  void validate() const
  {
    if (n < 10) {throw DataError("scenario needs n >= 10");}
    if (!(mass > 0.0)) {throw DataError("scenario mass must be positive");}
    if (!(temp.end >= temp.start)) {
      throw DataError("temperature profile must not decrease (end >= start)");
    }
    if (!(temp.time_constant > 0.0)) {throw DataError("ramp time constant must be positive");}
    if (!(hysteresis_gain >= 0.0)) {throw DataError("hysteresis gain must be non-negative");}
    if (!(hysteresis_time_constant > 0.0)) {
      throw DataError("hysteresis time constant must be positive");
    }
    if (!(sample_period > 0.0)) {throw DataError("sample period must be positive");}
    if (lever_arms.empty()) {throw DataError("scenario needs at least one lever arm");}
    if ((noise_sigma.array() < 0.0).any()) {throw DataError("noise sigma must be >= 0");}
  }
};

struct GeneratedData
{
  Dataset dataset;
  CalibrationModel ground_truth;
};

namespace detail
{

inline Eigen::Vector3d gravity_in_sensor(double roll, double pitch, double g)
{
  const Eigen::Matrix3d R =
    (Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()) *
    Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY())).toRotationMatrix();
  return R.transpose() * Eigen::Vector3d(0.0, 0.0, -g);
}

/// Gravity direction (unit, sensor frame) and lever arm for sample i.
struct Pose
{
  Eigen::Vector3d g_dir;
  Eigen::Vector3d lever;
};

inline Eigen::Vector3d blend_lever_arms(
  const std::vector<Eigen::Vector3d> & arms, std::span<const double> weights)
{
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  double sum = 0.0;
  for (std::size_t k = 0; k < arms.size(); ++k) {
    c += weights[k] * arms[k];
    sum += weights[k];
  }
  return c / sum;
}

inline std::vector<Pose> motion(const ScenarioSpec & spec, std::mt19937_64 & rng)
{
  std::vector<Pose> poses(spec.n);
  const double A = spec.max_tilt;
  const std::size_t L = spec.lever_arms.size();
  switch (spec.kind) {
    case MotionKind::grid: {
        // Repeated passes over a fixed lattice of roll/pitch poses. The lever
        // arm follows the lattice row.
        constexpr std::size_t side = 12;
        for (std::size_t i = 0; i < spec.n; ++i) {
          const std::size_t cell = i % (side * side);
          const std::size_t row = cell / side;
          std::size_t col = cell % side;
          if (row % 2 == 1) {col = side - 1 - col;}
          const double roll = -A + 2.0 * A * double(col) / double(side - 1);
          const double pitch = -A + 2.0 * A * double(row) / double(side - 1);
          poses[i].g_dir = gravity_in_sensor(roll, pitch, 1.0);
          poses[i].lever = spec.lever_arms[row % L];
        }
        break;
      }
    case MotionKind::balancing: {
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        const double p_roll = phase(rng), p_pitch = phase(rng);
        std::vector<double> p_arm(L);
        for (auto & p : p_arm) {p = phase(rng);}
        std::vector<double> w(L);
        for (std::size_t i = 0; i < spec.n; ++i) {
          const double s = double(i) / double(spec.n - 1);
          const double roll = A * std::sin(2.0 * std::numbers::pi * 7.0 * s + p_roll);
          const double pitch = 0.85 * A * std::sin(2.0 * std::numbers::pi * 11.0 * s + p_pitch);
          for (std::size_t k = 0; k < L; ++k) {
            w[k] = 1.0 + std::sin(2.0 * std::numbers::pi * (3.0 + 2.0 * double(k)) * s + p_arm[k]);
          }
          poses[i].g_dir = gravity_in_sensor(roll, pitch, 1.0);
          poses[i].lever = blend_lever_arms(spec.lever_arms, w);
        }
        break;
      }
    case MotionKind::random: {
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> w(L);
        for (std::size_t i = 0; i < spec.n; ++i) {
          Eigen::Vector3d v(normal(rng), normal(rng), normal(rng));
          while (v.norm() < 1e-9) {
            v = Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
          }
          for (auto & x : w) {x = unit(rng) + 1e-3;}
          poses[i].g_dir = v.normalized();
          poses[i].lever = blend_lever_arms(spec.lever_arms, w);
        }
        break;
      }
  }
  return poses;
}

}  // namespace detail

/// Synthesize a dataset from known sensor parameters.
///
/// Reference wrenches are gravity wrenches of the load; raw readings invert
/// wrench = C·(raw − o) + C_t·t, so raw = C⁻¹·(f − C_t·t) + o + noise. With
/// a non-zero hysteresis gain the drift term sees
/// t + gain·(lag(t) − t), a first-order lag the estimator does not model.
inline GeneratedData generate(const ScenarioSpec & spec)
{
  spec.validate();
  Eigen::FullPivLU<Matrix6d> lu(spec.C_true);
  if (!lu.isInvertible()) {
    throw SingularMatrixError("ground-truth calibration matrix is singular");
  }
  const Matrix6d C_inv = lu.inverse();

  std::mt19937_64 rng(spec.seed);
  const std::vector<detail::Pose> poses = detail::motion(spec, rng);
  const Eigen::VectorXd temps = temperature_series(spec.temp, spec.n);

  const double lag_gain = 1.0 - std::exp(-spec.sample_period / spec.hysteresis_time_constant);
  double lagged = temps(0);

  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<RawSample> samples(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double t = temps(static_cast<Eigen::Index>(i));
    lagged += lag_gain * (t - lagged);
    const double t_drift = t + spec.hysteresis_gain * (lagged - t);

    const Eigen::Vector3d force = spec.mass * spec.gravity * poses[i].g_dir;
    Wrench f{force, poses[i].lever.cross(force)};

    Vector6d noise;
    for (int k = 0; k < 6; ++k) {
      noise(k) = spec.noise_sigma(k) * normal(rng);
    }
    RawSample& s = samples[i];
    s.time = double(i) * spec.sample_period;
    s.temperature = t;
    s.reference = f;
    s.raw = C_inv * (f.as_vector() - spec.Ct_true * t_drift) + spec.o_true + noise;
  }

  ModelMetadata md;
  md.estimation_type = "ground_truth";
  md.source_datasets = {spec.name};
  md.temperature_range = std::make_pair(spec.temp.start, spec.temp.end);
  CalibrationModel truth(
    spec.C_true, spec.o_true, Matrix6Xd(spec.Ct_true), {std::string(kTemperatureVariable)},
    std::move(md));
  return GeneratedData{
    Dataset(std::move(samples), dataset_kind(spec.kind), spec.name), std::move(truth)};
}

/// Concatenate datasets in order. Each source keeps its sample order; time
/// is re-stamped to keep increasing across the joins.
inline Dataset combine(std::span<const Dataset> datasets)
{
  if (datasets.empty()) {
    throw DataError("combine needs at least one dataset");
  }
  std::vector<RawSample> samples;
  std::string name;
  double next_start = datasets.front()[0].time;
  for (const Dataset & d : datasets) {
    const double t0 = d[0].time;
    for (const RawSample & s : d.samples()) {
      RawSample c = s;
      c.time = next_start + (s.time - t0);
      samples.push_back(c);
    }
    const double duration = d.samples().back().time - t0;
    const double step = d.size() > 1 ? duration / double(d.size() - 1) : 0.0;
    next_start += duration + step;
    name += (name.empty() ? "" : "+") + d.name();
  }
  return Dataset(std::move(samples), DatasetKind::combined, std::move(name));
}

inline Dataset combine(std::initializer_list<Dataset> datasets)
{
  return combine(std::span<const Dataset>(datasets.begin(), datasets.size()));
}

/// Sensor parameters for synthetic scenarios.
struct SensorPreset
{
  Matrix6d C_true;     // calibration once mounted
  Matrix6d workbench;  // manufacturer calibration before mounting
  Vector6d o_true;
  Vector6d Ct_true;
  Vector6d noise_sigma;  // raw counts
};

struct SensorOptions
{
  /// Full-scale wrench per raw unit.
  double force_scale = 1000.0;   // N
  double torque_scale = 100.0;   // N·m
  /// Relative coupling errors introduced by the factory and by mounting.
  double factory_coupling = 0.01;
  double mounting_error = 0.002;
  Vector6d drift = (Vector6d() << 0.08, -0.05, 1.0, 0.0, 0.0, 0.0).finished();
  /// The sensor reads zero at this temperature with no load.
  double tare_temperature = 30.0;
  double offset_spread = 0.005;  // raw units
  Vector6d wrench_noise = (Vector6d() << 0.7, 0.7, 0.7, 0.13, 0.13, 0.13).finished();
};

inline SensorPreset make_sensor(std::uint64_t seed, const SensorOptions & opt = {})
{
  std::mt19937_64 rng(seed ^ 0x5eed5eed5eedULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_matrix = [&](double sigma) {
      Matrix6d E;
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
          E(i, j) = sigma * normal(rng);
        }
      }
      return E;
    };
  Vector6d scale;
  scale << Eigen::Vector3d::Constant(opt.force_scale), Eigen::Vector3d::Constant(opt.torque_scale);

  SensorPreset p;
  p.workbench = scale.asDiagonal() * (Matrix6d::Identity() + random_matrix(opt.factory_coupling));
  p.C_true = p.workbench * (Matrix6d::Identity() + random_matrix(opt.mounting_error));
  p.Ct_true = opt.drift;
  Vector6d spread;
  for (int k = 0; k < 6; ++k) {
    spread(k) = opt.offset_spread * normal(rng);
  }
  p.o_true = p.C_true.fullPivLu().solve(p.Ct_true * opt.tare_temperature) + spread;
  p.noise_sigma = opt.wrench_noise.cwiseQuotient(scale);
  return p;
}

inline ScenarioSpec scenario_for(
  const SensorPreset & sensor, MotionKind kind, std::size_t n, TemperatureProfile temp,
  std::uint64_t seed, std::string name)
{
  ScenarioSpec s;
  s.kind = kind;
  s.n = n;
  s.temp = temp;
  s.C_true = sensor.C_true;
  s.o_true = sensor.o_true;
  s.Ct_true = sensor.Ct_true;
  s.noise_sigma = sensor.noise_sigma;
  s.seed = seed;
  s.name = std::move(name);
  return s;
}

/// Calibration and validation sets with the temperature ranges of the
/// recorded grid, right-leg balancing and validation sessions.
struct DriftScenario
{
  SensorPreset sensor;
  Dataset grid;
  Dataset balancing;
  Dataset validation;
  CalibrationModel truth;
};

inline constexpr TemperatureProfile kGridTemperature{32.0, 41.2};
inline constexpr TemperatureProfile kBalancingTemperature{38.1, 41.6};
inline constexpr TemperatureProfile kValidationTemperature{39.0, 40.5};

inline DriftScenario make_drift_scenario(
  std::uint64_t seed, std::size_t n = 1000, const SensorOptions & opt = {})
{
  SensorPreset sensor = make_sensor(seed, opt);
  GeneratedData grid = generate(
    scenario_for(sensor, MotionKind::grid, n, kGridTemperature, seed * 3 + 1, "grid"));
  GeneratedData bal = generate(
    scenario_for(sensor, MotionKind::balancing, n, kBalancingTemperature, seed * 3 + 2, "balancing"));
  GeneratedData val = generate(
    scenario_for(sensor, MotionKind::random, n, kValidationTemperature, seed * 3 + 3, "validation"));
  return DriftScenario{
    std::move(sensor), std::move(grid.dataset), std::move(bal.dataset), std::move(val.dataset),
    std::move(grid.ground_truth)};
}

}  // namespace ftcal

#endif  // FTCAL__SYNTH_HPP_
