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

#ifndef FTCAL__MODEL_HPP_
#define FTCAL__MODEL_HPP_

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ftcal/errors.hpp"

namespace ftcal
{

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix6Xd = Eigen::Matrix<double, 6, Eigen::Dynamic>;
using RowMatrixX6d = Eigen::Matrix<double, Eigen::Dynamic, 6>;

inline constexpr double kMinTemperature = -20.0;
inline constexpr double kMaxTemperature = 120.0;
inline constexpr std::string_view kTemperatureVariable = "temperature";

/// Axis labels in wrench order.
inline constexpr std::array<std::string_view, 6> kAxisNames = {"fx", "fy", "fz", "tx", "ty", "tz"};

/// 6D force: force in N, torque in N·m, both expressed in the sensor frame.
struct Wrench
{
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();

  static Wrench from_vector(const Vector6d & v)
  {
    return Wrench{v.head<3>(), v.tail<3>()};
  }

  Vector6d as_vector() const
  {
    Vector6d v;
    v << force, torque;
    return v;
  }

  bool is_finite() const {return force.allFinite() && torque.allFinite();}
};

/// One dataset row.
struct RawSample
{
  double time = 0.0;             // s since dataset start
  Vector6d raw = Vector6d::Zero();  // gauge counts
  double temperature = 0.0;      // °C
  Wrench reference;              // model-predicted load on the sensor
};

/// Throws DataError when the sample violates the ingestion bounds.
inline void validate_sample(const RawSample & s)
{
  if (!std::isfinite(s.time)) {
    throw DataError("sample time is not finite");
  }
  if (!s.raw.allFinite()) {
    throw DataError("raw measurement contains non-finite values");
  }
  if (!(s.temperature >= kMinTemperature && s.temperature <= kMaxTemperature)) {
    throw DataError(
            "temperature " + std::to_string(s.temperature) + " outside [-20, 120] degC");
  }
  if (!s.reference.is_finite()) {
    throw DataError("reference wrench contains non-finite values");
  }
}

enum class DatasetKind { grid, balancing, random, combined, custom };

inline std::string_view to_string(DatasetKind k)
{
  switch (k) {
    case DatasetKind::grid: return "grid";
    case DatasetKind::balancing: return "balancing";
    case DatasetKind::random: return "random";
    case DatasetKind::combined: return "combined";
    case DatasetKind::custom: return "custom";
  }
  return "custom";
}

inline DatasetKind parse_dataset_kind(std::string_view s)
{
  for (auto k : {DatasetKind::grid, DatasetKind::balancing, DatasetKind::random,
      DatasetKind::combined, DatasetKind::custom})
  {
    if (to_string(k) == s) {return k;}
  }
  throw ParseError("unknown dataset kind '" + std::string(s) + "'");
}

/// Ordered list of samples with non-decreasing time. Immutable after
/// construction.
class Dataset
{
public:
  Dataset(std::vector<RawSample> samples, DatasetKind kind, std::string name)
  : samples_(std::move(samples)), kind_(kind), name_(std::move(name))
  {
    if (samples_.empty()) {
      throw DataError("dataset '" + name_ + "' has no samples");
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      validate_sample(samples_[i]);
      if (i > 0 && samples_[i].time < samples_[i - 1].time) {
        throw DataError("dataset '" + name_ + "': time decreases at row " + std::to_string(i));
      }
    }
  }

  const std::vector<RawSample> & samples() const {return samples_;}
  std::size_t size() const {return samples_.size();}
  DatasetKind kind() const {return kind_;}
  const std::string & name() const {return name_;}
  const RawSample & operator[](std::size_t i) const {return samples_[i];}

  RowMatrixX6d raw_matrix() const
  {
    RowMatrixX6d m(size(), 6);
    for (std::size_t i = 0; i < size(); ++i) {
      m.row(static_cast<Eigen::Index>(i)) = samples_[i].raw.transpose();
    }
    return m;
  }

  RowMatrixX6d reference_matrix() const
  {
    RowMatrixX6d m(size(), 6);
    for (std::size_t i = 0; i < size(); ++i) {
      m.row(static_cast<Eigen::Index>(i)) = samples_[i].reference.as_vector().transpose();
    }
    return m;
  }

  Eigen::VectorXd temperatures() const
  {
    Eigen::VectorXd t(size());
    for (std::size_t i = 0; i < size(); ++i) {
      t(static_cast<Eigen::Index>(i)) = samples_[i].temperature;
    }
    return t;
  }

  std::pair<double, double> temperature_range() const
  {
    const auto t = temperatures();
    return {t.minCoeff(), t.maxCoeff()};
  }

  /// n×m matrix of the named extra variables. Only "temperature" is
  /// carried by a dataset row.
  Eigen::MatrixXd extras_matrix(const std::vector<std::string> & names) const
  {
    Eigen::MatrixXd x(size(), static_cast<Eigen::Index>(names.size()));
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (names[j] != kTemperatureVariable) {
        throw DimensionError("dataset '" + name_ + "' has no extra variable '" + names[j] + "'");
      }
      x.col(static_cast<Eigen::Index>(j)) = temperatures();
    }
    return x;
  }

private:
  std::vector<RawSample> samples_;
  DatasetKind kind_;
  std::string name_;
};

/// Estimation types, declared in tie-break order.
enum class EstimationType { SnT, SwT, CnT, CwT };

inline constexpr std::array<EstimationType, 4> kAllEstimationTypes = {
  EstimationType::SnT, EstimationType::SwT, EstimationType::CnT, EstimationType::CwT};

inline std::string_view to_string(EstimationType t)
{
  switch (t) {
    case EstimationType::SnT: return "SnT";
    case EstimationType::SwT: return "SwT";
    case EstimationType::CnT: return "CnT";
    case EstimationType::CwT: return "CwT";
  }
  return "?";
}

inline EstimationType parse_estimation_type(std::string_view s)
{
  for (auto t : kAllEstimationTypes) {
    if (to_string(t) == s) {return t;}
  }
  throw ParseError("unknown estimation type '" + std::string(s) + "' (expected SnT, SwT, CnT, CwT)");
}

inline bool uses_sphere_offset(EstimationType t)
{
  return t == EstimationType::SnT || t == EstimationType::SwT;
}

inline bool uses_temperature(EstimationType t)
{
  return t == EstimationType::SwT || t == EstimationType::CwT;
}

/// Means subtracted by centralized offset removal.
struct CenteringStats
{
  Vector6d mu_r = Vector6d::Zero();
  Wrench mu_f;
  Eigen::VectorXd mu_extras;
};

struct ModelMetadata
{
  std::string estimation_type;  // SnT/SwT/CnT/CwT, "workbench" or "ground_truth"
  double lambda = 0.0;
  std::vector<std::string> source_datasets;
  std::optional<std::pair<double, double>> temperature_range;
  std::optional<CenteringStats> centering;
};

/// Estimated sensor model: wrench = C·(raw − o) + Ct·extras, with the offset
/// o stored in raw-count space.
class CalibrationModel
{
public:
  CalibrationModel(
    const Matrix6d & C, const Vector6d & o, const Matrix6Xd & Ct,
    std::vector<std::string> extra_names, ModelMetadata metadata = {})
  : C_(C), o_(o), Ct_(Ct), extra_names_(std::move(extra_names)), metadata_(std::move(metadata))
  {
    if (!C_.allFinite() || !o_.allFinite() || !Ct_.allFinite()) {
      throw DataError("calibration model contains non-finite coefficients");
    }
    if (static_cast<std::size_t>(Ct_.cols()) != extra_names_.size()) {
      throw DimensionError(
              "Ct has " + std::to_string(Ct_.cols()) + " columns but " +
              std::to_string(extra_names_.size()) + " extra variable names were given");
    }
  }

  /// Model with no extra variables.
  CalibrationModel(const Matrix6d & C, const Vector6d & o, ModelMetadata metadata = {})
  : CalibrationModel(C, o, Matrix6Xd(6, 0), {}, std::move(metadata)) {}

  /// Workbench baseline: C_w with zero offset and no extra variables.
  static CalibrationModel workbench(const Matrix6d & Cw)
  {
    ModelMetadata md;
    md.estimation_type = "workbench";
    return CalibrationModel(Cw, Vector6d::Zero(), std::move(md));
  }

  const Matrix6d & C() const {return C_;}
  const Vector6d & o() const {return o_;}
  const Matrix6Xd & Ct() const {return Ct_;}
  std::size_t m() const {return extra_names_.size();}
  const std::vector<std::string> & extra_variable_names() const {return extra_names_;}
  const ModelMetadata & metadata() const {return metadata_;}

  Vector6d predict_vector(const Vector6d & raw, const Eigen::VectorXd & extras) const
  {
    if (static_cast<std::size_t>(extras.size()) != m()) {
      throw DimensionError(
              "expected " + std::to_string(m()) + " extra variables, got " +
              std::to_string(extras.size()));
    }
    Vector6d f = C_ * (raw - o_);
    if (m() > 0) {
      f += Ct_ * extras;
    }
    return f;
  }

  Wrench predict(const Vector6d & raw, const Eigen::VectorXd & extras) const
  {
    return Wrench::from_vector(predict_vector(raw, extras));
  }

  /// Row-wise prediction; rows of the result are wrenches.
  RowMatrixX6d predict_rows(const RowMatrixX6d & raw, const Eigen::MatrixXd & extras) const
  {
    if (static_cast<std::size_t>(extras.cols()) != m() ||
      (m() > 0 && extras.rows() != raw.rows()))
    {
      throw DimensionError("extras matrix does not match the model's extra variables");
    }
    RowMatrixX6d out = (raw.rowwise() - o_.transpose()) * C_.transpose();
    if (m() > 0) {
      out += extras * Ct_.transpose();
    }
    return out;
  }

private:
  Matrix6d C_;
  Vector6d o_;
  Matrix6Xd Ct_;
  std::vector<std::string> extra_names_;
  ModelMetadata metadata_;
};

inline Wrench predict(
  const CalibrationModel & model, const Vector6d & raw,
  const Eigen::VectorXd & extras = Eigen::VectorXd())
{
  return model.predict(raw, extras);
}

/// Recipe for one calibration solve.
struct EstimationConfig
{
  EstimationType estimation_type = EstimationType::CnT;
  double lambda = 0.0;
  Matrix6d workbench = Matrix6d::Identity();
  /// 6×m; an empty matrix means all-zero.
  Matrix6Xd workbench_extra = Matrix6Xd(6, 0);
  bool regularize_extras = false;

  void validate() const
  {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw DataError("lambda must be a finite non-negative number");
    }
    if (!workbench.allFinite() || !workbench_extra.allFinite()) {
      throw DataError("workbench matrix contains non-finite values");
    }
  }
};

}  // namespace ftcal

#endif  // FTCAL__MODEL_HPP_
