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

#ifndef FTCAL__VALIDATE_HPP_
#define FTCAL__VALIDATE_HPP_

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftcal/calibrate.hpp"
#include "ftcal/errors.hpp"
#include "ftcal/model.hpp"

namespace ftcal
{

/// The λ schedule of the published sweep.
inline const std::vector<double> & default_lambda_schedule()
{
  static const std::vector<double> schedule = {
    0.0, 1.0, 5.0, 10.0, 50.0, 100.0, 1000.0, 5000.0, 10000.0, 50000.0, 100000.0, 5e5, 1e6};
  return schedule;
}

struct AxisMetrics
{
  Vector6d mse = Vector6d::Zero();                // N², (N·m)²
  Vector6d mean_abs_residual = Vector6d::Zero();  // N, N·m
  double residual_norm_mean = 0.0;                // mean ‖force residual‖, N
};

/// Residual statistics of `model` against the reference wrenches of
/// `dataset`. The residual (prediction − reference) is the external-wrench
/// estimate for a no-contact dataset, so zero means a perfect sensor.
inline AxisMetrics evaluate(const CalibrationModel & model, const Dataset & dataset)
{
  const Eigen::MatrixXd extras = dataset.extras_matrix(model.extra_variable_names());
  const RowMatrixX6d pred = model.predict_rows(dataset.raw_matrix(), extras);
  const RowMatrixX6d resid = pred - dataset.reference_matrix();
  const double n = static_cast<double>(dataset.size());

  AxisMetrics m;
  m.mse = resid.colwise().squaredNorm().transpose() / n;
  m.mean_abs_residual = resid.cwiseAbs().colwise().sum().transpose() / n;
  m.residual_norm_mean = resid.leftCols<3>().rowwise().norm().sum() / n;
  return m;
}

inline AxisMetrics mse_per_axis(const CalibrationModel & model, const Dataset & dataset)
{
  return evaluate(model, dataset);
}

inline AxisMetrics residual_wrench(const CalibrationModel & model, const Dataset & dataset)
{
  return evaluate(model, dataset);
}

/// Percentage of error removed by the temperature-aware estimate:
/// (MSE_noT − MSE_t) / MSE_noT · 100. Negative when temperature hurts.
inline double mse_reduction_percent(double mse_no_temperature, double mse_temperature)
{
  if (!(mse_no_temperature > 0.0)) {
    throw UndefinedBaselineError("MSE reduction needs a positive baseline MSE");
  }
  return (mse_no_temperature - mse_temperature) / mse_no_temperature * 100.0;
}

inline Vector6d mse_reduction_percent(const Vector6d & mse_no_temperature, const Vector6d & mse_temperature)
{
  Vector6d out;
  for (int k = 0; k < 6; ++k) {
    out(k) = mse_reduction_percent(mse_no_temperature(k), mse_temperature(k));
  }
  return out;
}

struct SweepSpec
{
  std::vector<EstimationType> types = {kAllEstimationTypes.begin(), kAllEstimationTypes.end()};
  std::vector<double> lambdas = default_lambda_schedule();
  Matrix6d workbench = Matrix6d::Identity();
  Matrix6Xd workbench_extra = Matrix6Xd(6, 0);
  bool regularize_extras = false;
  /// Label written in the dataset column; defaults to the joined dataset names.
  std::string label;
  /// Dataset for the sphere offset; defaults to the first calibration set.
  const Dataset * offset_data = nullptr;
};

struct SweepRow
{
  std::string dataset;
  std::optional<EstimationType> type;  // nullopt for the workbench baseline
  double lambda = 0.0;
  /// "ok" or "failed:<error kind>".
  std::string status = "ok";
  std::string message;
  AxisMetrics metrics;

  bool ok() const {return status == "ok";}
  std::string type_name() const {return type ? std::string(to_string(*type)) : "Workbench";}
};

struct SweepReport
{
  /// One row per (type, λ), types in the order given, λ ascending within
  /// the given schedule order.
  std::vector<SweepRow> rows;
  SweepRow workbench_row;

  std::size_t failed_cells() const
  {
    std::size_t n = 0;
    for (const auto & r : rows) {n += r.ok() ? 0 : 1;}
    return n;
  }
};

/// Evaluate every (type, λ) calibration on the validation set, plus the
/// workbench baseline. A failing cell is recorded and the sweep continues.
inline SweepReport run_sweep(
  std::span<const Dataset> calib_data, const Dataset & valid_data, const SweepSpec & spec)
{
  if (calib_data.empty()) {
    throw DataError("sweep needs at least one calibration dataset");
  }
  for (const Dataset & d : calib_data) {
    if (&d == &valid_data || d.name() == valid_data.name()) {
      throw DataError("validation dataset '" + valid_data.name() + "' is also a calibration dataset");
    }
  }
  std::string label = spec.label;
  if (label.empty()) {
    for (const Dataset & d : calib_data) {
      label += (label.empty() ? "" : "+") + d.name();
    }
  }

  SweepReport report;
  report.rows.reserve(spec.types.size() * spec.lambdas.size());
  for (EstimationType type : spec.types) {
    for (double lambda : spec.lambdas) {
      SweepRow row;
      row.dataset = label;
      row.type = type;
      row.lambda = lambda;
      try {
        EstimationConfig cfg;
        cfg.estimation_type = type;
        cfg.lambda = lambda;
        cfg.workbench = spec.workbench;
        if (uses_temperature(type)) {
          cfg.workbench_extra = spec.workbench_extra;
        }
        cfg.regularize_extras = spec.regularize_extras;
        const CalibrationResult res = calibrate(calib_data, cfg, spec.offset_data);
        row.metrics = evaluate(res.model, valid_data);
      } catch (const Error & e) {
        row.status = "failed:" + e.kind();
        row.message = e.what();
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.metrics.mse.setConstant(nan);
        row.metrics.mean_abs_residual.setConstant(nan);
        row.metrics.residual_norm_mean = nan;
      }
      report.rows.push_back(std::move(row));
    }
  }
  report.workbench_row.dataset = label;
  report.workbench_row.metrics = evaluate(CalibrationModel::workbench(spec.workbench), valid_data);
  return report;
}

inline SweepReport run_sweep(
  const Dataset & calib_data, const Dataset & valid_data, const SweepSpec & spec)
{
  return run_sweep(std::span<const Dataset>(&calib_data, 1), valid_data, spec);
}

struct BestCell
{
  std::string dataset;
  EstimationType type = EstimationType::SnT;
  double lambda = 0.0;
  double value = 0.0;
};

namespace detail
{

/// Strict "a beats b": smaller value, then smaller λ, then type order.
inline bool better_cell(double va, const SweepRow & a, double vb, const SweepRow & b)
{
  if (va != vb) {return va < vb;}
  if (a.lambda != b.lambda) {return a.lambda < b.lambda;}
  return *a.type < *b.type;
}

template<typename Metric>
const SweepRow * best_row(const SweepReport & report, Metric metric)
{
  const SweepRow * best = nullptr;
  for (const SweepRow & r : report.rows) {
    if (!r.ok() || !r.type || !std::isfinite(metric(r))) {continue;}
    if (!best || better_cell(metric(r), r, metric(*best), *best)) {
      best = &r;
    }
  }
  if (!best) {
    throw DataError("sweep report has no successful calibration cells");
  }
  return best;
}

}  // namespace detail

/// Per-axis winner over the calibration cells, ranked by that axis's MSE.
inline std::array<BestCell, 6> best_by_axis(const SweepReport & report)
{
  std::array<BestCell, 6> out;
  for (int k = 0; k < 6; ++k) {
    const SweepRow * r = detail::best_row(
      report, [k](const SweepRow & row) {return row.metrics.mse(k);});
    out[k] = BestCell{r->dataset, *r->type, r->lambda, r->metrics.mse(k)};
  }
  return out;
}

/// Winner by mean force-residual norm, the single-matrix criterion.
inline BestCell best_overall(const SweepReport & report)
{
  const SweepRow * r = detail::best_row(
    report, [](const SweepRow & row) {return row.metrics.residual_norm_mean;});
  return BestCell{r->dataset, *r->type, r->lambda, r->metrics.residual_norm_mean};
}

}  // namespace ftcal

#endif  // FTCAL__VALIDATE_HPP_
