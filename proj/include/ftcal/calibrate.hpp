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

#ifndef FTCAL__CALIBRATE_HPP_
#define FTCAL__CALIBRATE_HPP_

#include <Eigen/LU>

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftcal/errors.hpp"
#include "ftcal/model.hpp"
#include "ftcal/offset.hpp"
#include "ftcal/solver.hpp"
#include "ftcal/synth.hpp"

namespace ftcal
{

struct CalibrationResult
{
  CalibrationModel model;
  SolveDiagnostics diagnostics;
  std::optional<OffsetEstimate> offset;
  std::optional<CenteringStats> centering;
};

inline std::vector<std::string> extra_names_for(EstimationType type)
{
  if (uses_temperature(type)) {
    return {std::string(kTemperatureVariable)};
  }
  return {};
}

/// Full calibration pipeline: offset handling for the estimation type,
/// then the regularized solve.
///
/// Sphere types fit the offset on `offset_data` (defaults to the first
/// calibration dataset) and reuse it for every sample. Centralized types
/// center the combined data and convert the means into a raw-space offset
/// o = μ_r − C⁻¹(μ_f − C_t·μ_x).
inline CalibrationResult calibrate(
  std::span<const Dataset> data, const EstimationConfig & config,
  const Dataset * offset_data = nullptr)
{
  config.validate();
  if (data.empty()) {
    throw DataError("calibration needs at least one dataset");
  }
  const Dataset all = combine(data);
  const std::vector<std::string> names = extra_names_for(config.estimation_type);
  const Eigen::Index m = static_cast<Eigen::Index>(names.size());
  if (config.workbench_extra.cols() != 0 && config.workbench_extra.cols() != m) {
    throw DimensionError("workbench extra coefficients do not match the estimation type");
  }

  RegressionInput in;
  in.lambda = config.lambda;
  in.Cw = config.workbench;
  in.Ctw = config.workbench_extra;
  in.regularize_extras = config.regularize_extras;

  std::optional<OffsetEstimate> offset;
  std::optional<CenteringStats> centering;
  if (uses_sphere_offset(config.estimation_type)) {
    const Dataset & src = offset_data ? *offset_data : data.front();
    offset = fit_sphere_offset(
      src, config.workbench,
      uses_temperature(config.estimation_type) ? SphereDrift::temperature : SphereDrift::none);
    AdjustedData adj = apply_offset(all, *offset, names);
    in.R = std::move(adj.R);
    in.F = std::move(adj.F);
    in.X = std::move(adj.X);
  } else {
    CenteredData c = centralize(all, names);
    in.R = std::move(c.R);
    in.F = std::move(c.F);
    in.X = std::move(c.X);
    centering = c.stats;
  }

  const Solution sol = solve(in);

  Vector6d o;
  if (offset) {
    o = offset->o_r;
  } else {
    Eigen::FullPivLU<Matrix6d> lu(sol.C);
    if (!lu.isInvertible()) {
      throw SingularMatrixError("estimated calibration matrix is singular; cannot express offset");
    }
    Vector6d bias = centering->mu_f.as_vector();
    if (m > 0) {
      bias -= sol.Ct * centering->mu_extras;
    }
    o = centering->mu_r - lu.solve(bias);
  }

  ModelMetadata md;
  md.estimation_type = std::string(to_string(config.estimation_type));
  md.lambda = config.lambda;
  for (const Dataset & d : data) {
    md.source_datasets.push_back(d.name());
  }
  md.temperature_range = all.temperature_range();
  md.centering = centering;

  return CalibrationResult{
    CalibrationModel(sol.C, o, sol.Ct, names, std::move(md)),
    sol.diagnostics, offset, centering};
}

inline CalibrationResult calibrate(
  const Dataset & data, const EstimationConfig & config, const Dataset * offset_data = nullptr)
{
  return calibrate(std::span<const Dataset>(&data, 1), config, offset_data);
}

}  // namespace ftcal

#endif  // FTCAL__CALIBRATE_HPP_
