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

// Simulated desk session: a sensor whose z force drifts with temperature is
// calibrated with and without the temperature term, then checked against an
// independent validation recording.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ftcal/ftcal.hpp"

int main()
{
  using namespace ftcal;
  const DriftScenario sc = make_drift_scenario(7);
  const std::vector<Dataset> data = {sc.grid, sc.balancing};

  EstimationConfig cfg;
  cfg.workbench = sc.sensor.workbench;

  std::printf("%-10s %10s %10s %10s %12s\n", "type", "fx rms", "fy rms", "fz rms", "|f| mean");
  const AxisMetrics wb = evaluate(CalibrationModel::workbench(sc.sensor.workbench), sc.validation);
  std::printf(
    "%-10s %10.4f %10.4f %10.4f %12.4f\n", "workbench", std::sqrt(wb.mse(0)), std::sqrt(wb.mse(1)),
    std::sqrt(wb.mse(2)), wb.residual_norm_mean);
  for (EstimationType t : kAllEstimationTypes) {
    cfg.estimation_type = t;
    const CalibrationResult res = calibrate(data, cfg);
    const AxisMetrics m = evaluate(res.model, sc.validation);
    std::printf(
      "%-10s %10.4f %10.4f %10.4f %12.4f\n", std::string(to_string(t)).c_str(),
      std::sqrt(m.mse(0)), std::sqrt(m.mse(1)), std::sqrt(m.mse(2)), m.residual_norm_mean);
  }
  return 0;
}
