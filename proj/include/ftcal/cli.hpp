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

#ifndef FTCAL__CLI_HPP_
#define FTCAL__CLI_HPP_

// Command-line front end. Needs CLI11 on the include path, so it is not
// pulled in by ftcal/ftcal.hpp.

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "ftcal/calibrate.hpp"
#include "ftcal/errors.hpp"
#include "ftcal/io.hpp"
#include "ftcal/model.hpp"
#include "ftcal/synth.hpp"
#include "ftcal/validate.hpp"

namespace ftcal::cli
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Precondition violated by the command-line arguments (exit code 2).
class UsageError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct CalibrateArgs
{
  std::vector<std::string> data;
  std::string offset_data;
  std::string workbench;
  std::string type;
  std::string lambda = "0";
  bool regularize_extras = false;
  std::string out;
  std::string format = "text";
};

struct SweepArgs
{
  std::vector<std::string> data;
  std::string validation;
  std::string offset_data;
  std::string workbench;
  std::vector<std::string> types;
  std::vector<std::string> lambdas;
  bool regularize_extras = false;
  std::string label;
  std::string out;
  std::string format = "text";
};

struct ValidateArgs
{
  std::string calibration;
  std::string validation;
  std::string baseline;
  std::string out;
  std::string format = "text";
};

struct GenerateArgs
{
  std::string kind;
  std::size_t n = 1000;
  std::string temp;
  std::string ramp = "linear";
  double time_constant = 0.25;
  double mass = 33.0;
  double noise_scale = 1.0;
  double hysteresis_gain = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t sensor_seed = 0;
  std::string name;
  std::string out;
  std::string truth;
  std::string workbench_out;
};

struct ReportArgs
{
  std::string input;
  std::string out;
  std::string format = "text";
};

namespace detail
{

inline double parse_lambda(const std::string & s)
{
  double v = 0.0;
  try {
    v = io::parse_double(s);
  } catch (const ParseError &) {
    throw UsageError("invalid lambda '" + s + "'");
  }
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw UsageError("lambda must be a finite non-negative number, got '" + s + "'");
  }
  return v;
}

inline std::vector<Dataset> load_all(const std::vector<std::string> & paths)
{
  std::vector<Dataset> out;
  out.reserve(paths.size());
  for (const auto & p : paths) {
    out.push_back(io::load_dataset(p).dataset);
  }
  return out;
}

inline bool same_file(const std::string & a, const std::string & b)
{
  std::error_code ec1, ec2;
  const auto ca = std::filesystem::weakly_canonical(a, ec1);
  const auto cb = std::filesystem::weakly_canonical(b, ec2);
  if (ec1 || ec2) {return a == b;}
  return ca == cb;
}

inline std::pair<double, double> parse_temp_range(const std::string & s)
{
  const auto parts = io::split(s, ':');
  if (parts.size() != 2) {
    throw UsageError("--temp expects START:END, got '" + s + "'");
  }
  try {
    const double a = io::parse_double(parts[0]);
    const double b = io::parse_double(parts[1]);
    if (b < a) {
      throw UsageError("--temp END must not be below START");
    }
    return {a, b};
  } catch (const ParseError &) {
    throw UsageError("--temp expects START:END, got '" + s + "'");
  }
}

inline std::string metrics_table(
  const AxisMetrics & m, const std::optional<AxisMetrics> & baseline = std::nullopt)
{
  using io::detail::pad;
  using io::detail::sci;
  std::ostringstream out;
  out << "axis" << pad("mse", 13) << pad("rms", 13) << pad("mean|e|", 13);
  if (baseline) {
    out << pad("base mse", 13) << pad("mse_%", 10);
  }
  out << "\n";
  for (int k = 0; k < 6; ++k) {
    out << pad(std::string(kAxisNames[k]), 4, true) << pad(sci(m.mse(k)), 13)
        << pad(sci(std::sqrt(m.mse(k))), 13) << pad(sci(m.mean_abs_residual(k)), 13);
    if (baseline) {
      out << pad(sci(baseline->mse(k)), 13);
      if (baseline->mse(k) > 0.0) {
        out << pad(io::detail::fixed(mse_reduction_percent(baseline->mse(k), m.mse(k)), 2), 10);
      } else {
        out << pad("undefined", 10);
      }
    }
    out << "\n";
  }
  return out.str();
}

inline std::string metrics_csv(
  const AxisMetrics & m, const std::optional<AxisMetrics> & baseline = std::nullopt)
{
  std::ostringstream out;
  out << "axis,mse,mean_abs_residual";
  if (baseline) {out << ",baseline_mse,mse_percent";}
  out << "\n";
  for (int k = 0; k < 6; ++k) {
    out << kAxisNames[k] << "," << io::format_double(m.mse(k)) << ","
        << io::format_double(m.mean_abs_residual(k));
    if (baseline) {
      out << "," << io::format_double(baseline->mse(k)) << ",";
      if (baseline->mse(k) > 0.0) {
        out << io::format_double(mse_reduction_percent(baseline->mse(k), m.mse(k)));
      }
    }
    out << "\n";
  }
  out << "force_norm_mean," << io::format_double(m.residual_norm_mean) << ",";
  if (baseline) {out << "," << io::format_double(baseline->residual_norm_mean) << ",";}
  out << "\n";
  return out.str();
}

}  // namespace detail

inline int cmd_calibrate(const CalibrateArgs & a, std::ostream & out)
{
  const EstimationType type = parse_estimation_type(a.type);
  const double lambda = detail::parse_lambda(a.lambda);
  if (lambda > 0.0 && a.workbench.empty()) {
    throw UsageError("--lambda > 0 needs --workbench (the regularization target)");
  }

  const std::vector<Dataset> data = detail::load_all(a.data);
  std::optional<Dataset> offset_data;
  if (!a.offset_data.empty()) {
    offset_data = io::load_dataset(a.offset_data).dataset;
  }
  EstimationConfig cfg;
  cfg.estimation_type = type;
  cfg.lambda = lambda;
  cfg.regularize_extras = a.regularize_extras;
  if (!a.workbench.empty()) {
    cfg.workbench = io::load_matrix6(a.workbench);
  }

  const CalibrationResult res =
    calibrate(data, cfg, offset_data ? &*offset_data : nullptr);
  const Dataset all = combine(data);
  const AxisMetrics train = evaluate(res.model, all);
  io::atomic_write(a.out, io::format_calibration(res.model));

  const double dist = (res.model.C() - cfg.workbench).norm();
  if (a.format == "csv") {
    out << "key,value\n"
        << "type," << to_string(type) << "\n"
        << "lambda," << io::format_double(lambda) << "\n"
        << "datasets," << all.name() << "\n"
        << "n," << all.size() << "\n"
        << "rcond," << io::format_double(res.diagnostics.rcond) << "\n"
        << "condition," << io::format_double(res.diagnostics.condition()) << "\n"
        << "qr_fallback," << (res.diagnostics.qr_fallback ? "true" : "false") << "\n";
    if (!a.workbench.empty()) {
      out << "c_minus_workbench," << io::format_double(dist) << "\n";
    }
    for (int k = 0; k < 6; ++k) {
      out << kAxisNames[k] << "_mse," << io::format_double(train.mse(k)) << "\n";
    }
    return kExitOk;
  }

  out << "calibrated " << to_string(type) << " lambda=" << io::format_double(lambda) << " on "
      << all.name() << " (n=" << all.size() << ")\n";
  if (res.offset) {
    out << "offset: sphere fit on " << res.offset->source_dataset
        << (res.offset->drift_aware ? " (temperature-drifting center)" : "")
        << ", radius " << io::detail::fixed(res.offset->sphere_radius.value_or(0.0), 4)
        << " N, fit rms " << io::detail::sci(res.offset->fit_rms) << "\n";
  } else {
    out << "offset: centered means\n";
  }
  out << "normal matrix rcond " << io::detail::sci(res.diagnostics.rcond) << ", condition "
      << io::detail::sci(res.diagnostics.condition())
      << (res.diagnostics.qr_fallback ? ", solved by QR" : "") << "\n";
  if (!a.workbench.empty()) {
    out << "||C - C_w|| = " << io::detail::sci(dist) << "\n";
  }
  out << "training residual:\n" << detail::metrics_table(train);
  out << "wrote " << a.out << "\n";
  return kExitOk;
}

inline int cmd_sweep(const SweepArgs & a, std::ostream & out, std::ostream & err)
{
  SweepSpec spec;
  if (!a.types.empty()) {
    spec.types.clear();
    for (const auto & t : a.types) {
      spec.types.push_back(parse_estimation_type(t));
    }
  }
  if (!a.lambdas.empty()) {
    spec.lambdas.clear();
    for (const auto & l : a.lambdas) {
      spec.lambdas.push_back(detail::parse_lambda(l));
    }
  }
  const bool regularized = std::any_of(
    spec.lambdas.begin(), spec.lambdas.end(), [](double l) {return l > 0.0;});
  if (regularized && a.workbench.empty()) {
    throw UsageError("a lambda schedule with lambda > 0 needs --workbench");
  }
  for (const auto & p : a.data) {
    if (detail::same_file(p, a.validation)) {
      throw UsageError("validation file '" + a.validation + "' is also a calibration file");
    }
  }

  const std::vector<Dataset> data = detail::load_all(a.data);
  const Dataset valid = io::load_dataset(a.validation).dataset;
  std::optional<Dataset> offset_data;
  if (!a.offset_data.empty()) {
    offset_data = io::load_dataset(a.offset_data).dataset;
    spec.offset_data = &*offset_data;
  }
  if (!a.workbench.empty()) {
    spec.workbench = io::load_matrix6(a.workbench);
  }
  spec.regularize_extras = a.regularize_extras;
  spec.label = a.label;

  const SweepReport report = run_sweep(data, valid, spec);
  const std::string csv = io::format_sweep_csv(report);
  if (!a.out.empty()) {
    io::atomic_write(a.out, csv);
  }

  if (a.format == "csv") {
    out << csv;
  } else {
    out << io::format_sweep_text(report);
  }
  const std::size_t failed = report.failed_cells();
  if (failed == report.rows.size()) {
    err << "error: every calibration cell failed (" << failed << " of " << report.rows.size()
        << ")\n";
    return kExitFailure;
  }
  if (a.format != "csv") {
    out << "\n" << io::format_best_by_axis(report) << "\n";
  }
  const BestCell best = best_overall(report);
  out << "best: " << to_string(best.type) << " lambda=" << io::format_double(best.lambda)
      << " force residual " << io::detail::fixed(best.value, 4) << " N (workbench "
      << io::detail::fixed(report.workbench_row.metrics.residual_norm_mean, 4) << " N), "
      << failed << " of " << report.rows.size() << " cells failed\n";
  return kExitOk;
}

inline int cmd_validate(const ValidateArgs & a, std::ostream & out)
{
  const CalibrationModel model = io::load_calibration(a.calibration);
  const Dataset valid = io::load_dataset(a.validation).dataset;
  const AxisMetrics m = evaluate(model, valid);
  std::optional<AxisMetrics> base;
  if (!a.baseline.empty()) {
    base = evaluate(io::load_calibration(a.baseline), valid);
  }

  std::string text;
  if (a.format == "csv") {
    text = detail::metrics_csv(m, base);
  } else {
    std::ostringstream s;
    s << "calibration: " << model.metadata().estimation_type << " lambda="
      << io::format_double(model.metadata().lambda) << "\n"
      << "validation: " << valid.name() << " (n=" << valid.size() << ")\n"
      << detail::metrics_table(m, base)
      << "force residual norm mean: " << io::detail::fixed(m.residual_norm_mean, 4) << " N\n";
    if (base) {
      s << "baseline force residual norm mean: "
        << io::detail::fixed(base->residual_norm_mean, 4) << " N";
      if (m.residual_norm_mean > 0.0) {
        s << " (" << io::detail::fixed(base->residual_norm_mean / m.residual_norm_mean, 2)
          << "x)";
      }
      s << "\n";
    }
    text = s.str();
  }
  if (!a.out.empty()) {
    io::atomic_write(a.out, text);
  }
  out << text;
  return kExitOk;
}

inline int cmd_generate(const GenerateArgs & a, std::ostream & out)
{
  const MotionKind kind = parse_motion_kind(a.kind);
  TemperatureProfile temp = kind == MotionKind::grid ? kGridTemperature :
    kind == MotionKind::balancing ? kBalancingTemperature : kValidationTemperature;
  if (!a.temp.empty()) {
    std::tie(temp.start, temp.end) = detail::parse_temp_range(a.temp);
  }
  temp.shape = a.ramp == "saturating" ? RampShape::saturating : RampShape::linear;
  temp.time_constant = a.time_constant;
  if (!(a.noise_scale >= 0.0)) {
    throw UsageError("--noise-scale must be non-negative");
  }

  const std::filesystem::path out_path(a.out);
  const std::string name = a.name.empty() ? out_path.stem().string() : a.name;
  const SensorPreset sensor = make_sensor(a.sensor_seed);
  ScenarioSpec spec = scenario_for(sensor, kind, a.n, temp, a.seed, name);
  spec.mass = a.mass;
  spec.noise_sigma *= a.noise_scale;
  spec.hysteresis_gain = a.hysteresis_gain;
  try {
    spec.validate();
  } catch (const DataError & e) {
    throw UsageError(e.what());
  }
  const GeneratedData g = generate(spec);

  io::Metadata md = {
    {"kind", std::string(to_string(kind))},
    {"n", std::to_string(a.n)},
    {"seed", std::to_string(a.seed)},
    {"sensor_seed", std::to_string(a.sensor_seed)},
    {"mass", io::format_double(a.mass)},
    {"gravity", io::format_double(spec.gravity)},
    {"temp_start", io::format_double(temp.start)},
    {"temp_end", io::format_double(temp.end)},
    {"ramp", a.ramp},
    {"noise_scale", io::format_double(a.noise_scale)},
    {"hysteresis_gain", io::format_double(a.hysteresis_gain)},
  };
  const std::string truth = a.truth.empty() ?
    (out_path.parent_path() / (out_path.stem().string() + ".truth.json")).string() : a.truth;
  io::atomic_write(a.out, io::format_dataset_csv(g.dataset, md));
  io::atomic_write(truth, io::format_calibration(g.ground_truth));
  if (!a.workbench_out.empty()) {
    io::atomic_write(a.workbench_out, io::format_matrix6(sensor.workbench));
  }
  out << "wrote " << a.out << " (" << to_string(kind) << ", n=" << a.n << ", "
      << io::format_double(temp.start) << " to " << io::format_double(temp.end) << " degC)\n"
      << "wrote " << truth << "\n";
  if (!a.workbench_out.empty()) {
    out << "wrote " << a.workbench_out << "\n";
  }
  return kExitOk;
}

inline int cmd_report(const ReportArgs & a, std::ostream & out)
{
  const SweepReport report = io::parse_sweep_csv(io::read_file(a.input));
  std::string text;
  if (a.format == "csv") {
    text = io::format_sweep_csv(report);
  } else {
    std::ostringstream s;
    s << io::format_sweep_text(report);
    if (report.failed_cells() < report.rows.size()) {
      const BestCell best = best_overall(report);
      s << "\n" << io::format_best_by_axis(report) << "\n"
        << "best: " << to_string(best.type) << " lambda=" << io::format_double(best.lambda)
        << " force residual " << io::detail::fixed(best.value, 4) << " N (workbench "
        << io::detail::fixed(report.workbench_row.metrics.residual_norm_mean, 4) << " N)\n";
    }
    text = s.str();
  }
  if (!a.out.empty()) {
    io::atomic_write(a.out, text);
  }
  out << text;
  return kExitOk;
}

/// Entry point of the `ftcal` tool. Returns the process exit code:
/// 0 success, 1 parse or solve failure, 2 invalid arguments.
inline int run(int argc, const char * const * argv, std::ostream & out, std::ostream & err)
{
  CLI::App app{"ftcal: in-situ force/torque sensor calibration with temperature compensation",
    "ftcal"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ftcal 0.1.0");

  const auto types = CLI::IsMember({"SnT", "SwT", "CnT", "CwT"});
  const auto formats = CLI::IsMember({"csv", "text"});

  CalibrateArgs ca;
  auto * cal = app.add_subcommand("calibrate", "Estimate a calibration from datasets");
  cal->add_option("--data", ca.data, "Calibration dataset CSV files")->required()->expected(1, -1);
  cal->add_option("--offset-data", ca.offset_data,
    "Dataset for the sphere offset fit (default: first --data file)");
  cal->add_option("--workbench", ca.workbench, "Workbench matrix (6 lines of 6 values)");
  cal->add_option("--type", ca.type, "Estimation type")->required()->check(types);
  cal->add_option("--lambda", ca.lambda, "Regularization weight toward the workbench matrix")
    ->capture_default_str();
  cal->add_flag("--regularize-extras", ca.regularize_extras,
    "Also shrink the temperature coefficients toward zero");
  cal->add_option("--out", ca.out, "Output calibration JSON")->required();
  cal->add_option("--format", ca.format, "Diagnostics format")->check(formats)
    ->capture_default_str();

  SweepArgs sa;
  auto * sw = app.add_subcommand("sweep", "Evaluate every (type, lambda) on a validation set");
  sw->add_option("--data", sa.data, "Calibration dataset CSV files")->required()->expected(1, -1);
  sw->add_option("--validation", sa.validation, "Validation dataset CSV")->required();
  sw->add_option("--offset-data", sa.offset_data, "Dataset for the sphere offset fit");
  sw->add_option("--workbench", sa.workbench, "Workbench matrix (6 lines of 6 values)");
  sw->add_option("--types", sa.types, "Estimation types (comma separated, default all)")
    ->delimiter(',')->check(types);
  sw->add_option("--lambdas", sa.lambdas, "Lambda schedule (comma separated, default 13 values)")
    ->delimiter(',');
  sw->add_flag("--regularize-extras", sa.regularize_extras,
    "Also shrink the temperature coefficients toward zero");
  sw->add_option("--label", sa.label, "Dataset label in the report");
  sw->add_option("--out", sa.out, "Output sweep CSV");
  sw->add_option("--format", sa.format, "Standard output format")->check(formats)
    ->capture_default_str();

  ValidateArgs va;
  auto * val = app.add_subcommand("validate", "Residual metrics of a calibration");
  val->add_option("--calibration", va.calibration, "Calibration JSON")->required();
  val->add_option("--validation", va.validation, "Validation dataset CSV")->required();
  val->add_option("--baseline", va.baseline, "No-temperature calibration JSON for MSE_%");
  val->add_option("--out", va.out, "Also write the table to this file");
  val->add_option("--format", va.format, "Output format")->check(formats)->capture_default_str();

  GenerateArgs ga;
  auto * gen = app.add_subcommand("generate", "Write a synthetic dataset and its ground truth");
  gen->add_option("--kind", ga.kind, "Motion archetype")->required()
    ->check(CLI::IsMember({"grid", "balancing", "random"}));
  gen->add_option("--n", ga.n, "Number of samples")->capture_default_str();
  gen->add_option("--temp", ga.temp, "Temperature ramp START:END in degC");
  gen->add_option("--ramp", ga.ramp, "Ramp shape")->check(CLI::IsMember({"linear", "saturating"}))
    ->capture_default_str();
  gen->add_option("--time-constant", ga.time_constant,
    "Saturating ramp time constant, fraction of the dataset")->capture_default_str();
  gen->add_option("--mass", ga.mass, "Suspended mass in kg")->capture_default_str();
  gen->add_option("--noise-scale", ga.noise_scale, "Multiplier on the sensor noise (0: noiseless)")
    ->capture_default_str();
  gen->add_option("--hysteresis-gain", ga.hysteresis_gain,
    "Weight of the lagged temperature in the drift")->capture_default_str();
  gen->add_option("--seed", ga.seed, "Motion and noise seed")->capture_default_str();
  gen->add_option("--sensor-seed", ga.sensor_seed, "Seed of the simulated sensor")
    ->capture_default_str();
  gen->add_option("--name", ga.name, "Dataset name (default: output file stem)");
  gen->add_option("--out", ga.out, "Output dataset CSV")->required();
  gen->add_option("--truth", ga.truth, "Ground-truth JSON (default: <out stem>.truth.json)");
  gen->add_option("--workbench-out", ga.workbench_out, "Also write the workbench matrix");

  ReportArgs ra;
  auto * rep = app.add_subcommand("report", "Render a sweep CSV");
  rep->add_option("--input,--data", ra.input, "Sweep CSV")->required();
  rep->add_option("--out", ra.out, "Also write the rendering to this file");
  rep->add_option("--format", ra.format, "Output format")->check(formats)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e, out, err);
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*cal) {return cmd_calibrate(ca, out);}
    if (*sw) {return cmd_sweep(sa, out, err);}
    if (*val) {return cmd_validate(va, out);}
    if (*gen) {return cmd_generate(ga, out);}
    if (*rep) {return cmd_report(ra, out);}
  } catch (const UsageError & e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error & e) {
    err << "error (" << e.kind() << "): " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception & e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace ftcal::cli

#endif  // FTCAL__CLI_HPP_
