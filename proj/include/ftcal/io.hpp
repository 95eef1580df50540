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

#ifndef FTCAL__IO_HPP_
#define FTCAL__IO_HPP_

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ftcal/errors.hpp"
#include "ftcal/model.hpp"
#include "ftcal/validate.hpp"

namespace ftcal::io
{

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v)
{
  if (std::isnan(v)) {return "nan";}
  if (std::isinf(v)) {return v > 0 ? "inf" : "-inf";}
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {s.remove_prefix(1);}
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (!s.empty() && s.front() == '+') {s.remove_prefix(1);}
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
    throw ParseError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::string read_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Write to a sibling temporary file and rename it over `path`, so readers
/// never observe a partial file.
inline void atomic_write(const std::filesystem::path & path, std::string_view content)
{
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open '" + tmp.string() + "' for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw IoError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

// --- dataset CSV ---------------------------------------------------------

inline constexpr std::string_view kDatasetHeader =
  "time,r0,r1,r2,r3,r4,r5,temp,fx,fy,fz,tx,ty,tz";

/// Ordered key/value pairs written as `# key=value` lines before the header.
using Metadata = std::vector<std::pair<std::string, std::string>>;

struct DatasetFile
{
  Dataset dataset;
  Metadata metadata;
};

inline std::string format_dataset_csv(const Dataset & d, const Metadata & metadata = {})
{
  std::string out;
  for (const auto & [k, v] : metadata) {
    out += "# " + k + "=" + v + "\n";
  }
  out += kDatasetHeader;
  out += '\n';
  for (const RawSample & s : d.samples()) {
    out += format_double(s.time);
    for (int k = 0; k < 6; ++k) {
      out += ',' + format_double(s.raw(k));
    }
    out += ',' + format_double(s.temperature);
    const Vector6d f = s.reference.as_vector();
    for (int k = 0; k < 6; ++k) {
      out += ',' + format_double(f(k));
    }
    out += '\n';
  }
  return out;
}

inline std::string metadata_value(const Metadata & md, std::string_view key)
{
  for (const auto & [k, v] : md) {
    if (k == key) {return v;}
  }
  return {};
}

/// Parse the dataset CSV schema. `name` becomes the dataset name; a
/// `# kind=...` metadata line sets the kind (custom otherwise).
inline DatasetFile parse_dataset_csv(std::string_view text, std::string name)
{
  Metadata md;
  std::vector<RawSample> samples;
  bool header_seen = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) {end = text.size();}
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') {line.remove_suffix(1);}
    if (line.empty()) {continue;}
    if (!header_seen) {
      if (line.front() == '#') {
        std::string_view body = line.substr(1);
        while (!body.empty() && body.front() == ' ') {body.remove_prefix(1);}
        const std::size_t eq = body.find('=');
        if (eq != std::string_view::npos) {
          md.emplace_back(std::string(body.substr(0, eq)), std::string(body.substr(eq + 1)));
        }
        continue;
      }
      if (line != kDatasetHeader) {
        throw ParseError(
                name + ":" + std::to_string(line_no) + ": expected header '" +
                std::string(kDatasetHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 14) {
      throw ParseError(
              name + ":" + std::to_string(line_no) + ": expected 14 fields, got " +
              std::to_string(cells.size()));
    }
    try {
      RawSample s;
      s.time = parse_double(cells[0]);
      for (int k = 0; k < 6; ++k) {
        s.raw(k) = parse_double(cells[1 + k]);
      }
      s.temperature = parse_double(cells[7]);
      Vector6d f;
      for (int k = 0; k < 6; ++k) {
        f(k) = parse_double(cells[8 + k]);
      }
      s.reference = Wrench::from_vector(f);
      validate_sample(s);
      samples.push_back(s);
    } catch (const Error & e) {
      throw ParseError(name + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header_seen) {
    throw ParseError(name + ": missing header line");
  }
  const std::string kind = metadata_value(md, "kind");
  const DatasetKind k = kind.empty() ? DatasetKind::custom : parse_dataset_kind(kind);
  return DatasetFile{Dataset(std::move(samples), k, std::move(name)), std::move(md)};
}

inline DatasetFile load_dataset(const std::filesystem::path & path)
{
  return parse_dataset_csv(read_file(path), path.stem().string());
}

// --- workbench matrix ----------------------------------------------------

/// Six lines of six comma-separated values, row-major.
inline Matrix6d parse_matrix6(std::string_view text, const std::string & source = "workbench")
{
  Matrix6d M;
  int row = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) {end = text.size();}
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') {line.remove_suffix(1);}
    if (line.empty() || line.front() == '#') {continue;}
    if (row == 6) {
      throw ParseError(source + ": more than 6 rows");
    }
    const auto cells = split(line, ',');
    if (cells.size() != 6) {
      throw ParseError(source + ": row " + std::to_string(row + 1) + " does not have 6 values");
    }
    for (int j = 0; j < 6; ++j) {
      M(row, j) = parse_double(cells[j]);
    }
    ++row;
  }
  if (row != 6) {
    throw ParseError(source + ": expected 6 rows, got " + std::to_string(row));
  }
  if (!M.allFinite()) {
    throw ParseError(source + ": non-finite entries");
  }
  return M;
}

inline std::string format_matrix6(const Matrix6d & M)
{
  std::string out;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      out += (j ? "," : "") + format_double(M(i, j));
    }
    out += '\n';
  }
  return out;
}

inline Matrix6d load_matrix6(const std::filesystem::path & path)
{
  return parse_matrix6(read_file(path), path.string());
}

// --- calibration JSON ----------------------------------------------------

namespace detail
{

inline nlohmann::json rows_json(const Eigen::MatrixXd & M)
{
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    nlohmann::json r = nlohmann::json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      r.push_back(M(i, j));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

inline nlohmann::json vector_json(const Eigen::VectorXd & v)
{
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    a.push_back(v(i));
  }
  return a;
}

inline Eigen::VectorXd json_vector(const nlohmann::json & j, const char * field)
{
  if (!j.is_array()) {
    throw ParseError(std::string("calibration field '") + field + "' must be an array");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ParseError(std::string("calibration field '") + field + "' must hold numbers");
    }
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline Eigen::MatrixXd json_rows(const nlohmann::json & j, Eigen::Index cols, const char * field)
{
  if (!j.is_array() || j.size() != 6) {
    throw ParseError(std::string("calibration field '") + field + "' must have 6 rows");
  }
  Eigen::MatrixXd M(6, cols);
  for (std::size_t i = 0; i < 6; ++i) {
    const Eigen::VectorXd r = json_vector(j[i], field);
    if (r.size() != cols) {
      throw ParseError(
              std::string("calibration field '") + field + "' row " + std::to_string(i) +
              " has " + std::to_string(r.size()) + " values, expected " + std::to_string(cols));
    }
    M.row(static_cast<Eigen::Index>(i)) = r.transpose();
  }
  return M;
}

}  // namespace detail

inline nlohmann::json to_json(const CalibrationModel & model)
{
  nlohmann::json j;
  j["C"] = detail::rows_json(model.C());
  j["o"] = detail::vector_json(model.o());
  j["Ct"] = detail::rows_json(model.Ct());
  j["extra_variable_names"] = model.extra_variable_names();
  const ModelMetadata & md = model.metadata();
  nlohmann::json meta;
  meta["estimation_type"] = md.estimation_type;
  meta["lambda"] = md.lambda;
  meta["source_datasets"] = md.source_datasets;
  if (md.temperature_range) {
    meta["temperature_range"] = {md.temperature_range->first, md.temperature_range->second};
  } else {
    meta["temperature_range"] = nullptr;
  }
  if (md.centering) {
    meta["centering"] = {
      {"mu_r", detail::vector_json(md.centering->mu_r)},
      {"mu_f", detail::vector_json(md.centering->mu_f.as_vector())},
      {"mu_extras", detail::vector_json(md.centering->mu_extras)}};
  }
  j["metadata"] = std::move(meta);
  return j;
}

inline CalibrationModel model_from_json(const nlohmann::json & j)
{
  try {
    for (const char * f : {"C", "o", "Ct", "extra_variable_names"}) {
      if (!j.contains(f)) {
        throw ParseError(std::string("calibration file lacks field '") + f + "'");
      }
    }
    const auto names = j.at("extra_variable_names").get<std::vector<std::string>>();
    const Eigen::Index m = static_cast<Eigen::Index>(names.size());
    const Matrix6d C = detail::json_rows(j.at("C"), 6, "C");
    const Eigen::VectorXd o = detail::json_vector(j.at("o"), "o");
    if (o.size() != 6) {
      throw ParseError("calibration field 'o' must have 6 values");
    }
    const Matrix6Xd Ct = detail::json_rows(j.at("Ct"), m, "Ct");

    ModelMetadata md;
    if (j.contains("metadata") && j.at("metadata").is_object()) {
      const auto & meta = j.at("metadata");
      md.estimation_type = meta.value("estimation_type", std::string());
      md.lambda = meta.value("lambda", 0.0);
      if (meta.contains("source_datasets")) {
        md.source_datasets = meta.at("source_datasets").get<std::vector<std::string>>();
      }
      if (meta.contains("temperature_range") && meta.at("temperature_range").is_array()) {
        const auto & tr = meta.at("temperature_range");
        md.temperature_range = std::make_pair(tr.at(0).get<double>(), tr.at(1).get<double>());
      }
      if (meta.contains("centering") && meta.at("centering").is_object()) {
        const auto & c = meta.at("centering");
        CenteringStats s;
        s.mu_r = detail::json_vector(c.at("mu_r"), "mu_r");
        s.mu_f = Wrench::from_vector(detail::json_vector(c.at("mu_f"), "mu_f"));
        s.mu_extras = detail::json_vector(c.at("mu_extras"), "mu_extras");
        md.centering = s;
      }
    }
    return CalibrationModel(C, Vector6d(o), Ct, names, std::move(md));
  } catch (const nlohmann::json::exception & e) {
    throw ParseError(std::string("malformed calibration file: ") + e.what());
  }
}

inline std::string format_calibration(const CalibrationModel & model)
{
  return to_json(model).dump(2) + "\n";
}

inline CalibrationModel parse_calibration(std::string_view text)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception & e) {
    throw ParseError(std::string("calibration file is not valid JSON: ") + e.what());
  }
  return model_from_json(j);
}

inline CalibrationModel load_calibration(const std::filesystem::path & path)
{
  return parse_calibration(read_file(path));
}

// --- sweep report --------------------------------------------------------

inline constexpr std::string_view kSweepHeader =
  "dataset,type,lambda,fx_mse,fy_mse,fz_mse,tx_mse,ty_mse,tz_mse,force_norm_mean,status";

namespace detail
{

inline std::string sweep_csv_row(const SweepRow & r)
{
  std::string out = r.dataset + "," + r.type_name() + "," + format_double(r.lambda);
  for (int k = 0; k < 6; ++k) {
    out += "," + format_double(r.metrics.mse(k));
  }
  out += "," + format_double(r.metrics.residual_norm_mean) + "," + r.status + "\n";
  return out;
}

}  // namespace detail

/// One line per calibration cell followed by the workbench baseline.
inline std::string format_sweep_csv(const SweepReport & report)
{
  std::string out(kSweepHeader);
  out += '\n';
  for (const SweepRow & r : report.rows) {
    out += detail::sweep_csv_row(r);
  }
  out += detail::sweep_csv_row(report.workbench_row);
  return out;
}

inline SweepReport parse_sweep_csv(std::string_view text)
{
  SweepReport report;
  bool header_seen = false;
  bool have_workbench = false;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) {end = text.size();}
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') {line.remove_suffix(1);}
    if (line.empty()) {continue;}
    if (!header_seen) {
      if (line != kSweepHeader) {
        throw ParseError("sweep report: unexpected header");
      }
      header_seen = true;
      continue;
    }
    const auto c = split(line, ',');
    if (c.size() != 11) {
      throw ParseError("sweep report line " + std::to_string(line_no) + ": expected 11 fields");
    }
    SweepRow r;
    r.dataset = std::string(c[0]);
    if (c[1] != "Workbench") {
      r.type = parse_estimation_type(c[1]);
    }
    r.lambda = parse_double(c[2]);
    for (int k = 0; k < 6; ++k) {
      r.metrics.mse(k) = parse_double(c[3 + k]);
    }
    r.metrics.residual_norm_mean = parse_double(c[9]);
    r.status = std::string(c[10]);
    if (r.type) {
      report.rows.push_back(std::move(r));
    } else {
      report.workbench_row = std::move(r);
      have_workbench = true;
    }
  }
  if (!header_seen || !have_workbench) {
    throw ParseError("sweep report is missing its header or workbench row");
  }
  return report;
}

namespace detail
{

inline std::string fixed(double v, int precision)
{
  if (!std::isfinite(v)) {return "-";}
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss << std::setprecision(precision) << std::fixed << v;
  return ss.str();
}

inline std::string sci(double v)
{
  if (!std::isfinite(v)) {return "-";}
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss << std::setprecision(4) << std::scientific << v;
  return ss.str();
}

inline std::string pad(const std::string & s, std::size_t w, bool left = false)
{
  if (s.size() >= w) {return s;}
  return left ? s + std::string(w - s.size(), ' ') : std::string(w - s.size(), ' ') + s;
}

}  // namespace detail

/// Aligned plain-text rendering of the sweep.
inline std::string format_sweep_text(const SweepReport & report)
{
  std::size_t wd = 7;
  for (const auto & r : report.rows) {wd = std::max(wd, r.dataset.size());}
  std::ostringstream out;
  out << detail::pad("dataset", wd, true) << "  " << detail::pad("type", 9, true)
      << detail::pad("lambda", 10);
  for (auto a : kAxisNames) {
    out << detail::pad(std::string(a) + "_mse", 12);
  }
  out << detail::pad("|f| mean", 10) << "  status\n";
  auto line = [&](const SweepRow & r) {
      out << detail::pad(r.dataset, wd, true) << "  " << detail::pad(r.type_name(), 9, true)
          << detail::pad(r.type ? format_double(r.lambda) : "-", 10);
      for (int k = 0; k < 6; ++k) {
        out << detail::pad(detail::sci(r.metrics.mse(k)), 12);
      }
      out << detail::pad(detail::fixed(r.metrics.residual_norm_mean, 3), 10) << "  " << r.status
          << "\n";
    };
  for (const auto & r : report.rows) {line(r);}
  line(report.workbench_row);
  return out.str();
}

/// Per-axis winners, RMS residual in the value column.
inline std::string format_best_by_axis(const SweepReport & report)
{
  const auto best = best_by_axis(report);
  std::ostringstream out;
  out << "axis  best calibration                     rms residual  workbench\n";
  for (int k = 0; k < 6; ++k) {
    const BestCell & b = best[k];
    const std::string what = b.dataset + " " + std::string(to_string(b.type)) + " lambda=" +
      format_double(b.lambda);
    const char * unit = k < 3 ? " N" : " Nm";
    out << detail::pad(std::string(kAxisNames[k]), 4, true) << "  " << detail::pad(what, 35, true)
        << "  " << detail::pad(detail::fixed(std::sqrt(b.value), 5) + unit, 12) << "  "
        << detail::fixed(std::sqrt(report.workbench_row.metrics.mse(k)), 5) << unit << "\n";
  }
  return out.str();
}

}  // namespace ftcal::io

#endif  // FTCAL__IO_HPP_
