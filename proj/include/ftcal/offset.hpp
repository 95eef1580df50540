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

#ifndef FTCAL__OFFSET_HPP_
#define FTCAL__OFFSET_HPP_

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ftcal/errors.hpp"
#include "ftcal/model.hpp"

namespace ftcal
{

enum class OffsetMethod { sphere, centralized };

struct OffsetEstimate
{
  Vector6d o_r = Vector6d::Zero();  // raw-space offset, counts
  OffsetMethod method = OffsetMethod::sphere;
  std::string source_dataset;
  std::optional<double> sphere_radius;  // N
  double fit_rms = 0.0;
  bool drift_aware = false;
};

/// Regression blocks after offset handling.
struct AdjustedData
{
  Eigen::MatrixXd R;  // n×6
  Eigen::MatrixXd F;  // n×6
  Eigen::MatrixXd X;  // n×m
};

struct CenteredData : AdjustedData
{
  CenteringStats stats;
};

namespace detail
{

/// Column means computed around the first row, so constant columns come
/// out exactly, followed by one refinement pass.
inline Eigen::RowVectorXd stable_column_mean(const Eigen::MatrixXd & M)
{
  if (M.rows() == 0) {
    return Eigen::RowVectorXd::Zero(M.cols());
  }
  const Eigen::RowVectorXd pivot = M.row(0);
  Eigen::RowVectorXd mean = pivot + (M.rowwise() - pivot).colwise().mean();
  mean += (M.rowwise() - mean).colwise().mean();
  return mean;
}

}  // namespace detail

/// Centralized offset removal: subtract the column means of raw
/// measurements, reference wrenches and extra variables.
inline CenteredData centralize(
  const Eigen::MatrixXd & R, const Eigen::MatrixXd & F, const Eigen::MatrixXd & X)
{
  if (R.rows() == 0) {
    throw DataError("cannot centralize an empty dataset");
  }
  if (F.rows() != R.rows() || (X.cols() > 0 && X.rows() != R.rows())) {
    throw DimensionError("centralize: row counts differ");
  }
  CenteredData out;
  const Eigen::RowVectorXd mu_r = detail::stable_column_mean(R);
  const Eigen::RowVectorXd mu_f = detail::stable_column_mean(F);
  out.R = R.rowwise() - mu_r;
  out.F = F.rowwise() - mu_f;
  if (X.cols() > 0) {
    const Eigen::RowVectorXd mu_x = detail::stable_column_mean(X);
    out.X = X.rowwise() - mu_x;
    out.stats.mu_extras = mu_x.transpose();
  } else {
    out.X = Eigen::MatrixXd(R.rows(), 0);
    out.stats.mu_extras = Eigen::VectorXd(0);
  }
  out.stats.mu_r = mu_r.transpose();
  out.stats.mu_f = Wrench::from_vector(mu_f.transpose());
  return out;
}

inline CenteredData centralize(
  const Dataset & dataset, const std::vector<std::string> & extra_names = {})
{
  return centralize(
    dataset.raw_matrix(), dataset.reference_matrix(), dataset.extras_matrix(extra_names));
}

/// r̂ᵢ = rᵢ − o_r; reference wrenches and extra variables pass through.
inline AdjustedData apply_offset(
  const Dataset & dataset, const OffsetEstimate & est,
  const std::vector<std::string> & extra_names = {})
{
  AdjustedData out;
  out.R = dataset.raw_matrix().rowwise() - est.o_r.transpose();
  out.F = dataset.reference_matrix();
  out.X = dataset.extras_matrix(extra_names);
  return out;
}

/// Result of an algebraic sphere fit in force space.
struct SphereFit
{
  Eigen::Vector3d center = Eigen::Vector3d::Zero();  // at temperature 0 when drift-aware
  Eigen::Vector3d drift = Eigen::Vector3d::Zero();   // center motion per degC
  double radius = 0.0;
  double rms = 0.0;  // RMS of ‖pᵢ − center(tᵢ)‖ − radius
  bool drift_aware = false;
};

namespace detail
{

inline void require_sphere_coverage(const Eigen::MatrixX3d & points)
{
  if (points.rows() < 4) {
    throw DegenerateGeometryError("sphere fit needs at least 4 points");
  }
  const Eigen::RowVector3d mean = points.colwise().mean();
  const Eigen::MatrixX3d c = points.rowwise() - mean;
  const Eigen::Matrix3d cov = c.transpose() * c / static_cast<double>(points.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov, Eigen::EigenvaluesOnly);
  const double hi = es.eigenvalues().maxCoeff();
  const double lo = es.eigenvalues().minCoeff();
  if (!(hi > 0.0) || lo <= 1e-6 * hi) {
    throw DegenerateGeometryError(
            "force points are coplanar or collinear; the sphere is not identifiable");
  }
}

inline double sphere_rms(
  const Eigen::MatrixX3d & points, const Eigen::VectorXd & t, const SphereFit & fit)
{
  double acc = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const Eigen::Vector3d c = fit.center + fit.drift * (t.size() ? t(i) : 0.0);
    const double r = (points.row(i).transpose() - c).norm() - fit.radius;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(points.rows()));
}

}  // namespace detail

/// Kåsa fit: solves ‖p‖² = 2cᵀp + (ρ² − ‖c‖²) by linear least squares.
inline SphereFit fit_sphere(const Eigen::MatrixX3d & points)
{
  detail::require_sphere_coverage(points);
  // Work around the centroid for conditioning.
  const Eigen::RowVector3d mean = points.colwise().mean();
  const Eigen::MatrixX3d q = points.rowwise() - mean;
  Eigen::MatrixXd A(q.rows(), 4);
  A << 2.0 * q, Eigen::VectorXd::Ones(q.rows());
  const Eigen::VectorXd b = q.rowwise().squaredNorm();
  const Eigen::Vector4d x = A.colPivHouseholderQr().solve(b);

  SphereFit fit;
  fit.center = x.head<3>() + mean.transpose();
  const double r2 = x(3) + x.head<3>().squaredNorm();
  if (!(r2 > 0.0)) {
    throw DegenerateGeometryError("sphere fit produced a non-positive squared radius");
  }
  fit.radius = std::sqrt(r2);
  fit.rms = detail::sphere_rms(points, Eigen::VectorXd(), fit);
  return fit;
}

/// Kåsa fit for a sphere whose center moves linearly with temperature:
/// pᵢ = qᵢ + c + k·tᵢ with ‖qᵢ‖ = ρ. Expanding gives a problem linear in
/// (c, k, ρ² − ‖c‖², cᵀk, ‖k‖²), solved here with temperature rescaled to
/// [-1, 1] for conditioning.
inline SphereFit fit_drifting_sphere(const Eigen::MatrixX3d & points, const Eigen::VectorXd & t)
{
  detail::require_sphere_coverage(points);
  if (t.size() != points.rows()) {
    throw DimensionError("temperature vector length does not match point count");
  }
  const double t_mid = 0.5 * (t.maxCoeff() + t.minCoeff());
  const double t_half = 0.5 * (t.maxCoeff() - t.minCoeff());
  if (!(t_half > 1e-9 * std::max(1.0, std::abs(t_mid)))) {
    return fit_sphere(points);
  }
  const Eigen::VectorXd s = (t.array() - t_mid) / t_half;
  const Eigen::RowVector3d mean = points.colwise().mean();
  const Eigen::MatrixX3d q = points.rowwise() - mean;

  // With center(s) = a + b·s:
  // ‖q‖² = 2aᵀq + 2s·bᵀq + (ρ² − ‖a‖²) − 2(aᵀb)·s − ‖b‖²·s².
  const Eigen::Index n = q.rows();
  Eigen::MatrixXd A(n, 9);
  A.leftCols(3) = 2.0 * q;
  A.middleCols(3, 3) = 2.0 * (q.array().colwise() * s.array()).matrix();
  A.col(6).setOnes();
  A.col(7) = s;
  A.col(8) = s.array().square().matrix();
  const Eigen::VectorXd b = q.rowwise().squaredNorm();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < 9) {
    return fit_sphere(points);
  }
  const Eigen::VectorXd x = qr.solve(b);

  const Eigen::Vector3d a = x.head<3>();
  const Eigen::Vector3d b_s = x.segment<3>(3);
  const double r2 = x(6) + a.squaredNorm();
  if (!(r2 > 0.0)) {
    throw DegenerateGeometryError("sphere fit produced a non-positive squared radius");
  }
  SphereFit fit;
  fit.drift = b_s / t_half;
  fit.drift_aware = true;
  fit.center = a + mean.transpose() - fit.drift * t_mid;
  fit.radius = std::sqrt(r2);
  fit.rms = detail::sphere_rms(points, t, fit);
  return fit;
}

enum class SphereDrift
{
  /// Plain Kåsa fit; temperature is ignored.
  none,
  /// Let the sphere center and the torque bias move linearly with the
  /// dataset temperature, reporting their values at 0 degC.
  temperature,
};

/// In-situ offset from a motion that sweeps a constant-magnitude gravity
/// load over many orientations.
///
/// Forces mapped through the workbench matrix, C_w·rᵢ, trace a sphere whose
/// center is the force part of C_w·o_r. The torque part is the mean of
/// (C_w·rᵢ − referenceᵢ) over the torque channels (its intercept at 0 degC
/// when drift-aware). The raw-space offset is C_w⁻¹ applied to the stacked
/// force center and torque bias.
inline OffsetEstimate fit_sphere_offset(
  const Dataset & dataset, const Matrix6d & Cw, SphereDrift drift = SphereDrift::none)
{
  Eigen::FullPivLU<Matrix6d> lu(Cw);
  if (!lu.isInvertible()) {
    throw SingularMatrixError("workbench matrix is singular; cannot map offsets to raw space");
  }
  const RowMatrixX6d mapped = dataset.raw_matrix() * Cw.transpose();
  const Eigen::MatrixX3d points = mapped.leftCols<3>();
  const Eigen::VectorXd t = dataset.temperatures();

  const SphereFit fit = drift == SphereDrift::temperature ?
    fit_drifting_sphere(points, t) : fit_sphere(points);
  const bool drift_aware = fit.drift_aware;

  const Eigen::MatrixX3d torque_bias =
    mapped.rightCols<3>() - dataset.reference_matrix().rightCols<3>();
  Eigen::Vector3d torque_offset;
  if (drift_aware) {
    const double t_mid = 0.5 * (t.maxCoeff() + t.minCoeff());
    Eigen::MatrixXd A(t.size(), 2);
    A << Eigen::VectorXd::Ones(t.size()), t.array() - t_mid;
    const Eigen::MatrixXd coef = A.colPivHouseholderQr().solve(Eigen::MatrixXd(torque_bias));
    torque_offset = (coef.row(0) - t_mid * coef.row(1)).transpose();
  } else {
    torque_offset = detail::stable_column_mean(torque_bias).transpose();
  }

  Vector6d mapped_offset;
  mapped_offset << fit.center, torque_offset;

  OffsetEstimate est;
  est.o_r = lu.solve(mapped_offset);
  est.method = OffsetMethod::sphere;
  est.source_dataset = dataset.name();
  est.sphere_radius = fit.radius;
  est.fit_rms = fit.rms;
  est.drift_aware = drift_aware;
  if (!est.o_r.allFinite()) {
    throw DataError("sphere offset is not finite");
  }
  return est;
}

}  // namespace ftcal

#endif  // FTCAL__OFFSET_HPP_
