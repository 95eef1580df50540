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

#ifndef FTCAL__SOLVER_HPP_
#define FTCAL__SOLVER_HPP_

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <string>

#include "ftcal/errors.hpp"
#include "ftcal/model.hpp"

namespace ftcal
{

/// Below this reciprocal condition number of the normal equations a solve
/// is refused.
inline constexpr double kMinNormalRcond = 1e-12;
/// Below this reciprocal condition number the per-axis solver switches from
/// Cholesky on the normal equations to QR on the stacked least-squares
/// system.
inline constexpr double kQrFallbackRcond = 1e-8;

/// Offset-adjusted regression data for one calibration solve.
///
/// Rows of R and F are the offset-adjusted raw measurements and reference
/// wrenches. Columns of X are extra linear variables (temperature, ...).
struct RegressionInput
{
  Eigen::MatrixXd R;   // n×6
  Eigen::MatrixXd F;   // n×6
  Eigen::MatrixXd X;   // n×m, m may be 0
  double lambda = 0.0;
  Matrix6d Cw = Matrix6d::Identity();
  Eigen::MatrixXd Ctw;  // 6×m; empty means zero
  bool regularize_extras = false;

  Eigen::Index n() const {return R.rows();}
  Eigen::Index m() const {return X.cols();}
};

struct SolveDiagnostics
{
  /// Reciprocal condition number of the normal-equations matrix.
  double rcond = 0.0;
  bool qr_fallback = false;
  /// RMS of the training residual per wrench axis.
  Vector6d residual_rms = Vector6d::Zero();

  double condition() const {return rcond > 0.0 ? 1.0 / rcond : INFINITY;}
};

struct Solution
{
  Matrix6d C = Matrix6d::Zero();
  Matrix6Xd Ct = Matrix6Xd(6, 0);
  SolveDiagnostics diagnostics;
};

/// [R, X] column concatenation.
inline Eigen::MatrixXd build_augmented(const Eigen::MatrixXd & R, const Eigen::MatrixXd & X)
{
  if (X.cols() == 0) {
    return R;
  }
  if (X.rows() != R.rows()) {
    throw DimensionError(
            "augmentation row mismatch: R has " + std::to_string(R.rows()) + " rows, X has " +
            std::to_string(X.rows()));
  }
  Eigen::MatrixXd Ra(R.rows(), R.cols() + X.cols());
  Ra << R, X;
  return Ra;
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd & A, const Eigen::MatrixXd & B)
{
  Eigen::MatrixXd K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return K;
}

/// Column-stacking vectorization.
inline Eigen::VectorXd vec(const Eigen::MatrixXd & M)
{
  return Eigen::Map<const Eigen::VectorXd>(M.data(), M.size());
}

inline Eigen::MatrixXd unvec(const Eigen::VectorXd & v, Eigen::Index rows, Eigen::Index cols)
{
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
}

/// True iff vec(A·X·B) == (left ⊗ A)·vec(X) to 1e-12 (scaled by the
/// magnitude of the left-hand side). The identity holds for left = Bᵀ.
inline bool vec_kron_holds(
  const Eigen::MatrixXd & A, const Eigen::MatrixXd & X, const Eigen::MatrixXd & B,
  const Eigen::MatrixXd & left)
{
  if (A.cols() != X.rows() || X.cols() != B.rows()) {
    throw DimensionError("vec_kron_check: A·X·B is not conformable");
  }
  const Eigen::MatrixXd K = kron(left, A);
  if (K.cols() != X.size() || K.rows() != A.rows() * B.cols()) {
    return false;
  }
  const Eigen::VectorXd lhs = vec(A * X * B);
  const Eigen::VectorXd rhs = K * vec(X);
  const double scale = std::max(1.0, lhs.cwiseAbs().maxCoeff());
  return (lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

inline bool vec_kron_check(
  const Eigen::MatrixXd & A, const Eigen::MatrixXd & X, const Eigen::MatrixXd & B)
{
  return vec_kron_holds(A, X, B, B.transpose());
}

/// Per-coefficient penalty weights for one axis row of [C, C_t]: λ on the
/// six raw-signal coefficients, λ or 0 on the extra-variable coefficients.
inline Eigen::VectorXd axis_penalty(double lambda, Eigen::Index m, bool regularize_extras)
{
  Eigen::VectorXd p(6 + m);
  p.head(6).setConstant(lambda);
  p.tail(m).setConstant(regularize_extras ? lambda : 0.0);
  return p;
}

/// diag(L) in vec([C, C_t]) ordering: column j of [C, C_t] occupies entries
/// 6j..6j+5, so the first 36 entries belong to C.
inline Eigen::VectorXd regularizer_diagonal(double lambda, Eigen::Index m, bool regularize_extras)
{
  Eigen::VectorXd d(6 * (6 + m));
  d.head(36).setConstant(lambda);
  d.tail(6 * m).setConstant(regularize_extras ? lambda : 0.0);
  return d;
}

/// Augmented workbench [C_w, C_tw] (6×(6+m)).
inline Eigen::MatrixXd augmented_workbench(const RegressionInput & in)
{
  Eigen::MatrixXd Cwa = Eigen::MatrixXd::Zero(6, 6 + in.m());
  Cwa.leftCols(6) = in.Cw;
  if (in.Ctw.size() > 0) {
    Cwa.rightCols(in.m()) = in.Ctw;
  }
  return Cwa;
}

inline void validate_input(const RegressionInput & in)
{
  if (in.R.cols() != 6 || in.F.cols() != 6) {
    throw DimensionError("R and F must have 6 columns");
  }
  if (in.R.rows() != in.F.rows()) {
    throw DimensionError(
            "R has " + std::to_string(in.R.rows()) + " rows but F has " +
            std::to_string(in.F.rows()));
  }
  if (in.m() > 0 && in.X.rows() != in.n()) {
    throw DimensionError("X row count does not match R");
  }
  if (in.Ctw.size() > 0 && (in.Ctw.rows() != 6 || in.Ctw.cols() != in.m())) {
    throw DimensionError("workbench extra coefficients must be 6×m");
  }
  if (in.n() < 6 + in.m()) {
    throw DimensionError(
            "need at least " + std::to_string(6 + in.m()) + " samples, got " +
            std::to_string(in.n()));
  }
  if (!in.R.allFinite() || !in.F.allFinite() || !in.X.allFinite() ||
    !in.Cw.allFinite() || !in.Ctw.allFinite())
  {
    throw DataError("regression input contains non-finite values");
  }
  if (!(in.lambda >= 0.0) || !std::isfinite(in.lambda)) {
    throw DataError("lambda must be a finite non-negative number");
  }
}

namespace detail
{

inline double symmetric_rcond(const Eigen::MatrixXd & G)
{
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  const double hi = es.eigenvalues().maxCoeff();
  const double lo = es.eigenvalues().minCoeff();
  if (!(hi > 0.0)) {
    return 0.0;
  }
  return std::max(lo, 0.0) / hi;
}

inline void require_conditioned(double rcond)
{
  if (!(rcond > kMinNormalRcond)) {
    throw IllConditionedError(
            "normal equations are ill-conditioned (rcond = " + std::to_string(rcond) +
            "); the dataset does not identify all coefficients", rcond);
  }
}

inline Solution pack(const RegressionInput & in, const Eigen::MatrixXd & Ca, double rcond)
{
  Solution s;
  s.C = Ca.leftCols(6);
  s.Ct = Ca.rightCols(in.m());
  s.diagnostics.rcond = rcond;
  const Eigen::MatrixXd Ra = build_augmented(in.R, in.X);
  const Eigen::MatrixXd resid = in.F - Ra * Ca.transpose();
  s.diagnostics.residual_rms =
    (resid.colwise().squaredNorm() / static_cast<double>(in.n())).cwiseSqrt().transpose();
  return s;
}

}  // namespace detail

/// Regularized objective as solved:
/// ‖Fᵀ − [C, C_t]·R_aᵀ‖² + Σ diag(L)·(vec([C, C_t]) − vec([C_w, C_tw]))².
/// The data term is not divided by n.
inline double regularized_objective(
  const RegressionInput & in, const Matrix6d & C, const Matrix6Xd & Ct)
{
  Eigen::MatrixXd Ca(6, 6 + in.m());
  Ca << C, Ct;
  const Eigen::MatrixXd Ra = build_augmented(in.R, in.X);
  const double data = (in.F - Ra * Ca.transpose()).squaredNorm();
  const Eigen::VectorXd d = regularizer_diagonal(in.lambda, in.m(), in.regularize_extras);
  const Eigen::VectorXd delta = vec(Ca - augmented_workbench(in));
  return data + (d.array() * delta.array().square()).sum();
}

enum class KroneckerMode
{
  /// Use K_Rᵀ·K_R = (R_aᵀR_a) ⊗ I₆ and K_Rᵀ·vec(Fᵀ) = vec(Fᵀ·R_a).
  block,
  /// Build K_R = R_a ⊗ I₆ explicitly (6n × 6(6+m)).
  materialize,
};

/// Joint closed-form solve over vec([C, C_t]):
/// (K_Rᵀ K_R + L)⁻¹ (K_Rᵀ vec(Fᵀ) + L vec([C_w, C_tw])), with K_R = R_a ⊗ I₆.
inline Solution solve_vectorized(
  const RegressionInput & in, KroneckerMode mode = KroneckerMode::block)
{
  validate_input(in);
  const Eigen::Index q = 6 + in.m();
  const Eigen::MatrixXd Ra = build_augmented(in.R, in.X);
  const Eigen::VectorXd L = regularizer_diagonal(in.lambda, in.m(), in.regularize_extras);
  const Eigen::VectorXd w = vec(augmented_workbench(in));
  const Eigen::MatrixXd I6 = Eigen::MatrixXd::Identity(6, 6);

  Eigen::MatrixXd normal;
  Eigen::VectorXd rhs;
  if (mode == KroneckerMode::materialize) {
    const Eigen::MatrixXd K = kron(Ra, I6);
    const Eigen::MatrixXd Ft = in.F.transpose();
    normal = K.transpose() * K;
    rhs = K.transpose() * vec(Ft);
  } else {
    normal = kron(Ra.transpose() * Ra, I6);
    rhs = vec(in.F.transpose() * Ra);
  }
  normal.diagonal() += L;
  rhs += L.cwiseProduct(w);

  const double rcond = detail::symmetric_rcond(normal);
  detail::require_conditioned(rcond);

  Eigen::VectorXd theta;
  bool fallback = false;
  if (rcond >= kQrFallbackRcond) {
    theta = normal.ldlt().solve(rhs);
  } else {
    // Stacked system [K; √L]·θ = [vec(Fᵀ); √L·w].
    const Eigen::MatrixXd K = kron(Ra, I6);
    const Eigen::MatrixXd Ft = in.F.transpose();
    Eigen::MatrixXd S(K.rows() + 6 * q, 6 * q);
    S << K, Eigen::MatrixXd(L.cwiseSqrt().asDiagonal());
    Eigen::VectorXd b(S.rows());
    b << vec(Ft), L.cwiseSqrt().cwiseProduct(w);
    theta = S.colPivHouseholderQr().solve(b);
    fallback = true;
  }
  Solution s = detail::pack(in, unvec(theta, 6, q), rcond);
  s.diagnostics.qr_fallback = fallback;
  return s;
}

/// Six independent ridge problems, one per wrench axis, sharing the
/// (6+m)×(6+m) normal matrix R_aᵀR_a + diag(penalty). This is the
/// production path.
inline Solution solve_per_axis(const RegressionInput & in)
{
  validate_input(in);
  const Eigen::Index q = 6 + in.m();
  const Eigen::MatrixXd Ra = build_augmented(in.R, in.X);
  const Eigen::VectorXd p = axis_penalty(in.lambda, in.m(), in.regularize_extras);
  // Column k holds the penalty target for axis k.
  const Eigen::MatrixXd W = augmented_workbench(in).transpose();

  Eigen::MatrixXd G = Ra.transpose() * Ra;
  G.diagonal() += p;
  const double rcond = detail::symmetric_rcond(G);
  detail::require_conditioned(rcond);

  Eigen::MatrixXd theta;  // q×6
  bool fallback = false;
  if (rcond >= kQrFallbackRcond) {
    const Eigen::MatrixXd rhs = Ra.transpose() * in.F + p.asDiagonal() * W;
    theta = G.llt().solve(rhs);
  } else {
    const Eigen::VectorXd sp = p.cwiseSqrt();
    Eigen::MatrixXd S(in.n() + q, q);
    S << Ra, Eigen::MatrixXd(sp.asDiagonal());
    Eigen::MatrixXd B(in.n() + q, 6);
    B << in.F, sp.asDiagonal() * W;
    theta = S.colPivHouseholderQr().solve(B);
    fallback = true;
  }
  Solution s = detail::pack(in, theta.transpose(), rcond);
  s.diagnostics.qr_fallback = fallback;
  return s;
}

inline Solution solve(const RegressionInput & in) {return solve_per_axis(in);}

}  // namespace ftcal

#endif  // FTCAL__SOLVER_HPP_
