// Copyright 2026 The mtdpp Authors. All Rights Reserved.
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
#pragma once

#include <span>

#include "mtdpp/types.hpp"

namespace mtdpp {

/// Non-owning view of a low-rank kernel L = V V^T + D^2, or of one task slice
/// K_t = V diag(R_t)^2 V^T + D^2 when a task diagonal is supplied.
///
/// The referenced factors must outlive the view.
class FactorizedKernel {
 public:
  FactorizedKernel(const RowMatrix& factors, const Eigen::VectorXd& bias);
  FactorizedKernel(const RowMatrix& factors, const Eigen::VectorXd& bias,
                   std::span<const double> task_diagonal);

  Eigen::Index items() const { return factors_->rows(); }
  Eigen::Index rank() const { return factors_->cols(); }
  const RowMatrix& factors() const { return *factors_; }
  const Eigen::VectorXd& bias() const { return *bias_; }
  bool has_task() const { return !task_.empty(); }

  /// R_k^2 for a task kernel, 1 otherwise.
  double component_weight(Eigen::Index k) const {
    return task_.empty() ? 1.0 : task_[k] * task_[k];
  }

 private:
  const RowMatrix* factors_;
  const Eigen::VectorXd* bias_;
  std::span<const double> task_;
};

struct SubmatrixResult {
  Eigen::MatrixXd matrix;
  double det = 1.0;
  Eigen::MatrixXd inverse;
  bool jittered = false;
};

/// Jitter added once to the diagonal of a numerically singular submatrix.
inline constexpr double kSubmatrixJitter = 1e-10;
/// Negative determinants down to this value are treated as PSD round-off.
inline constexpr double kDeterminantFloor = -1e-10;

/// Principal submatrix indexed by `items`, in the given order.
/// Throws InputError on an empty set, out-of-range or duplicate indices and
/// NumericalError when the entries overflow.
Eigen::MatrixXd build_submatrix(const FactorizedKernel& kernel,
                                std::span<const ItemIndex> items);

/// Determinant and inverse from one pivoted LU factorization.
///
/// When |det| < 1e-12 * max(1, trace / k)^k the matrix is treated as singular:
/// 1e-10 is added to the diagonal once and the factorization is redone.
/// Throws InputError on non-finite input and SingularKernelError if the
/// jittered matrix is still singular.
SubmatrixResult det_and_inverse(const Eigen::MatrixXd& matrix);

/// Determinant only, via pivoted LU; no jitter and no singularity error.
/// The 0x0 determinant is 1.
double determinant(const Eigen::MatrixXd& matrix);

/// det of the principal submatrix, with round-off negatives clamped to 0.
double submatrix_determinant(const FactorizedKernel& kernel,
                             std::span<const ItemIndex> items);

}  // namespace mtdpp
