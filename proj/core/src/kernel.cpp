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
#include "mtdpp/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mtdpp/error.hpp"

namespace mtdpp {

FactorizedKernel::FactorizedKernel(const RowMatrix& factors,
                                   const Eigen::VectorXd& bias)
    : factors_(&factors), bias_(&bias) {
  if (factors.rows() < 1 || factors.cols() < 1)
    throw InputError("kernel factors must be at least 1x1");
  if (bias.size() != factors.rows())
    throw InputError("kernel bias length " + std::to_string(bias.size()) +
                     " does not match " + std::to_string(factors.rows()) +
                     " items");
}

FactorizedKernel::FactorizedKernel(const RowMatrix& factors,
                                   const Eigen::VectorXd& bias,
                                   std::span<const double> task_diagonal)
    : FactorizedKernel(factors, bias) {
  if (static_cast<Eigen::Index>(task_diagonal.size()) != factors.cols())
    throw InputError("task diagonal length does not match kernel rank");
  task_ = task_diagonal;
}

namespace {

void check_items(const FactorizedKernel& kernel,
                 std::span<const ItemIndex> items) {
  if (items.empty()) throw InputError("item set is empty");
  for (ItemIndex i : items) {
    if (i < 0 || i >= kernel.items())
      throw InputError("item index " + std::to_string(i) +
                       " out of range [0, " + std::to_string(kernel.items()) +
                       ")");
  }
  IndexSet sorted(items.begin(), items.end());
  std::sort(sorted.begin(), sorted.end());
  auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end())
    throw InputError("duplicate item index " + std::to_string(*dup));
}

bool is_singular(double det, double trace, Eigen::Index k) {
  // (trace / k)^k bounds the determinant of a PSD matrix.
  const double scale =
      std::pow(std::max(1.0, trace / static_cast<double>(k)), static_cast<double>(k));
  return !(std::abs(det) >= 1e-12 * scale);
}

}  // namespace

Eigen::MatrixXd build_submatrix(const FactorizedKernel& kernel,
                                std::span<const ItemIndex> items) {
  check_items(kernel, items);
  const auto k = static_cast<Eigen::Index>(items.size());
  const Eigen::Index r = kernel.rank();
  const RowMatrix& v = kernel.factors();

  // Rows of V restricted to the set, columns scaled by R_k^2.
  RowMatrix rows(k, r);
  RowMatrix weighted(k, r);
  for (Eigen::Index s = 0; s < k; ++s) {
    rows.row(s) = v.row(items[s]);
    for (Eigen::Index j = 0; j < r; ++j)
      weighted(s, j) = rows(s, j) * kernel.component_weight(j);
  }
  Eigen::MatrixXd out = weighted * rows.transpose();
  for (Eigen::Index s = 0; s < k; ++s) {
    const double d = kernel.bias()[items[s]];
    out(s, s) += d * d;
  }
  // Exact symmetry regardless of summation order in the product.
  for (Eigen::Index s = 0; s < k; ++s)
    for (Eigen::Index t = s + 1; t < k; ++t) out(t, s) = out(s, t);
  // Factors are finite by construction, so anything else is overflow.
  if (!out.allFinite()) throw NumericalError("kernel entries overflow");
  return out;
}

SubmatrixResult det_and_inverse(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols())
    throw InputError("det_and_inverse needs a square matrix");
  if (!matrix.allFinite())
    throw InputError("submatrix has non-finite entries");

  SubmatrixResult result;
  result.matrix = matrix;
  const Eigen::Index k = matrix.rows();
  if (k == 0) return result;

  const double trace = matrix.trace();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(matrix);
  result.det = lu.determinant();
  if (is_singular(result.det, trace, k)) {
    Eigen::MatrixXd jittered = matrix;
    jittered.diagonal().array() += kSubmatrixJitter;
    lu.compute(jittered);
    result.det = lu.determinant();
    result.jittered = true;
    if (is_singular(result.det, jittered.trace(), k))
      throw SingularKernelError("submatrix of size " + std::to_string(k) +
                                " is singular after jitter (det = " +
                                std::to_string(result.det) + ")");
  }
  result.inverse = lu.inverse();
  if (!result.inverse.allFinite())
    throw SingularKernelError("submatrix inverse is not finite");
  return result;
}

double determinant(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols())
    throw InputError("determinant needs a square matrix");
  if (matrix.rows() == 0) return 1.0;
  if (!matrix.allFinite())
    throw InputError("submatrix has non-finite entries");
  return Eigen::PartialPivLU<Eigen::MatrixXd>(matrix).determinant();
}

double submatrix_determinant(const FactorizedKernel& kernel,
                             std::span<const ItemIndex> items) {
  return std::max(0.0, determinant(build_submatrix(kernel, items)));
}

}  // namespace mtdpp
