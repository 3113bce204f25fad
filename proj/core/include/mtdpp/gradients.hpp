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

#include <cstddef>
#include <span>

#include "mtdpp/catalog.hpp"
#include "mtdpp/model.hpp"
#include "mtdpp/types.hpp"

namespace mtdpp {

/// Gradient of a penalized log-likelihood; same shapes as the model
/// parameters. `task_factors` is 0x0 for the logistic model.
struct GradientSet {
  RowMatrix factors;
  Eigen::VectorXd bias;
  RowMatrix task_factors;
  /// Observations dropped because their submatrix stayed singular.
  std::size_t skipped = 0;
};

struct GradientOptions {
  double alpha0 = 1.0;
  /// Multiplier on the regularizer gradient. The trainer passes
  /// |minibatch| / M so that one epoch applies the penalty once.
  double regularizer_scale = 1.0;
  unsigned workers = 1;
};

/// Analytic gradient of the logistic-DPP objective over `minibatch`:
///   dV_ik = 2w sum_m c_m [L_m^-1 V_m]_(i,k) - s a0 a_i V_ik
///   dD_i  = 2w sum_m c_m [L_m^-1]_(i,i) D_i  - s a0 a_i D_i
/// with c_m = (y_m - sigma_m) / sigma_m * det L_m, sums over observations whose
/// scored set contains i, and s the regularizer scale.
GradientSet grad_logistic(const LogisticDppModel& model,
                          std::span<const Observation> minibatch,
                          const ItemCatalog& catalog,
                          const GradientOptions& options);

/// Analytic gradient of the multi-task objective. Each observation uses its
/// task kernel K_(t_m); dV picks up an extra R_(t_m,k)^2 and row t of dR
/// collects 2w c_m R_(t,k) V_k^T K_m^-1 V_k from observations with task t.
/// dD is zero when the model has no bias.
GradientSet grad_multitask(const MultiTaskDppModel& model,
                           std::span<const Observation> minibatch,
                           const ItemCatalog& catalog,
                           const GradientOptions& options);

GradientSet gradient(const AnyModel& model, std::span<const Observation> minibatch,
                     const ItemCatalog& catalog, const GradientOptions& options);

/// Largest |analytic - numeric| / max(1, |analytic|) per parameter block,
/// with central differences of step `h` on the penalized log-likelihood.
/// Blocks absent from the model report 0.
struct GradientCheck {
  double factors = 0.0;
  double bias = 0.0;
  double task_factors = 0.0;
  double max() const;
};

GradientCheck check_gradient(const AnyModel& model, std::span<const Observation> minibatch,
                             const ItemCatalog& catalog, double alpha0, double h = 1e-5);

}  // namespace mtdpp
