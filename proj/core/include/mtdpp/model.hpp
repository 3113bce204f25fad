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
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "mtdpp/catalog.hpp"
#include "mtdpp/kernel.hpp"
#include "mtdpp/types.hpp"

namespace mtdpp {

enum class ModelKind { logistic, multitask, multitask_nobias };

std::string_view to_string(ModelKind kind);
/// Accepts "logistic", "multitask", "multitask-nobias".
ModelKind parse_model_kind(std::string_view text);

inline constexpr double kDefaultScale = 0.01;
/// Success probabilities are clamped to [kProbabilityClamp, 1 - kProbabilityClamp]
/// before logs and before the (y - sigma) / sigma gradient factor.
inline constexpr double kProbabilityClamp = 1e-12;

/// One labelled training example.
///
/// The multi-task model scores `items` for task `target`. The logistic model
/// scores the set items + {target} (or just items when there is no target).
struct Observation {
  IndexSet items;
  std::optional<ItemIndex> target;
  bool label = false;
};

/// phi(I) = 1 - exp(-w det L_I) with L = V V^T + D^2.
class LogisticDppModel {
 public:
  LogisticDppModel(RowMatrix factors, Eigen::VectorXd bias, double scale);

  const RowMatrix& factors() const { return factors_; }
  const Eigen::VectorXd& bias() const { return bias_; }
  double scale() const { return scale_; }
  Eigen::Index items() const { return factors_.rows(); }
  Eigen::Index rank() const { return factors_.cols(); }

  FactorizedKernel kernel() const { return {factors_, bias_}; }

 private:
  RowMatrix factors_;
  Eigen::VectorXd bias_;
  double scale_;
};

/// P(y_t = 1 | I) = 1 - exp(-w det K_{t,I}) with K_t = V diag(R_t)^2 V^T + D^2.
///
/// Row t of `task_factors` holds the diagonal of R_t. With the bias disabled,
/// D is identically zero.
class MultiTaskDppModel {
 public:
  MultiTaskDppModel(RowMatrix factors, Eigen::VectorXd bias,
                    RowMatrix task_factors, double scale,
                    bool bias_enabled = true);

  const RowMatrix& factors() const { return factors_; }
  const Eigen::VectorXd& bias() const { return bias_; }
  const RowMatrix& task_factors() const { return task_factors_; }
  double scale() const { return scale_; }
  bool bias_enabled() const { return bias_enabled_; }
  Eigen::Index items() const { return factors_.rows(); }
  Eigen::Index rank() const { return factors_.cols(); }
  ModelKind kind() const {
    return bias_enabled_ ? ModelKind::multitask : ModelKind::multitask_nobias;
  }

  FactorizedKernel task_kernel(ItemIndex task) const;

 private:
  RowMatrix factors_;
  Eigen::VectorXd bias_;
  RowMatrix task_factors_;
  double scale_;
  bool bias_enabled_;
};

using AnyModel = std::variant<LogisticDppModel, MultiTaskDppModel>;

ModelKind kind_of(const AnyModel& model);
Eigen::Index items_of(const AnyModel& model);

/// 1 - exp(-w max(det, 0)).
double link(double scale, double det);

double success_probability_logistic(const LogisticDppModel& model,
                                    std::span<const ItemIndex> items);

/// Throws InputError when target is one of `items`.
double success_probability_multitask(const MultiTaskDppModel& model,
                                     ItemIndex target,
                                     std::span<const ItemIndex> items);

/// The set a logistic model scores for an observation: items + {target}.
IndexSet scored_set(const Observation& obs);

/// Sum of Bernoulli log-likelihoods minus (alpha0/2) sum_i alpha_i (|V_i|^2 + D_i^2).
double penalized_log_likelihood_logistic(const LogisticDppModel& model,
                                         std::span<const Observation> observations,
                                         const ItemCatalog& catalog,
                                         double alpha0, unsigned workers = 1);

/// As the logistic version, with the task kernel per observation and |R^i|^2
/// added to the regularizer.
double penalized_log_likelihood_multitask(const MultiTaskDppModel& model,
                                          std::span<const Observation> observations,
                                          const ItemCatalog& catalog,
                                          double alpha0, unsigned workers = 1);

double penalized_log_likelihood(const AnyModel& model,
                                std::span<const Observation> observations,
                                const ItemCatalog& catalog, double alpha0,
                                unsigned workers = 1);

struct RankedTarget {
  ItemIndex item;
  double score;        ///< w * det, the ranking key
  double probability;  ///< link applied to the score
};

/// All targets not in `basket`, best first; ties go to the smaller index.
std::vector<RankedTarget> rank_targets(const MultiTaskDppModel& model,
                                       std::span<const ItemIndex> basket,
                                       unsigned workers = 1);

/// Greedily appends the item that maximizes phi(current + {j}).
std::vector<ItemIndex> greedy_complete(const LogisticDppModel& model,
                                       std::span<const ItemIndex> basket,
                                       std::size_t count);

/// Length-p ranking scores (w * det) for completing `context`.
///
/// Multi-task: score_t = w det K_{t,context}. Logistic: score_j =
/// w det L_{context + {j}}. Items already in the context get the same formula
/// evaluated as a set, so the vector is defined for every item.
std::vector<double> completion_scores(const AnyModel& model,
                                      std::span<const ItemIndex> context);

}  // namespace mtdpp
