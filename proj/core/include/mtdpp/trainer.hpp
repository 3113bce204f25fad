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
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mtdpp/catalog.hpp"
#include "mtdpp/gradients.hpp"
#include "mtdpp/model.hpp"
#include "mtdpp/rng.hpp"

namespace mtdpp {

struct TrainConfig {
  Eigen::Index rank = 50;
  double alpha0 = 1.0;             ///< global regularization strength
  double step = 0.05;              ///< gradient step epsilon
  double momentum = 0.9;           ///< Nesterov coefficient beta, in [0, 1)
  std::size_t minibatch_size = 128;
  std::size_t max_epochs = 60;
  double convergence_tol = 1e-4;   ///< relative epoch-over-epoch improvement
  double scale = kDefaultScale;    ///< link scale w
  std::uint64_t seed = 1;
  double negative_ratio = 1.0;
  unsigned workers = 1;

  /// Throws ProtocolError naming the first out-of-range field.
  void validate() const;
};

struct TrainReport {
  std::size_t epochs_run = 0;
  double final_log_likelihood = 0.0;
  std::vector<double> trace;  ///< penalized log-likelihood after each epoch
  std::size_t skipped = 0;    ///< singular observations over all epochs
};

/// Draws a starting model: V ~ N(0, 0.1^2) row-major, then D ~ N(1, 0.1^2),
/// then R ~ N(1, 0.1^2) row-major. The no-bias kind draws no D and fixes it
/// at zero.
AnyModel initialize(ModelKind kind, Eigen::Index items, Eigen::Index rank,
                    const TrainConfig& config, Rng& rng);

/// alpha_i = mean_count / count_i, where count_i is the number of
/// observations whose items or target contain i and the mean runs over items
/// with a nonzero count. Unseen items get the largest observed weight.
Eigen::VectorXd regularization_weights(const ItemCatalog& catalog,
                                       std::span<const Observation> data);

/// Stochastic gradient ascent with Nesterov momentum. One accumulator per
/// parameter block; the gradient is taken at theta + beta * accumulator.
class NesterovAscent {
 public:
  NesterovAscent(AnyModel start, const TrainConfig& config);

  /// One update on `minibatch`. Returns the number of skipped observations.
  std::size_t step(std::span<const Observation> minibatch,
                   const ItemCatalog& catalog, double regularizer_scale);

  const AnyModel& model() const { return model_; }
  const GradientSet& accumulator() const { return accumulator_; }

 private:
  AnyModel model_;
  GradientSet accumulator_;
  TrainConfig config_;
};

struct TrainResult {
  AnyModel model;
  TrainReport report;
  ItemCatalog catalog;  ///< input catalog with the alpha_i used for training
};

using EpochObserver =
    std::function<void(std::size_t epoch, double log_likelihood, std::size_t skipped)>;

/// Full training loop: initialize, then repeated shuffled passes over the
/// data in consecutive minibatches until max_epochs or until the epoch-end
/// objective improves by less than convergence_tol (relative).
///
/// Throws NumericalError if every observation of an epoch is skipped.
TrainResult train(ModelKind kind, std::span<const Observation> data,
                  const ItemCatalog& catalog, const TrainConfig& config,
                  const EpochObserver& observer = {});

}  // namespace mtdpp
