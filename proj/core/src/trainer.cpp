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
#include "mtdpp/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mtdpp/error.hpp"

namespace mtdpp {

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw ProtocolError(what); };
  if (rank < 1) fail("rank must be >= 1");
  if (!(alpha0 >= 0.0) || !std::isfinite(alpha0)) fail("alpha0 must be >= 0");
  if (!(step >= 0.0) || !std::isfinite(step)) fail("step must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) fail("momentum must be in [0, 1)");
  if (minibatch_size < 1) fail("minibatch size must be >= 1");
  if (max_epochs < 1) fail("max epochs must be >= 1");
  if (!(convergence_tol >= 0.0)) fail("convergence tolerance must be >= 0");
  if (!(scale > 0.0) || !std::isfinite(scale)) fail("scale w must be > 0");
  if (!(negative_ratio > 0.0)) fail("negative ratio must be > 0");
  if (workers < 1) fail("workers must be >= 1");
}

AnyModel initialize(ModelKind kind, Eigen::Index items, Eigen::Index rank,
                    const TrainConfig& config, Rng& rng) {
  if (items < 1 || rank < 1) throw InputError("initialize needs p >= 1 and r >= 1");
  constexpr double kInitStddev = 0.1;  // variance 0.01

  RowMatrix v(items, rank);
  for (Eigen::Index i = 0; i < items; ++i)
    for (Eigen::Index k = 0; k < rank; ++k) v(i, k) = rng.normal(0.0, kInitStddev);

  Eigen::VectorXd d = Eigen::VectorXd::Zero(items);
  if (kind != ModelKind::multitask_nobias)
    for (Eigen::Index i = 0; i < items; ++i) d[i] = rng.normal(1.0, kInitStddev);

  if (kind == ModelKind::logistic)
    return LogisticDppModel(std::move(v), std::move(d), config.scale);

  RowMatrix r(items, rank);
  for (Eigen::Index i = 0; i < items; ++i)
    for (Eigen::Index k = 0; k < rank; ++k) r(i, k) = rng.normal(1.0, kInitStddev);
  return MultiTaskDppModel(std::move(v), std::move(d), std::move(r), config.scale,
                           kind == ModelKind::multitask);
}

Eigen::VectorXd regularization_weights(const ItemCatalog& catalog,
                                       std::span<const Observation> data) {
  if (data.empty()) throw InputError("regularization weights need training data");
  const Eigen::Index p = catalog.size();
  std::vector<std::size_t> counts(static_cast<std::size_t>(p), 0);
  IndexSet seen;
  for (const auto& obs : data) {
    seen = scored_set(obs);
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (ItemIndex i : seen) {
      if (i < 0 || i >= p)
        throw InputError("observation item " + std::to_string(i) +
                         " is outside the catalog");
      ++counts[static_cast<std::size_t>(i)];
    }
  }
  double total = 0.0;
  std::size_t observed = 0;
  for (auto c : counts)
    if (c > 0) {
      total += static_cast<double>(c);
      ++observed;
    }
  const double mean = total / static_cast<double>(observed);

  Eigen::VectorXd alpha(p);
  double largest = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) {
    const auto c = counts[static_cast<std::size_t>(i)];
    alpha[i] = c > 0 ? mean / static_cast<double>(c) : 0.0;
    largest = std::max(largest, alpha[i]);
  }
  for (Eigen::Index i = 0; i < p; ++i)
    if (counts[static_cast<std::size_t>(i)] == 0) alpha[i] = largest;
  return alpha;
}

namespace {

GradientSet zeros_like(const AnyModel& model) {
  return std::visit(
      [](const auto& m) {
        GradientSet g;
        g.factors = RowMatrix::Zero(m.items(), m.rank());
        g.bias = Eigen::VectorXd::Zero(m.items());
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, MultiTaskDppModel>)
          g.task_factors = RowMatrix::Zero(m.items(), m.rank());
        return g;
      },
      model);
}

// theta + coeff * delta, keeping the model kind.
AnyModel shifted(const AnyModel& model, const GradientSet& delta, double coeff) {
  if (const auto* mt = std::get_if<MultiTaskDppModel>(&model)) {
    return MultiTaskDppModel(mt->factors() + coeff * delta.factors,
                             mt->bias() + coeff * delta.bias,
                             mt->task_factors() + coeff * delta.task_factors,
                             mt->scale(), mt->bias_enabled());
  }
  const auto& lg = std::get<LogisticDppModel>(model);
  return LogisticDppModel(lg.factors() + coeff * delta.factors,
                          lg.bias() + coeff * delta.bias, lg.scale());
}

}  // namespace

NesterovAscent::NesterovAscent(AnyModel start, const TrainConfig& config)
    : model_(std::move(start)), accumulator_(zeros_like(model_)), config_(config) {
  config_.validate();
}

std::size_t NesterovAscent::step(std::span<const Observation> minibatch,
                                 const ItemCatalog& catalog,
                                 double regularizer_scale) {
  const double beta = config_.momentum;
  const AnyModel lookahead = shifted(model_, accumulator_, beta);
  const GradientSet g =
      gradient(lookahead, minibatch, catalog,
               {config_.alpha0, regularizer_scale, config_.workers});

  const double gain = (1.0 - beta) * config_.step;
  accumulator_.factors = beta * accumulator_.factors + gain * g.factors;
  accumulator_.bias = beta * accumulator_.bias + gain * g.bias;
  if (accumulator_.task_factors.size() > 0)
    accumulator_.task_factors = beta * accumulator_.task_factors + gain * g.task_factors;
  model_ = shifted(model_, accumulator_, 1.0);
  return g.skipped;
}

TrainResult train(ModelKind kind, std::span<const Observation> data,
                  const ItemCatalog& catalog, const TrainConfig& config,
                  const EpochObserver& observer) {
  config.validate();
  if (data.empty()) throw InputError("training data is empty");

  ItemCatalog weighted = catalog;
  weighted.set_weights(regularization_weights(catalog, data));

  Rng rng(config.seed);
  NesterovAscent optimizer(initialize(kind, catalog.size(), config.rank, config, rng),
                           config);

  const std::size_t total = data.size();
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Observation> batch;
  batch.reserve(config.minibatch_size);

  TrainReport report;
  double previous = penalized_log_likelihood(optimizer.model(), data, weighted,
                                             config.alpha0, config.workers);
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    std::size_t skipped = 0;
    for (std::size_t begin = 0; begin < total; begin += config.minibatch_size) {
      const std::size_t end = std::min(total, begin + config.minibatch_size);
      batch.clear();
      for (std::size_t m = begin; m < end; ++m) batch.push_back(data[order[m]]);
      skipped += optimizer.step(batch, weighted,
                                static_cast<double>(end - begin) /
                                    static_cast<double>(total));
    }
    if (skipped == total)
      throw NumericalError("every observation was skipped in epoch " +
                           std::to_string(epoch));

    const double current = penalized_log_likelihood(optimizer.model(), data, weighted,
                                                    config.alpha0, config.workers);
    if (!std::isfinite(current))
      throw NumericalError("log-likelihood diverged in epoch " + std::to_string(epoch));
    report.trace.push_back(current);
    report.skipped += skipped;
    report.epochs_run = epoch;
    if (observer) observer(epoch, current, skipped);

    const double improvement = current - previous;
    const double threshold = config.convergence_tol * std::abs(previous);
    previous = current;
    if (improvement < threshold) break;
  }
  report.final_log_likelihood = previous;
  return {optimizer.model(), std::move(report), std::move(weighted)};
}

}  // namespace mtdpp
