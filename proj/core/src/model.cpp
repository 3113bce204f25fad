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
#include "mtdpp/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mtdpp/error.hpp"
#include "mtdpp/parallel.hpp"

namespace mtdpp {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::logistic:
      return "logistic";
    case ModelKind::multitask:
      return "multitask";
    case ModelKind::multitask_nobias:
      return "multitask-nobias";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "logistic") return ModelKind::logistic;
  if (text == "multitask") return ModelKind::multitask;
  if (text == "multitask-nobias") return ModelKind::multitask_nobias;
  throw InputError("unknown model kind '" + std::string(text) +
                   "' (expected logistic, multitask or multitask-nobias)");
}

namespace {

void check_scale(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw InputError("model scale w must be positive and finite");
}

void check_shared(const RowMatrix& factors, const Eigen::VectorXd& bias) {
  if (factors.rows() < 1 || factors.cols() < 1)
    throw InputError("model needs at least one item and rank >= 1");
  if (bias.size() != factors.rows())
    throw InputError("bias length does not match item count");
  if (!factors.allFinite() || !bias.allFinite())
    throw NumericalError("model parameters are not finite");
}

}  // namespace

LogisticDppModel::LogisticDppModel(RowMatrix factors, Eigen::VectorXd bias,
                                   double scale)
    : factors_(std::move(factors)), bias_(std::move(bias)), scale_(scale) {
  check_shared(factors_, bias_);
  check_scale(scale_);
}

MultiTaskDppModel::MultiTaskDppModel(RowMatrix factors, Eigen::VectorXd bias,
                                     RowMatrix task_factors, double scale,
                                     bool bias_enabled)
    : factors_(std::move(factors)),
      bias_(std::move(bias)),
      task_factors_(std::move(task_factors)),
      scale_(scale),
      bias_enabled_(bias_enabled) {
  check_shared(factors_, bias_);
  check_scale(scale_);
  if (task_factors_.rows() != factors_.rows() ||
      task_factors_.cols() != factors_.cols())
    throw InputError("task factors must have the same shape as item factors");
  if (!task_factors_.allFinite())
    throw NumericalError("task factors are not finite");
  if (!bias_enabled_ && (bias_.array() != 0.0).any())
    throw InputError("a model without bias must have D identically zero");
}

FactorizedKernel MultiTaskDppModel::task_kernel(ItemIndex task) const {
  if (task < 0 || task >= items())
    throw InputError("task index " + std::to_string(task) + " out of range");
  std::span<const double> row(task_factors_.data() + task * rank(),
                              static_cast<std::size_t>(rank()));
  return {factors_, bias_, row};
}

ModelKind kind_of(const AnyModel& model) {
  if (const auto* mt = std::get_if<MultiTaskDppModel>(&model)) return mt->kind();
  return ModelKind::logistic;
}

Eigen::Index items_of(const AnyModel& model) {
  return std::visit([](const auto& m) { return m.items(); }, model);
}

double link(double scale, double det) {
  return -std::expm1(-scale * std::max(det, 0.0));
}

double success_probability_logistic(const LogisticDppModel& model,
                                    std::span<const ItemIndex> items) {
  return link(model.scale(), submatrix_determinant(model.kernel(), items));
}

double success_probability_multitask(const MultiTaskDppModel& model,
                                     ItemIndex target,
                                     std::span<const ItemIndex> items) {
  if (std::find(items.begin(), items.end(), target) != items.end())
    throw InputError("target " + std::to_string(target) +
                     " is part of the scored item set");
  return link(model.scale(),
              submatrix_determinant(model.task_kernel(target), items));
}

IndexSet scored_set(const Observation& obs) {
  IndexSet set = obs.items;
  if (obs.target) set.push_back(*obs.target);
  return set;
}

namespace {

double bernoulli_log_likelihood(double probability, bool label) {
  const double sigma =
      std::clamp(probability, kProbabilityClamp, 1.0 - kProbabilityClamp);
  return label ? std::log(sigma) : std::log1p(-sigma);
}

void check_weights(const ItemCatalog& catalog, Eigen::Index items) {
  if (catalog.size() != items)
    throw InputError("catalog has " + std::to_string(catalog.size()) +
                     " items but the model has " + std::to_string(items));
}

template <class Fn>
double sum_in_order(std::size_t n, unsigned workers, Fn&& term) {
  std::vector<double> terms(n);
  parallel_for(n, workers, [&](std::size_t m) { terms[m] = term(m); });
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

}  // namespace

double penalized_log_likelihood_logistic(const LogisticDppModel& model,
                                         std::span<const Observation> observations,
                                         const ItemCatalog& catalog,
                                         double alpha0, unsigned workers) {
  check_weights(catalog, model.items());
  const double data = sum_in_order(observations.size(), workers, [&](std::size_t m) {
    const auto& obs = observations[m];
    const IndexSet set = scored_set(obs);
    return bernoulli_log_likelihood(success_probability_logistic(model, set),
                                    obs.label);
  });
  const auto& alpha = catalog.weights();
  const Eigen::VectorXd norms =
      model.factors().rowwise().squaredNorm() +
      model.bias().array().square().matrix();
  return data - 0.5 * alpha0 * alpha.dot(norms);
}

double penalized_log_likelihood_multitask(const MultiTaskDppModel& model,
                                          std::span<const Observation> observations,
                                          const ItemCatalog& catalog,
                                          double alpha0, unsigned workers) {
  check_weights(catalog, model.items());
  const double data = sum_in_order(observations.size(), workers, [&](std::size_t m) {
    const auto& obs = observations[m];
    if (!obs.target)
      throw InputError("multi-task observation " + std::to_string(m) +
                       " has no target");
    return bernoulli_log_likelihood(
        success_probability_multitask(model, *obs.target, obs.items), obs.label);
  });
  const auto& alpha = catalog.weights();
  const Eigen::VectorXd norms =
      model.factors().rowwise().squaredNorm() +
      model.bias().array().square().matrix() +
      model.task_factors().rowwise().squaredNorm();
  return data - 0.5 * alpha0 * alpha.dot(norms);
}

double penalized_log_likelihood(const AnyModel& model,
                                std::span<const Observation> observations,
                                const ItemCatalog& catalog, double alpha0,
                                unsigned workers) {
  if (const auto* mt = std::get_if<MultiTaskDppModel>(&model))
    return penalized_log_likelihood_multitask(*mt, observations, catalog, alpha0,
                                              workers);
  return penalized_log_likelihood_logistic(std::get<LogisticDppModel>(model),
                                           observations, catalog, alpha0, workers);
}

std::vector<RankedTarget> rank_targets(const MultiTaskDppModel& model,
                                       std::span<const ItemIndex> basket,
                                       unsigned workers) {
  if (basket.empty()) throw InputError("basket is empty");
  const Eigen::Index p = model.items();
  IndexSet candidates;
  for (ItemIndex t = 0; t < p; ++t)
    if (std::find(basket.begin(), basket.end(), t) == basket.end())
      candidates.push_back(t);

  std::vector<RankedTarget> ranked(candidates.size());
  parallel_for(candidates.size(), workers, [&](std::size_t c) {
    const ItemIndex t = candidates[c];
    const double score =
        model.scale() * submatrix_determinant(model.task_kernel(t), basket);
    ranked[c] = {t, score, link(1.0, score)};
  });
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedTarget& a, const RankedTarget& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.item < b.item;
                   });
  return ranked;
}

std::vector<ItemIndex> greedy_complete(const LogisticDppModel& model,
                                       std::span<const ItemIndex> basket,
                                       std::size_t count) {
  const auto p = static_cast<std::size_t>(model.items());
  if (basket.size() > p || count > p - basket.size())
    throw InputError("cannot add " + std::to_string(count) + " items to a basket of " +
                     std::to_string(basket.size()) + " over " + std::to_string(p) +
                     " items");
  IndexSet current(basket.begin(), basket.end());
  std::vector<ItemIndex> picks;
  const auto kernel = model.kernel();
  for (std::size_t n = 0; n < count; ++n) {
    ItemIndex best = -1;
    double best_det = -1.0;
    current.push_back(0);
    for (ItemIndex j = 0; j < model.items(); ++j) {
      if (std::find(current.begin(), current.end() - 1, j) != current.end() - 1)
        continue;
      current.back() = j;
      const double det = submatrix_determinant(kernel, current);
      if (det > best_det) {
        best_det = det;
        best = j;
      }
    }
    current.back() = best;
    picks.push_back(best);
  }
  return picks;
}

std::vector<double> completion_scores(const AnyModel& model,
                                      std::span<const ItemIndex> context) {
  const Eigen::Index p = items_of(model);
  std::vector<double> scores(static_cast<std::size_t>(p));
  if (const auto* mt = std::get_if<MultiTaskDppModel>(&model)) {
    for (ItemIndex t = 0; t < p; ++t)
      scores[t] = mt->scale() * submatrix_determinant(mt->task_kernel(t), context);
    return scores;
  }
  const auto& lg = std::get<LogisticDppModel>(model);
  const auto kernel = lg.kernel();
  IndexSet set(context.begin(), context.end());
  const double context_det =
      set.empty() ? 1.0 : submatrix_determinant(kernel, set);
  set.push_back(0);
  for (ItemIndex j = 0; j < p; ++j) {
    if (std::find(context.begin(), context.end(), j) != context.end()) {
      scores[j] = lg.scale() * context_det;
      continue;
    }
    set.back() = j;
    scores[j] = lg.scale() * submatrix_determinant(kernel, set);
  }
  return scores;
}

}  // namespace mtdpp
