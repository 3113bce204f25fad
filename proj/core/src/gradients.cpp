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
#include "mtdpp/gradients.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "mtdpp/error.hpp"
#include "mtdpp/kernel.hpp"
#include "mtdpp/parallel.hpp"

namespace mtdpp {

namespace {

// Data-term contribution of one observation, restricted to the rows it touches.
struct Contribution {
  IndexSet rows;
  RowMatrix factors;          // |rows| x r
  Eigen::VectorXd bias;       // |rows|
  Eigen::RowVectorXd task;    // r, multi-task only
  ItemIndex target = -1;
  bool skipped = false;
};

Contribution observation_gradient(const FactorizedKernel& kernel,
                                  IndexSet rows, bool label, double scale,
                                  std::span<const double> task_row,
                                  bool want_bias) {
  Contribution out;
  out.rows = std::move(rows);
  SubmatrixResult sub;
  try {
    sub = det_and_inverse(build_submatrix(kernel, out.rows));
  } catch (const SingularKernelError&) {
    out.skipped = true;
    return out;
  }
  const double det = std::max(sub.det, 0.0);
  const double sigma =
      std::clamp(link(scale, det), kProbabilityClamp, 1.0 - kProbabilityClamp);
  const double y = label ? 1.0 : 0.0;
  const double c = 2.0 * scale * (y - sigma) / sigma * det;

  const auto k = static_cast<Eigen::Index>(out.rows.size());
  const Eigen::Index r = kernel.rank();
  RowMatrix local(k, r);
  for (Eigen::Index s = 0; s < k; ++s) local.row(s) = kernel.factors().row(out.rows[s]);
  // [K^-1 V_m](i, k) = sum_s [K^-1]_(s,i) V_(s,k), K^-1 symmetric.
  const RowMatrix solved = sub.inverse * local;

  out.factors.resize(k, r);
  for (Eigen::Index j = 0; j < r; ++j)
    out.factors.col(j) = (c * kernel.component_weight(j)) * solved.col(j);

  out.bias = Eigen::VectorXd::Zero(k);
  if (want_bias) {
    for (Eigen::Index s = 0; s < k; ++s)
      out.bias[s] = c * sub.inverse(s, s) * kernel.bias()[out.rows[s]];
  }

  if (!task_row.empty()) {
    out.task.resize(r);
    for (Eigen::Index j = 0; j < r; ++j)
      out.task[j] = c * task_row[j] * local.col(j).dot(solved.col(j));
  }
  return out;
}

GradientSet accumulate(const std::vector<Contribution>& parts, Eigen::Index p,
                       Eigen::Index r, bool multitask) {
  GradientSet g;
  g.factors = RowMatrix::Zero(p, r);
  g.bias = Eigen::VectorXd::Zero(p);
  if (multitask) g.task_factors = RowMatrix::Zero(p, r);
  for (const auto& part : parts) {
    if (part.skipped) {
      ++g.skipped;
      continue;
    }
    for (std::size_t s = 0; s < part.rows.size(); ++s) {
      const ItemIndex i = part.rows[s];
      g.factors.row(i) += part.factors.row(static_cast<Eigen::Index>(s));
      g.bias[i] += part.bias[static_cast<Eigen::Index>(s)];
    }
    if (multitask) g.task_factors.row(part.target) += part.task;
  }
  return g;
}

void check_catalog(const ItemCatalog& catalog, Eigen::Index p) {
  if (catalog.size() != p)
    throw InputError("catalog has " + std::to_string(catalog.size()) +
                     " items but the model has " + std::to_string(p));
}

}  // namespace

GradientSet grad_logistic(const LogisticDppModel& model,
                          std::span<const Observation> minibatch,
                          const ItemCatalog& catalog,
                          const GradientOptions& options) {
  const Eigen::Index p = model.items();
  check_catalog(catalog, p);
  const auto kernel = model.kernel();
  std::vector<Contribution> parts(minibatch.size());
  parallel_for(minibatch.size(), options.workers, [&](std::size_t m) {
    const auto& obs = minibatch[m];
    parts[m] = observation_gradient(kernel, scored_set(obs), obs.label,
                                    model.scale(), {}, true);
  });
  GradientSet g = accumulate(parts, p, model.rank(), false);

  const double reg = options.regularizer_scale * options.alpha0;
  const auto& alpha = catalog.weights();
  for (Eigen::Index i = 0; i < p; ++i) {
    g.factors.row(i) -= (reg * alpha[i]) * model.factors().row(i);
    g.bias[i] -= reg * alpha[i] * model.bias()[i];
  }
  return g;
}

GradientSet grad_multitask(const MultiTaskDppModel& model,
                           std::span<const Observation> minibatch,
                           const ItemCatalog& catalog,
                           const GradientOptions& options) {
  const Eigen::Index p = model.items();
  const Eigen::Index r = model.rank();
  check_catalog(catalog, p);
  std::vector<Contribution> parts(minibatch.size());
  parallel_for(minibatch.size(), options.workers, [&](std::size_t m) {
    const auto& obs = minibatch[m];
    if (!obs.target)
      throw InputError("multi-task observation " + std::to_string(m) +
                       " has no target");
    const ItemIndex t = *obs.target;
    if (std::find(obs.items.begin(), obs.items.end(), t) != obs.items.end())
      throw InputError("observation " + std::to_string(m) +
                       " lists its target among its items");
    std::span<const double> task_row(model.task_factors().data() + t * r,
                                     static_cast<std::size_t>(r));
    parts[m] = observation_gradient(model.task_kernel(t), obs.items, obs.label,
                                    model.scale(), task_row,
                                    model.bias_enabled());
    parts[m].target = t;
  });
  GradientSet g = accumulate(parts, p, r, true);

  const double reg = options.regularizer_scale * options.alpha0;
  const auto& alpha = catalog.weights();
  for (Eigen::Index i = 0; i < p; ++i) {
    g.factors.row(i) -= (reg * alpha[i]) * model.factors().row(i);
    g.task_factors.row(i) -= (reg * alpha[i]) * model.task_factors().row(i);
    g.bias[i] -= reg * alpha[i] * model.bias()[i];
  }
  if (!model.bias_enabled()) g.bias.setZero();
  return g;
}

GradientSet gradient(const AnyModel& model, std::span<const Observation> minibatch,
                     const ItemCatalog& catalog, const GradientOptions& options) {
  if (const auto* mt = std::get_if<MultiTaskDppModel>(&model))
    return grad_multitask(*mt, minibatch, catalog, options);
  return grad_logistic(std::get<LogisticDppModel>(model), minibatch, catalog,
                       options);
}

double GradientCheck::max() const { return std::max({factors, bias, task_factors}); }

namespace {

struct Parameters {
  RowMatrix factors;
  Eigen::VectorXd bias;
  RowMatrix task_factors;
};

Parameters parameters_of(const AnyModel& model) {
  return std::visit(
      [](const auto& m) {
        Parameters out{m.factors(), m.bias(), {}};
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, MultiTaskDppModel>)
          out.task_factors = m.task_factors();
        return out;
      },
      model);
}

AnyModel rebuild(const AnyModel& like, const Parameters& q) {
  if (const auto* mt = std::get_if<MultiTaskDppModel>(&like))
    return MultiTaskDppModel(q.factors, q.bias, q.task_factors, mt->scale(),
                             mt->bias_enabled());
  return LogisticDppModel(q.factors, q.bias, std::get<LogisticDppModel>(like).scale());
}

template <class Block>
double block_error(const AnyModel& model, Parameters& q, Block Parameters::*member,
                   const Block& analytic, std::span<const Observation> minibatch,
                   const ItemCatalog& catalog, double alpha0, double h) {
  double worst = 0.0;
  Block& block = q.*member;
  for (Eigen::Index j = 0; j < block.size(); ++j) {
    const double saved = block.data()[j];
    block.data()[j] = saved + h;
    const double up = penalized_log_likelihood(rebuild(model, q), minibatch, catalog, alpha0);
    block.data()[j] = saved - h;
    const double down = penalized_log_likelihood(rebuild(model, q), minibatch, catalog, alpha0);
    block.data()[j] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic.data()[j];
    worst = std::max(worst, std::abs(a - numeric) / std::max(1.0, std::abs(a)));
  }
  return worst;
}

}  // namespace

GradientCheck check_gradient(const AnyModel& model, std::span<const Observation> minibatch,
                             const ItemCatalog& catalog, double alpha0, double h) {
  GradientOptions options;
  options.alpha0 = alpha0;
  const GradientSet g = gradient(model, minibatch, catalog, options);
  Parameters q = parameters_of(model);
  GradientCheck out;
  out.factors = block_error(model, q, &Parameters::factors, g.factors, minibatch, catalog,
                            alpha0, h);
  const auto* mt = std::get_if<MultiTaskDppModel>(&model);
  if (!mt || mt->bias_enabled())
    out.bias = block_error(model, q, &Parameters::bias, g.bias, minibatch, catalog, alpha0, h);
  if (mt)
    out.task_factors = block_error(model, q, &Parameters::task_factors, g.task_factors,
                                   minibatch, catalog, alpha0, h);
  return out;
}

}  // namespace mtdpp
