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
#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "mtdpp/error.hpp"
#include "mtdpp/eval.hpp"
#include "mtdpp/gradients.hpp"
#include "mtdpp/serialize.hpp"

namespace mtdpp::cli {

using nlohmann::json;

namespace {

template <class... Args>
void log(const RunConfig& c, const char* format, Args... args) {
  if (c.quiet) return;
  std::fprintf(stderr, format, args...);
  std::fputc('\n', stderr);
}

void emit(const RunConfig& c, const json& result) {
  const std::string text = result.dump(2) + "\n";
  if (c.out.empty()) {
    std::cout << text << std::flush;
    return;
  }
  const std::filesystem::path path(c.out);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out.flush()) throw InputError("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

ModelKind model_kind(const RunConfig& c) {
  try {
    return parse_model_kind(c.model);
  } catch (const InputError& e) {
    throw ProtocolError(e.what());
  }
}

json metrics_json(const MetricsReport& r) {
  json j{{"mpr", r.mpr}, {"cases", r.cases}};
  for (std::size_t k = 0; k < kPrecisionCutoffs.size(); ++k)
    j["precision@" + std::to_string(kPrecisionCutoffs[k])] = r.precision[k];
  return j;
}

json summary_json(const DatasetSummary& s) {
  return {{"baskets", s.baskets}, {"items", s.items}, {"mean_basket_size", s.mean_basket_size}};
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

IndexSet basket_indices(const std::string& text, const ItemCatalog& catalog) {
  IndexSet basket;
  std::vector<std::string> unknown;
  std::size_t start = 0;
  for (;;) {
    const auto end = text.find(',', start);
    const auto token = trim(text.substr(start, end == std::string::npos ? end : end - start));
    if (!token.empty()) {
      if (auto index = catalog.find(token)) {
        if (std::find(basket.begin(), basket.end(), *index) == basket.end())
          basket.push_back(*index);
      } else {
        unknown.push_back(token);
      }
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& t : unknown) list += (list.empty() ? "" : ", ") + t;
    throw InputError("unknown item(s) in basket: " + list);
  }
  if (basket.empty()) throw InputError("--basket names no items");
  return basket;
}

}  // namespace

int cmd_summary(const RunConfig& c) {
  if (c.data.empty()) throw InputError("--data is required");
  const auto dataset = filter_dataset(load_baskets(c.data, load_options(c)), filter_options(c));
  auto j = summary_json(summarize(dataset));
  j["ordered"] = dataset.ordered;
  emit(c, j);
  return 0;
}

int cmd_train(const RunConfig& c) {
  if (c.model_files.size() != 1) throw ProtocolError("train writes exactly one --model-file");
  const ModelKind kind = model_kind(c);
  c.train.validate();
  const auto prepared = prepare(c);

  TrainConfig tc = c.train;
  tc.seed = seed_plan(c.train.seed).train;
  tc.workers = resolve_workers(c.train.workers);
  log(c, "training %s on %zu observations over %lld items (rank %lld)",
      std::string(to_string(kind)).c_str(), prepared.examples.train.size(),
      static_cast<long long>(prepared.split.catalog.size()), static_cast<long long>(tc.rank));

  const auto result = train(kind, prepared.examples.train, prepared.split.catalog, tc,
                            [&](std::size_t epoch, double ll, std::size_t skipped) {
                              log(c, "epoch %zu log-likelihood %.6f skipped %zu", epoch, ll,
                                  skipped);
                            });
  save_model(c.model_files.front(), result.model, result.catalog);
  log(c, "wrote %s", c.model_files.front().c_str());

  emit(c, {{"command", "train"},
           {"model", to_string(kind)},
           {"model_file", c.model_files.front()},
           {"dataset", summary_json(prepared.summary)},
           {"train_baskets", prepared.split.train.baskets.size()},
           {"test_baskets", prepared.split.test.baskets.size()},
           {"observations", prepared.examples.train.size()},
           {"items", prepared.split.catalog.size()},
           {"epochs_run", result.report.epochs_run},
           {"final_log_likelihood", result.report.final_log_likelihood},
           {"trace", result.report.trace},
           {"skipped", result.report.skipped}});
  return 0;
}

int cmd_eval(const RunConfig& c) {
  const auto prepared = prepare(c);
  EvalOptions options;
  options.mask_context = c.mask_context;
  options.workers = resolve_workers(c.train.workers);

  json results = json::array();
  std::vector<std::pair<std::string, MetricsReport>> rows;
  for (const auto& file : c.model_files) {
    const auto loaded = load_model(file);
    if (loaded.catalog.tokens() != prepared.split.catalog.tokens())
      throw ProtocolError("model '" + file +
                          "' was trained on a different item catalog; use the data, "
                          "filter and seed settings it was trained with");
    const AnyModel& model = loaded.model;
    const auto report = evaluate(
        [&](std::span<const ItemIndex> context) { return completion_scores(model, context); },
        prepared.examples.test, options);
    auto j = metrics_json(report);
    j["model_file"] = file;
    j["model"] = to_string(kind_of(model));
    results.push_back(j);
    rows.emplace_back(std::string(to_string(kind_of(model))), report);
  }
  if (!c.quiet) std::cerr << format_table(rows);
  emit(c, {{"command", "eval"},
           {"protocol", to_string(parse_protocol(c.protocol))},
           {"mask_context", c.mask_context},
           {"results", results}});
  return 0;
}

int cmd_complete(const RunConfig& c) {
  const auto loaded = load_model(c.model_files.front());
  const IndexSet basket = basket_indices(c.basket, loaded.catalog);
  json completions = json::array();

  if (const auto* mt = std::get_if<MultiTaskDppModel>(&loaded.model)) {
    const auto ranked = rank_targets(*mt, basket, resolve_workers(c.train.workers));
    for (std::size_t k = 0; k < std::min(c.count, ranked.size()); ++k)
      completions.push_back({{"item", loaded.catalog.token(ranked[k].item)},
                             {"score", ranked[k].score},
                             {"probability", ranked[k].probability}});
  } else {
    const auto& lg = std::get<LogisticDppModel>(loaded.model);
    IndexSet current = basket;
    for (ItemIndex item : greedy_complete(lg, basket, c.count)) {
      current.push_back(item);
      completions.push_back({{"item", loaded.catalog.token(item)},
                             {"probability", success_probability_logistic(lg, current)}});
    }
  }

  std::vector<std::string> tokens;
  for (ItemIndex i : basket) tokens.push_back(loaded.catalog.token(i));
  emit(c, {{"command", "complete"},
           {"model", to_string(kind_of(loaded.model))},
           {"basket", tokens},
           {"completions", completions}});
  return 0;
}

namespace {

// Random instance: V ~ N(0, 0.5^2), D ~ U(0.5, 1.5), R ~ N(1, 0.3^2), and
// four observations with alternating labels over baskets of 2 to 5 items.
// The no-bias kernel has rank r, so its baskets stop at r items.
struct Instance {
  AnyModel model;
  ItemCatalog catalog;
  std::vector<Observation> observations;
};

Instance random_instance(ModelKind kind, Eigen::Index p, Eigen::Index r, double w, Rng& rng) {
  RowMatrix v(p, r);
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = rng.normal(0.0, 0.5);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(p);
  if (kind != ModelKind::multitask_nobias)
    for (Eigen::Index i = 0; i < p; ++i) d[i] = 0.5 + rng.uniform01();
  Instance out{LogisticDppModel(v, d, w), {}, {}};
  if (kind != ModelKind::logistic) {
    RowMatrix t(p, r);
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = rng.normal(1.0, 0.3);
    out.model = MultiTaskDppModel(v, d, t, w, kind == ModelKind::multitask);
  }

  std::vector<std::string> tokens;
  Eigen::VectorXd weights(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    tokens.push_back(std::to_string(i));
    weights[i] = 0.5 + 1.5 * rng.uniform01();
  }
  out.catalog = ItemCatalog(tokens);
  out.catalog.set_weights(weights);

  auto largest = std::min<Eigen::Index>(5, p - 1);
  if (kind == ModelKind::multitask_nobias) largest = std::min(largest, r);
  if (largest < 2) throw ProtocolError("gradient check needs more items and rank");
  std::vector<ItemIndex> order(static_cast<std::size_t>(p));
  for (int m = 0; m < 4; ++m) {
    for (Eigen::Index i = 0; i < p; ++i) order[static_cast<std::size_t>(i)] = i;
    rng.shuffle(std::span<ItemIndex>(order));
    const auto size = 2 + static_cast<Eigen::Index>(
                              rng.uniform_index(static_cast<std::uint64_t>(largest - 1)));
    IndexSet items(order.begin(), order.begin() + size);
    out.observations.push_back({items, order[static_cast<std::size_t>(size)], m % 2 == 0});
  }
  return out;
}

}  // namespace

int cmd_gradcheck(const RunConfig& c, const CLI::App& app) {
  std::vector<ModelKind> kinds{ModelKind::logistic, ModelKind::multitask};
  if (app.count("--model") > 0) kinds = {model_kind(c)};
  const Eigen::Index r = app.count("--rank") > 0 ? c.train.rank : 3;
  const double w = c.train.scale;
  if (c.items < 3 || r < 1) throw ProtocolError("gradient check needs --items >= 3, --rank >= 1");

  Rng rng(c.train.seed);
  double worst = 0.0;
  json per_kind = json::object();
  for (ModelKind kind : kinds) {
    json errors = json::array();
    for (std::size_t n = 0; n < c.instances; ++n) {
      const auto inst = random_instance(kind, c.items, r, w, rng);
      const auto check = check_gradient(inst.model, inst.observations, inst.catalog,
                                        c.train.alpha0);
      log(c, "%s instance %zu: V %.3e  D %.3e  R %.3e", std::string(to_string(kind)).c_str(),
          n, check.factors, check.bias, check.task_factors);
      errors.push_back({{"V", check.factors}, {"D", check.bias}, {"R", check.task_factors}});
      worst = std::max(worst, check.max());
    }
    per_kind[std::string(to_string(kind))] = errors;
  }
  const bool pass = worst <= c.tolerance;
  log(c, "max relative error %.3e (tolerance %.1e): %s", worst, c.tolerance,
      pass ? "PASS" : "FAIL");
  emit(c, {{"command", "gradcheck"},
           {"items", c.items},
           {"rank", r},
           {"max_relative_error", worst},
           {"tolerance", c.tolerance},
           {"pass", pass},
           {"instances", per_kind}});
  return pass ? 0 : 4;
}

}  // namespace mtdpp::cli
