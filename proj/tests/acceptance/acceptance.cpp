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
// Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion.
//
//   mtdpp_acceptance            run every criterion
//   mtdpp_acceptance --only N   run criterion N alone
//
// Criteria 6 and 7 need public datasets on disk:
//   MTDPP_AMAZON_DIAPER  basket-lines file of the Amazon baby-registry
//                        diaper category (one registry per line)
//   MTDPP_INSTACART      order_products__train.csv from the Instacart release

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "../support/synthetic.hpp"
#include "mtdpp/data.hpp"
#include "mtdpp/error.hpp"
#include "mtdpp/eval.hpp"
#include "mtdpp/gradients.hpp"
#include "mtdpp/kernel.hpp"
#include "mtdpp/trainer.hpp"

using namespace mtdpp;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
  Status status = Status::fail;
  std::string detail;
  std::string log;  ///< every computed number, for the determinism check
};

/// Appends numbers in hexadecimal floating point so logs compare bit for bit.
struct NumericLog {
  std::string text;
  void add(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a ", x);
    text += buf;
  }
  template <class Derived>
  void add(const Eigen::DenseBase<Derived>& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) add(m(i, j));
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

ItemCatalog weighted_catalog(Eigen::Index p, Rng& rng) {
  std::vector<std::string> tokens;
  Eigen::VectorXd weights(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    tokens.push_back(std::to_string(i));
    weights[i] = 0.5 + 1.5 * rng.uniform01();
  }
  ItemCatalog catalog(tokens);
  catalog.set_weights(weights);
  return catalog;
}

// 1. Analytic gradients against central differences of the oracle objective.
Outcome gradient_correctness(unsigned workers) {
  constexpr Eigen::Index p = 8, r = 3;
  constexpr double h = 1e-5, tolerance = 1e-4, budget = 10.0;
  const auto start = Clock::now();
  NumericLog log;
  double worst = 0.0;
  for (auto kind : {ModelKind::logistic, ModelKind::multitask, ModelKind::multitask_nobias}) {
    Rng rng(100 + static_cast<std::uint64_t>(kind));
    // Full baskets of 2 to 5 items: the context plus the target. The rank-r
    // no-bias kernel is singular on more than r context items.
    const std::size_t max_context = kind == ModelKind::multitask_nobias ? r : 4;
    for (int instance = 0; instance < 20; ++instance) {
      const auto model = oracle::random_model(kind, p, r, kDefaultScale, rng);
      const auto data = oracle::random_observations(p, 6, 1, max_context, rng);
      const auto catalog = weighted_catalog(p, rng);
      const double alpha0 = 0.5;
      GradientOptions options;
      options.alpha0 = alpha0;
      options.workers = workers;
      const auto g = gradient(model, data, catalog, options);
      const auto numeric = oracle::finite_difference(
          model,
          [&](const AnyModel& m) { return oracle::log_likelihood(m, data, catalog.weights(), alpha0); },
          h);
      std::vector<double> analytic(g.factors.data(), g.factors.data() + g.factors.size());
      analytic.insert(analytic.end(), g.bias.data(), g.bias.data() + g.bias.size());
      analytic.insert(analytic.end(), g.task_factors.data(),
                      g.task_factors.data() + g.task_factors.size());
      if (analytic.size() != numeric.size()) return {Status::fail, "gradient shape mismatch", {}};
      for (std::size_t j = 0; j < analytic.size(); ++j) {
        const double err =
            std::abs(analytic[j] - numeric[j]) / std::max(1.0, std::abs(analytic[j]));
        worst = std::max(worst, err);
        log.add(analytic[j]);
      }
    }
  }
  log.add(worst);
  const double elapsed = seconds_since(start);
  const bool ok = worst <= tolerance && elapsed < budget;
  return {ok ? Status::pass : Status::fail,
          format("60 instances, max relative error %.2e (<= %.0e), %.2f s (< %.0f s)", worst,
                 tolerance, elapsed, budget),
          log.text};
}

// 2. Pivoted-LU determinants against cofactor expansion.
Outcome determinant_oracle(unsigned) {
  constexpr double tolerance = 1e-10, budget = 5.0;
  const auto start = Clock::now();
  Rng rng(200);
  NumericLog log;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    constexpr Eigen::Index p = 10;
    const auto r = static_cast<Eigen::Index>(1 + rng.uniform_index(6));
    const auto k = static_cast<std::size_t>(1 + rng.uniform_index(6));
    RowMatrix v(p, r);
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = rng.normal(0.0, 1.0);
    Eigen::VectorXd d(p);
    for (Eigen::Index i = 0; i < p; ++i) d[i] = 0.1 + rng.uniform01();
    std::vector<ItemIndex> perm(p);
    for (Eigen::Index i = 0; i < p; ++i) perm[static_cast<std::size_t>(i)] = i;
    rng.shuffle(std::span<ItemIndex>(perm));
    const IndexSet items(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k));
    const auto matrix = build_submatrix(FactorizedKernel(v, d), items);
    const double det = det_and_inverse(matrix).det;
    const double reference = oracle::cofactor_det(matrix);
    worst = std::max(worst, std::abs(det - reference) / std::abs(reference));
    log.add(det);
  }
  log.add(worst);
  const double elapsed = seconds_since(start);
  const bool ok = worst <= tolerance && elapsed < budget;
  return {ok ? Status::pass : Status::fail,
          format("1000 PSD matrices (k <= 6), max relative error %.2e (<= %.0e), %.2f s (< %.0f s)",
                 worst, tolerance, elapsed, budget),
          log.text};
}

// 3. Unit task diagonals turn the multi-task model into the logistic one.
Outcome reduction_equivalence(unsigned workers) {
  constexpr double tolerance = 1e-10;
  constexpr Eigen::Index p = 8, r = 3;
  Rng rng(300);
  NumericLog log;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto lg =
        std::get<LogisticDppModel>(oracle::random_model(ModelKind::logistic, p, r, 0.05, rng));
    const MultiTaskDppModel mt(lg.factors(), lg.bias(), RowMatrix::Ones(p, r), lg.scale());
    const auto mt_data = oracle::random_observations(p, 1, 1, 4, rng);
    const auto& obs = mt_data.front();
    const std::vector<Observation> lg_data{{obs.items, std::nullopt, obs.label}};
    const auto catalog = weighted_catalog(p, rng);

    const double pa = success_probability_logistic(lg, obs.items);
    const double pb = success_probability_multitask(mt, *obs.target, obs.items);
    GradientOptions options;
    options.workers = workers;
    const auto a = grad_logistic(lg, lg_data, catalog, options);
    const auto b = grad_multitask(mt, mt_data, catalog, options);
    worst = std::max({worst, std::abs(pa - pb), (a.factors - b.factors).cwiseAbs().maxCoeff(),
                      (a.bias - b.bias).cwiseAbs().maxCoeff()});
    log.add(pb);
    log.add(b.factors);
    log.add(b.bias);
  }
  log.add(worst);
  const bool ok = worst <= tolerance;
  return {ok ? Status::pass : Status::fail,
          format("100 cases, max |difference| in probability, dV, dD %.2e (<= %.0e)", worst,
                 tolerance),
          log.text};
}

// 4. Perfect and uniform-random scorers.
Outcome metric_sanity(unsigned workers) {
  constexpr std::size_t p = 200, n = 2000;
  EvalOptions options;
  options.workers = workers;
  Rng rng(400);
  // Distinct two-item contexts let a scorer recover which case it serves.
  std::vector<EvaluationCase> cases;
  std::map<IndexSet, std::size_t> case_of;
  while (cases.size() < n) {
    std::vector<ItemIndex> perm(p);
    for (std::size_t i = 0; i < p; ++i) perm[i] = static_cast<ItemIndex>(i);
    rng.shuffle(std::span<ItemIndex>(perm));
    IndexSet context{perm[0], perm[1]};
    if (!case_of.emplace(context, cases.size()).second) continue;
    cases.push_back({std::move(context), perm[2]});
  }
  auto lookup = [&](std::span<const ItemIndex> context) {
    return case_of.at(IndexSet(context.begin(), context.end()));
  };

  const auto perfect = evaluate(
      [&](std::span<const ItemIndex> context) {
        std::vector<double> s(p, 0.0);
        s[static_cast<std::size_t>(cases[lookup(context)].held_out)] = 1.0;
        return s;
      },
      cases, options);
  const auto random = evaluate(
      [&](std::span<const ItemIndex> context) {
        Rng local(4000 + lookup(context));
        std::vector<double> s(p);
        for (auto& x : s) x = local.uniform01();
        return s;
      },
      cases, options);

  NumericLog log;
  log.add(perfect.mpr);
  log.add(random.mpr);
  for (double v : perfect.precision) log.add(v);
  for (double v : random.precision) log.add(v);
  bool ok = perfect.mpr == 100.0 && std::abs(random.mpr - 50.0) <= 2.0;
  for (double v : perfect.precision) ok = ok && v == 100.0;
  return {ok ? Status::pass : Status::fail,
          format("perfect MPR %.2f, Prec.@5/10/20 %.0f/%.0f/%.0f; random MPR %.2f (50 +- 2)",
                 perfect.mpr, perfect.precision[0], perfect.precision[1], perfect.precision[2],
                 random.mpr),
          log.text};
}

// 5. Recover a planted multi-task model from greedily generated baskets.
Outcome synthetic_recovery(unsigned workers) {
  constexpr double mpr_floor = 80.0, monotone_floor = 0.9, budget = 300.0;
  const auto start = Clock::now();
  Rng rng(500);
  const auto planted = synthetic::plant({}, rng);
  // Greedy over a random fifth of the catalog at each step. Argmax over the
  // whole catalog makes every basket a function of its first item; the
  // training data is then separable and the likelihood has no finite optimum.
  const auto dataset = synthetic::generate(planted, 5000, 3, 5, 20, rng);
  const auto data_split = split(dataset, 0.7, rng.next());
  const auto examples =
      make_examples(data_split, {ProtocolKind::random_holdout}, 1.0, rng.next());

  TrainConfig config;
  config.seed = rng.next();
  config.workers = workers;
  NumericLog log;
  std::optional<TrainResult> result;
  try {
    result = train(ModelKind::multitask, examples.train, data_split.catalog, config);
  } catch (const Error& e) {
    return {Status::fail, std::string("training failed: ") + e.what(), log.text};
  }
  EvalOptions options;
  options.workers = workers;
  const auto report = evaluate(
      [&](std::span<const ItemIndex> context) { return completion_scores(result->model, context); },
      examples.test, options);

  // The planted model, scored over the training catalog, bounds what any
  // learner can reach on these cases.
  const auto p = data_split.catalog.size();
  std::vector<ItemIndex> planted_index(static_cast<std::size_t>(p));
  for (Eigen::Index i = 0; i < p; ++i)
    planted_index[static_cast<std::size_t>(i)] =
        std::stoi(data_split.catalog.token(i).substr(4));
  const auto ceiling = evaluate(
      [&](std::span<const ItemIndex> context) {
        IndexSet mapped;
        for (ItemIndex i : context) mapped.push_back(planted_index[static_cast<std::size_t>(i)]);
        const auto s = completion_scores(AnyModel(planted), mapped);
        std::vector<double> out(static_cast<std::size_t>(p));
        for (Eigen::Index i = 0; i < p; ++i)
          out[static_cast<std::size_t>(i)] =
              s[static_cast<std::size_t>(planted_index[static_cast<std::size_t>(i)])];
        return out;
      },
      examples.test, options);

  const auto& trace = result->report.trace;
  std::size_t rising = 0;
  for (std::size_t e = 1; e < trace.size(); ++e) rising += trace[e] >= trace[e - 1];
  const double monotone =
      trace.size() > 1 ? static_cast<double>(rising) / static_cast<double>(trace.size() - 1) : 1.0;
  for (double ll : trace) log.add(ll);
  log.add(report.mpr);
  for (double v : report.precision) log.add(v);
  const double elapsed = seconds_since(start);
  const bool ok = report.mpr >= mpr_floor && monotone >= monotone_floor && elapsed < budget;
  return {ok ? Status::pass : Status::fail,
          format("MPR %.2f (>= %.0f; planted model %.2f), non-decreasing epochs %zu/%zu = %.2f "
                 "(>= %.1f), %zu epochs, %.1f s (< %.0f s)",
                 report.mpr, mpr_floor, ceiling.mpr, rising, trace.size() - 1, monotone,
                 monotone_floor, result->report.epochs_run, elapsed, budget),
          log.text};
}

std::optional<std::filesystem::path> dataset_from_env(const char* name) {
  const char* value = std::getenv(name);
  if (!value || !*value) return std::nullopt;
  std::filesystem::path path(value);
  if (!std::filesystem::exists(path)) return std::nullopt;
  return path;
}

MetricsReport train_and_evaluate(ModelKind kind, const DataSplit& data_split,
                                 ProtocolKind protocol, Eigen::Index rank, std::uint64_t seed,
                                 unsigned workers) {
  Rng rng(seed);
  const auto examples = make_examples(data_split, {protocol}, 1.0, rng.next());
  TrainConfig config;
  config.rank = rank;
  config.seed = rng.next();
  config.workers = workers;
  const auto result = train(kind, examples.train, data_split.catalog, config);
  EvalOptions options;
  options.workers = workers;
  return evaluate(
      [&](std::span<const ItemIndex> context) { return completion_scores(result.model, context); },
      examples.test, options);
}

// 6. Published Amazon diaper results, within 4 points.
Outcome amazon_diaper(unsigned workers) {
  const auto path = dataset_from_env("MTDPP_AMAZON_DIAPER");
  if (!path) return {Status::skip, "MTDPP_AMAZON_DIAPER not set or file missing", {}};
  const auto start = Clock::now();
  constexpr double slack = 4.0;
  auto dataset = filter_dataset(load_baskets(*path), {0, 2, std::numeric_limits<std::size_t>::max()});
  const auto data_split = split(dataset, 0.7, 600);
  const auto mt = train_and_evaluate(ModelKind::multitask, data_split,
                                     ProtocolKind::random_holdout, 50, 601, workers);
  const auto nobias = train_and_evaluate(ModelKind::multitask_nobias, data_split,
                                         ProtocolKind::random_holdout, 50, 602, workers);
  const auto logistic = train_and_evaluate(ModelKind::logistic, data_split,
                                           ProtocolKind::random_holdout, 50, 603, workers);
  const double targets[] = {78.41, 34.73, 47.42, 62.58};
  const double got[] = {mt.mpr, mt.precision[0], mt.precision[1], mt.precision[2]};
  bool ok = true;
  for (int i = 0; i < 4; ++i) ok = ok && std::abs(got[i] - targets[i]) <= slack;
  ok = ok && std::abs(nobias.mpr - 77.5) <= slack && std::abs(logistic.mpr - 71.08) <= slack;
  return {ok ? Status::pass : Status::fail,
          format("multitask MPR %.2f P@5 %.2f P@10 %.2f P@20 %.2f (targets 78.41/34.73/47.42/"
                 "62.58); no-bias MPR %.2f (77.5); logistic MPR %.2f (71.08); +-%.0f; %.0f s",
                 got[0], got[1], got[2], got[3], nobias.mpr, logistic.mpr, slack,
                 seconds_since(start)),
          {}};
}

// 7. Last-item training beats random-item training when testing on the last
// item, on a 5% subsample of Instacart.
Outcome instacart_direction(unsigned workers) {
  const auto path = dataset_from_env("MTDPP_INSTACART");
  if (!path) return {Status::skip, "MTDPP_INSTACART not set or file missing", {}};
  LoadOptions load;
  load.format = InputFormat::csv_transactions;
  load.csv_header = true;
  auto full = load_baskets(*path, load);
  Rng rng(700);
  BasketDataset sample;
  sample.ordered = full.ordered;
  for (auto& basket : full.baskets)
    if (rng.uniform01() < 0.05) sample.baskets.push_back(std::move(basket));
  sample = filter_dataset(std::move(sample), {15, 3, std::numeric_limits<std::size_t>::max()});
  const auto data_split = split(sample, 0.7, 701);
  const auto last = train_and_evaluate(ModelKind::multitask, data_split,
                                       ProtocolKind::last_item_holdout, 50, 702, workers);
  const auto mixed =
      train_and_evaluate(ModelKind::multitask, data_split, ProtocolKind::mixed, 50, 703, workers);
  const bool ok = last.mpr > mixed.mpr;
  return {ok ? Status::pass : Status::fail,
          format("%zu baskets; last-item MPR %.2f > mixed MPR %.2f", sample.baskets.size(),
                 last.mpr, mixed.mpr),
          {}};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome(unsigned)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "gradient correctness", gradient_correctness},
      {2, "determinant oracle", determinant_oracle},
      {3, "reduction equivalence", reduction_equivalence},
      {4, "metric sanity", metric_sanity},
      {5, "synthetic recovery", synthetic_recovery},
      {6, "amazon diaper reproduction", amazon_diaper},
      {7, "instacart protocol ordering", instacart_direction},
  };
  return all;
}

// 8. Criteria 1-5 again, with the same seeds, on one and on eight workers.
Outcome determinism(const std::vector<std::string>& first_logs) {
  std::string mismatches;
  for (unsigned workers : {1u, 8u}) {
    for (int id = 1; id <= 5; ++id) {
      const auto again = criteria()[static_cast<std::size_t>(id - 1)].run(workers);
      if (again.log != first_logs[static_cast<std::size_t>(id - 1)])
        mismatches += format(" %d(workers=%u)", id, workers);
    }
  }
  if (!mismatches.empty())
    return {Status::fail, "numeric logs differ for" + mismatches, {}};
  return {Status::pass, "criteria 1-5 bit-identical across a rerun and across 1 vs 8 workers", {}};
}

const char* label(Status s) {
  switch (s) {
    case Status::pass:
      return "PASS";
    case Status::fail:
      return "FAIL";
    case Status::skip:
      return "SKIP";
  }
  return "?";
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc == 3 && std::strcmp(argv[1], "--only") == 0) only = std::atoi(argv[2]);
  if (argc != 1 && only == 0) {
    std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
    return 2;
  }

  int failed = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("[%s] %d %s: %s\n", label(o.status), id, name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.status == Status::fail;
  };

  std::vector<std::string> logs;
  for (const auto& c : criteria()) {
    const bool needed_for_determinism = only == 8 && c.id <= 5;
    if (only != 0 && only != c.id && !needed_for_determinism) continue;
    Outcome o;
    try {
      o = c.run(1);
    } catch (const std::exception& e) {
      o = {Status::fail, std::string("error: ") + e.what(), {}};
    }
    if (c.id <= 5) logs.push_back(o.log);
    if (only == 0 || only == c.id) report(c.id, c.name, o);
  }
  if (only == 0 || only == 8) {
    Outcome o;
    try {
      o = determinism(logs);
    } catch (const std::exception& e) {
      o = {Status::fail, std::string("error: ") + e.what(), {}};
    }
    report(8, "determinism", o);
  }
  return failed == 0 ? 0 : 1;
}
