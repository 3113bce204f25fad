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

// Microbenchmarks for the hot paths: submatrix solves, minibatch gradients
// and completion scoring.

#include <benchmark/benchmark.h>

#include <vector>

#include "mtdpp/gradients.hpp"
#include "mtdpp/kernel.hpp"
#include "mtdpp/model.hpp"
#include "mtdpp/rng.hpp"

namespace {

using namespace mtdpp;

RowMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, double mean, double sd, Rng& rng) {
  RowMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal(mean, sd);
  return m;
}

Eigen::VectorXd random_bias(Eigen::Index p, Rng& rng) {
  Eigen::VectorXd d(p);
  for (Eigen::Index i = 0; i < p; ++i) d[i] = 1.0 + rng.uniform01();
  return d;
}

IndexSet first_items(std::size_t k) {
  IndexSet items(k);
  for (std::size_t i = 0; i < k; ++i) items[i] = static_cast<ItemIndex>(3 * i);
  return items;
}

void BM_DetAndInverse(benchmark::State& state) {
  Rng rng(1);
  const auto k = static_cast<std::size_t>(state.range(0));
  const FactorizedKernel kernel(random_matrix(100, 50, 0.0, 0.1, rng), random_bias(100, rng));
  const auto matrix = build_submatrix(kernel, first_items(k));
  for (auto _ : state) benchmark::DoNotOptimize(det_and_inverse(matrix));
}
BENCHMARK(BM_DetAndInverse)->Arg(2)->Arg(5)->Arg(10)->Arg(20);

std::vector<Observation> minibatch(Eigen::Index p, std::size_t size, Rng& rng) {
  std::vector<Observation> out;
  for (std::size_t m = 0; m < size; ++m) {
    Observation obs;
    const auto k = 2 + rng.uniform_index(4);
    while (obs.items.size() < k) {
      const auto i = static_cast<ItemIndex>(rng.uniform_index(static_cast<std::uint64_t>(p)));
      if (std::find(obs.items.begin(), obs.items.end(), i) == obs.items.end())
        obs.items.push_back(i);
    }
    ItemIndex target;
    do {
      target = static_cast<ItemIndex>(rng.uniform_index(static_cast<std::uint64_t>(p)));
    } while (std::find(obs.items.begin(), obs.items.end(), target) != obs.items.end());
    obs.target = target;
    obs.label = m % 2 == 0;
    out.push_back(std::move(obs));
  }
  return out;
}

ItemCatalog catalog(Eigen::Index p) {
  std::vector<std::string> tokens;
  for (Eigen::Index i = 0; i < p; ++i) tokens.push_back(std::to_string(i));
  return ItemCatalog(tokens);
}

void BM_MultitaskGradient(benchmark::State& state) {
  Rng rng(2);
  constexpr Eigen::Index p = 100, r = 50;
  const MultiTaskDppModel model(random_matrix(p, r, 0.0, 0.1, rng), random_bias(p, rng),
                                random_matrix(p, r, 1.0, 0.1, rng), kDefaultScale);
  const auto data = minibatch(p, 128, rng);
  const auto cat = catalog(p);
  GradientOptions options;
  options.workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(grad_multitask(model, data, cat, options));
}
BENCHMARK(BM_MultitaskGradient)->Arg(1)->Arg(4)->UseRealTime();

void BM_CompletionScores(benchmark::State& state) {
  Rng rng(3);
  const Eigen::Index p = state.range(0);
  const AnyModel model = MultiTaskDppModel(random_matrix(p, 50, 0.0, 0.1, rng),
                                           random_bias(p, rng),
                                           random_matrix(p, 50, 1.0, 0.1, rng), kDefaultScale);
  const IndexSet context = first_items(4);
  for (auto _ : state) benchmark::DoNotOptimize(completion_scores(model, context));
}
BENCHMARK(BM_CompletionScores)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
