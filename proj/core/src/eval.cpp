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
#include "mtdpp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "mtdpp/error.hpp"
#include "mtdpp/parallel.hpp"

namespace mtdpp {

namespace {

bool is_excluded(std::span<const ItemIndex> excluded, ItemIndex i) {
  return std::find(excluded.begin(), excluded.end(), i) != excluded.end();
}

void check_held_out(std::span<const double> scores, ItemIndex held_out) {
  if (held_out < 0 || held_out >= static_cast<ItemIndex>(scores.size()))
    throw InputError("held-out item " + std::to_string(held_out) +
                     " is outside the score vector");
}

}  // namespace

double percentile_rank(std::span<const double> scores, ItemIndex held_out,
                       std::span<const ItemIndex> excluded) {
  check_held_out(scores, held_out);
  const double target = scores[static_cast<std::size_t>(held_out)];
  std::size_t at_most = 0;
  std::size_t ranked = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (is_excluded(excluded, static_cast<ItemIndex>(i))) continue;
    ++ranked;
    if (target >= scores[i]) ++at_most;
  }
  return 100.0 * static_cast<double>(at_most) / static_cast<double>(ranked);
}

std::size_t rank_of(std::span<const double> scores, ItemIndex held_out,
                    std::span<const ItemIndex> excluded) {
  check_held_out(scores, held_out);
  const double target = scores[static_cast<std::size_t>(held_out)];
  std::size_t ahead = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto item = static_cast<ItemIndex>(i);
    if (item == held_out || is_excluded(excluded, item)) continue;
    if (scores[i] > target || (scores[i] == target && item < held_out)) ++ahead;
  }
  return ahead + 1;
}

MetricsReport evaluate(const Scorer& scorer, std::span<const EvaluationCase> cases,
                       const EvalOptions& options) {
  if (cases.empty()) throw InputError("no evaluation cases");

  struct CaseResult {
    double percentile;
    std::size_t rank;
    std::size_t items;
  };
  std::vector<CaseResult> results(cases.size());
  parallel_for(cases.size(), options.workers, [&](std::size_t c) {
    const auto& ec = cases[c];
    const std::vector<double> scores = scorer(ec.context);
    for (double s : scores)
      if (!std::isfinite(s))
        throw NumericalError("scorer returned a non-finite value for case " +
                             std::to_string(c));
    std::span<const ItemIndex> excluded;
    if (options.mask_context) excluded = ec.context;
    if (is_excluded(ec.context, ec.held_out))
      throw InputError("case " + std::to_string(c) + " holds out a context item");
    results[c] = {percentile_rank(scores, ec.held_out, excluded),
                  rank_of(scores, ec.held_out, excluded), scores.size()};
  });

  MetricsReport report;
  report.cases = cases.size();
  std::array<std::size_t, kPrecisionCutoffs.size()> hits{};
  double total = 0.0;
  for (std::size_t c = 0; c < results.size(); ++c) {
    if (results[c].items != results.front().items)
      throw NumericalError("scorer returned " + std::to_string(results[c].items) +
                           " scores for case " + std::to_string(c) + ", expected " +
                           std::to_string(results.front().items));
    total += results[c].percentile;
    for (std::size_t k = 0; k < kPrecisionCutoffs.size(); ++k)
      if (results[c].rank <= kPrecisionCutoffs[k]) ++hits[k];
  }
  const auto n = static_cast<double>(cases.size());
  report.mpr = total / n;
  for (std::size_t k = 0; k < kPrecisionCutoffs.size(); ++k)
    report.precision[k] = 100.0 * static_cast<double>(hits[k]) / n;
  return report;
}

std::string format_table(std::span<const std::pair<std::string, MetricsReport>> rows) {
  std::size_t width = 5;
  for (const auto& [name, _] : rows) width = std::max(width, name.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %8s %8s %8s %8s %8s\n", static_cast<int>(width),
                "model", "MPR", "Prec.@5", "Prec.@10", "Prec.@20", "cases");
  out += buf;
  for (const auto& [name, r] : rows) {
    std::snprintf(buf, sizeof buf, "%-*s %8.2f %8.2f %8.2f %8.2f %8zu\n",
                  static_cast<int>(width), name.c_str(), r.mpr, r.precision[0],
                  r.precision[1], r.precision[2], r.cases);
    out += buf;
  }
  return out;
}

}  // namespace mtdpp
