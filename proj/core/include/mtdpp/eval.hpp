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

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mtdpp/types.hpp"

namespace mtdpp {

/// A test basket with one item held out.
struct EvaluationCase {
  IndexSet context;
  ItemIndex held_out = -1;
};

inline constexpr std::array<std::size_t, 3> kPrecisionCutoffs = {5, 10, 20};

/// All values are percentages.
struct MetricsReport {
  double mpr = 0.0;
  std::array<double, kPrecisionCutoffs.size()> precision{};  // @5, @10, @20
  std::size_t cases = 0;
};

/// 100 * #{i : scores[i] <= scores[held_out]} / p, counting every item
/// (including the held-out one) except those listed in `excluded`.
double percentile_rank(std::span<const double> scores, ItemIndex held_out,
                       std::span<const ItemIndex> excluded = {});

/// 1-based rank of `held_out` by descending score; equal scores are ordered
/// by ascending index. Items in `excluded` are not ranked.
std::size_t rank_of(std::span<const double> scores, ItemIndex held_out,
                    std::span<const ItemIndex> excluded = {});

/// Maps a basket context to one score per catalog item (higher is better).
using Scorer = std::function<std::vector<double>(std::span<const ItemIndex>)>;

struct EvalOptions {
  bool mask_context = false;  ///< drop context items from the ranking
  unsigned workers = 1;
};

/// Mean percentile rank and precision@{5,10,20} over `cases`.
/// Throws InputError on no cases and NumericalError when the scorer returns
/// a non-finite value or a vector of inconsistent length.
MetricsReport evaluate(const Scorer& scorer, std::span<const EvaluationCase> cases,
                       const EvalOptions& options = {});

/// Fixed-width table with columns MPR, Prec.@5, Prec.@10, Prec.@20.
std::string format_table(std::span<const std::pair<std::string, MetricsReport>> rows);

}  // namespace mtdpp
