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
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mtdpp/data.hpp"
#include "mtdpp/trainer.hpp"

namespace mtdpp::cli {

/// Every setting of every subcommand. A config file holds the same keys as
/// the long flags, one `key = value` per line.
struct RunConfig {
  // Dataset.
  std::string data;
  std::string format = "basket-lines";
  std::string delimiter = ",";
  bool csv_header = false;
  bool ordered = false;
  std::size_t min_item_count = 0;
  std::size_t min_basket_size = 2;  // one item is held out of every basket
  std::size_t max_basket_size = std::numeric_limits<std::size_t>::max();
  double train_fraction = 0.7;
  std::string protocol = "random";

  // Model and training.
  std::string model = "multitask";
  TrainConfig train;

  // Artifacts.
  std::vector<std::string> model_files{"model.mtdpp"};
  std::string out;

  bool mask_context = false;

  // Completion.
  std::string basket;
  std::size_t count = 5;

  // Gradient self-check.
  Eigen::Index items = 8;
  std::size_t instances = 5;
  double tolerance = 1e-4;

  bool quiet = false;
};

void add_options(CLI::App& app, RunConfig& config);

LoadOptions load_options(const RunConfig& config);
FilterOptions filter_options(const RunConfig& config);

/// Reads, filters, splits and converts the dataset exactly as `train` does,
/// so that `eval` sees the same test cases for the same config.
struct PreparedData {
  DatasetSummary summary;
  DataSplit split;
  ExampleSet examples;
};

PreparedData prepare(const RunConfig& config);

/// Seeds for the split, the examples and the trainer, all drawn from the
/// single configured seed.
struct SeedPlan {
  std::uint64_t split, examples, train;
};

SeedPlan seed_plan(std::uint64_t seed);

unsigned resolve_workers(unsigned requested);

}  // namespace mtdpp::cli
