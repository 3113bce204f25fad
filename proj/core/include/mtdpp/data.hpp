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
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "mtdpp/catalog.hpp"
#include "mtdpp/eval.hpp"
#include "mtdpp/model.hpp"

namespace mtdpp {

/// Baskets as item-token sequences. When `ordered` is set, each sequence is
/// in the order the items were added.
struct BasketDataset {
  std::vector<std::vector<std::string>> baskets;
  bool ordered = false;
};

enum class InputFormat {
  basket_lines,      // one basket per line, items separated by a delimiter
  csv_transactions,  // rows of basket_id,item[,position], extra columns ignored
};

InputFormat parse_input_format(std::string_view text);

struct LoadOptions {
  InputFormat format = InputFormat::basket_lines;
  /// Item separator for basket lines; ' ' splits on any run of whitespace.
  char delimiter = ',';
  /// Skip the first row of a CSV file.
  bool csv_header = false;
  /// Treat basket lines as ordered by addition time.
  bool assume_ordered = false;
};

/// Throws InputError if the file cannot be opened, ParseError (with a line
/// number) on malformed content.
BasketDataset load_baskets(const std::filesystem::path& path,
                           const LoadOptions& options = {});
BasketDataset parse_baskets(std::istream& in, const LoadOptions& options = {});

struct FilterOptions {
  std::size_t min_item_count = 0;
  std::size_t min_basket_size = 1;
  std::size_t max_basket_size = std::numeric_limits<std::size_t>::max();
};

/// Deduplicates items within baskets (first occurrence wins), then removes
/// items seen in fewer than min_item_count baskets and baskets outside the
/// size bounds, repeating until nothing changes.
BasketDataset filter_dataset(BasketDataset dataset, const FilterOptions& options);

struct DatasetSummary {
  std::size_t baskets = 0;
  std::size_t items = 0;
  double mean_basket_size = 0.0;
};

DatasetSummary summarize(const BasketDataset& dataset);

struct DataSplit {
  BasketDataset train;
  BasketDataset test;
  /// Built from the training baskets only; counts are basket frequencies.
  ItemCatalog catalog;
};

/// Seeded uniform permutation; the first ceil(fraction * N) baskets train.
/// Test items missing from the training catalog are dropped, and test
/// baskets left with fewer than two items are discarded.
DataSplit split(const BasketDataset& dataset, double train_fraction,
                std::uint64_t seed);

enum class HoldoutRule { random_item, last_item };

enum class ProtocolKind {
  random_holdout,     // random item held out in train and test
  last_item_holdout,  // last added item held out in train and test
  mixed,              // random item in train, last added item in test
};

struct ProtocolSpec {
  ProtocolKind kind = ProtocolKind::random_holdout;

  HoldoutRule train_rule() const {
    return kind == ProtocolKind::last_item_holdout ? HoldoutRule::last_item
                                                   : HoldoutRule::random_item;
  }
  HoldoutRule test_rule() const {
    return kind == ProtocolKind::random_holdout ? HoldoutRule::random_item
                                                : HoldoutRule::last_item;
  }
};

/// Accepts "random", "last-item", "mixed".
ProtocolKind parse_protocol(std::string_view text);
std::string_view to_string(ProtocolKind kind);

struct ExampleSet {
  std::vector<Observation> train;
  std::vector<EvaluationCase> test;
};

/// One positive per training basket (remaining items, held-out target, y = 1)
/// followed by floor(negative_ratio) negatives whose targets are drawn
/// uniformly from items outside the original basket. Test baskets become
/// evaluation cases.
///
/// Throws ProtocolError if a last-item rule is requested on unordered data
/// and InputError if a basket has fewer than two items.
ExampleSet make_examples(const DataSplit& split, ProtocolSpec protocol,
                         double negative_ratio, std::uint64_t seed);

}  // namespace mtdpp
