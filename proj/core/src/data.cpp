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
#include "mtdpp/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "mtdpp/error.hpp"
#include "mtdpp/rng.hpp"

namespace mtdpp {

InputFormat parse_input_format(std::string_view text) {
  if (text == "basket-lines") return InputFormat::basket_lines;
  if (text == "csv-transactions") return InputFormat::csv_transactions;
  throw InputError("unknown input format '" + std::string(text) +
                   "' (expected basket-lines or csv-transactions)");
}

ProtocolKind parse_protocol(std::string_view text) {
  if (text == "random" || text == "random-holdout") return ProtocolKind::random_holdout;
  if (text == "last-item" || text == "last-item-holdout")
    return ProtocolKind::last_item_holdout;
  if (text == "mixed") return ProtocolKind::mixed;
  throw ProtocolError("unknown protocol '" + std::string(text) +
                      "' (expected random, last-item or mixed)");
}

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::random_holdout:
      return "random";
    case ProtocolKind::last_item_holdout:
      return "last-item";
    case ProtocolKind::mixed:
      return "mixed";
  }
  return "unknown";
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  if (delimiter == ' ') {
    std::size_t pos = 0;
    while (pos < line.size()) {
      pos = line.find_first_not_of(" \t", pos);
      if (pos == std::string_view::npos) break;
      const auto end = std::min(line.size(), line.find_first_of(" \t", pos));
      fields.push_back(line.substr(pos, end - pos));
      pos = end;
    }
    return fields;
  }
  std::size_t start = 0;
  for (;;) {
    const auto end = line.find(delimiter, start);
    fields.push_back(trim(line.substr(start, end - start)));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return fields;
}

BasketDataset parse_basket_lines(std::istream& in, const LoadOptions& options) {
  BasketDataset ds;
  ds.ordered = options.assume_ordered;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_fields(line, options.delimiter);
    if (fields.empty()) throw ParseError("empty basket", number);
    std::vector<std::string> basket;
    basket.reserve(fields.size());
    for (auto f : fields) {
      if (f.empty()) throw ParseError("empty item token", number);
      basket.emplace_back(f);
    }
    ds.baskets.push_back(std::move(basket));
  }
  if (ds.baskets.empty()) throw ParseError("file contains no baskets", 0);
  return ds;
}

BasketDataset parse_csv_transactions(std::istream& in, const LoadOptions& options) {
  struct Row {
    std::string item;
    long long position;
    std::size_t line;
  };
  std::vector<std::string> ids;
  std::unordered_map<std::string, std::size_t> id_index;
  std::vector<std::vector<Row>> grouped;
  std::optional<bool> positioned;

  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (number == 1 && options.csv_header) continue;
    const auto fields = split_fields(line, ',');
    if (fields.size() < 2) throw ParseError("expected basket_id,item[,position]", number);
    if (fields[0].empty()) throw ParseError("empty basket id", number);
    if (fields[1].empty()) throw ParseError("empty item token", number);
    const bool has_position = fields.size() >= 3;
    if (positioned && *positioned != has_position)
      throw ParseError("position column present on some rows only", number);
    positioned = has_position;

    long long position = 0;
    if (has_position) {
      const auto f = fields[2];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), position);
      if (ec != std::errc() || ptr != f.data() + f.size())
        throw ParseError("position '" + std::string(f) + "' is not an integer", number);
    }
    std::string id(fields[0]);
    auto [it, inserted] = id_index.emplace(id, grouped.size());
    if (inserted) grouped.emplace_back();
    auto& rows = grouped[it->second];
    if (has_position) {
      for (const auto& r : rows)
        if (r.position == position)
          throw ParseError("duplicate position " + std::to_string(position) +
                               " in basket '" + id + "'",
                           number);
    }
    rows.push_back({std::string(fields[1]), position, number});
  }
  if (grouped.empty()) throw ParseError("file contains no transactions", 0);

  BasketDataset ds;
  ds.ordered = positioned.value_or(false);
  ds.baskets.reserve(grouped.size());
  for (auto& rows : grouped) {
    if (ds.ordered)
      std::stable_sort(rows.begin(), rows.end(),
                       [](const Row& a, const Row& b) { return a.position < b.position; });
    std::vector<std::string> basket;
    basket.reserve(rows.size());
    for (auto& r : rows) basket.push_back(std::move(r.item));
    ds.baskets.push_back(std::move(basket));
  }
  return ds;
}

void dedup_in_place(std::vector<std::string>& basket) {
  std::unordered_set<std::string_view> seen;
  std::vector<std::string> out;
  out.reserve(basket.size());
  for (auto& token : basket)
    if (seen.insert(token).second) out.push_back(token);
  basket = std::move(out);
}

}  // namespace

BasketDataset parse_baskets(std::istream& in, const LoadOptions& options) {
  return options.format == InputFormat::basket_lines
             ? parse_basket_lines(in, options)
             : parse_csv_transactions(in, options);
}

BasketDataset load_baskets(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset file '" + path.string() + "'");
  return parse_baskets(in, options);
}

BasketDataset filter_dataset(BasketDataset dataset, const FilterOptions& options) {
  for (auto& basket : dataset.baskets) dedup_in_place(basket);

  for (bool changed = true; changed;) {
    changed = false;
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& basket : dataset.baskets)
      for (const auto& token : basket) ++counts[token];

    for (auto& basket : dataset.baskets) {
      const auto before = basket.size();
      std::erase_if(basket, [&](const std::string& token) {
        return counts[token] < options.min_item_count;
      });
      changed = changed || basket.size() != before;
    }
    const auto before = dataset.baskets.size();
    std::erase_if(dataset.baskets, [&](const std::vector<std::string>& basket) {
      return basket.size() < options.min_basket_size ||
             basket.size() > options.max_basket_size;
    });
    changed = changed || dataset.baskets.size() != before;
  }
  if (dataset.baskets.empty()) throw InputError("filtering removed every basket");
  return dataset;
}

DatasetSummary summarize(const BasketDataset& dataset) {
  DatasetSummary s;
  s.baskets = dataset.baskets.size();
  std::unordered_set<std::string_view> items;
  std::size_t total = 0;
  for (const auto& basket : dataset.baskets) {
    total += basket.size();
    for (const auto& token : basket) items.insert(token);
  }
  s.items = items.size();
  s.mean_basket_size =
      s.baskets ? static_cast<double>(total) / static_cast<double>(s.baskets) : 0.0;
  return s;
}

DataSplit split(const BasketDataset& dataset, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw InputError("train fraction must be in (0, 1)");
  const std::size_t n = dataset.baskets.size();
  const auto n_train =
      static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n)
    throw InputError("split of " + std::to_string(n) +
                     " baskets leaves an empty train or test set");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  DataSplit out;
  out.train.ordered = out.test.ordered = dataset.ordered;
  for (std::size_t j = 0; j < n_train; ++j) {
    auto basket = dataset.baskets[order[j]];
    dedup_in_place(basket);
    for (const auto& token : basket) out.catalog.add(token);
    out.train.baskets.push_back(std::move(basket));
  }
  std::vector<std::size_t> counts(static_cast<std::size_t>(out.catalog.size()), 0);
  for (const auto& basket : out.train.baskets)
    for (const auto& token : basket) ++counts[static_cast<std::size_t>(*out.catalog.find(token))];
  out.catalog.set_counts(std::move(counts));

  for (std::size_t j = n_train; j < n; ++j) {
    auto basket = dataset.baskets[order[j]];
    dedup_in_place(basket);
    std::erase_if(basket, [&](const std::string& t) { return !out.catalog.find(t); });
    if (basket.size() >= 2) out.test.baskets.push_back(std::move(basket));
  }
  return out;
}

namespace {

std::size_t holdout_position(const std::vector<std::string>& basket, HoldoutRule rule,
                             Rng& rng) {
  return rule == HoldoutRule::last_item
             ? basket.size() - 1
             : static_cast<std::size_t>(rng.uniform_index(basket.size()));
}

IndexSet to_indices(const ItemCatalog& catalog, const std::vector<std::string>& basket) {
  IndexSet out;
  out.reserve(basket.size());
  for (const auto& token : basket) {
    auto index = catalog.find(token);
    if (!index) throw InputError("item '" + token + "' is not in the catalog");
    out.push_back(*index);
  }
  return out;
}

}  // namespace

ExampleSet make_examples(const DataSplit& split, ProtocolSpec protocol,
                         double negative_ratio, std::uint64_t seed) {
  if (!(negative_ratio >= 0.0)) throw InputError("negative ratio must be >= 0");
  const bool needs_order = protocol.train_rule() == HoldoutRule::last_item ||
                           protocol.test_rule() == HoldoutRule::last_item;
  if (needs_order && !split.train.ordered)
    throw ProtocolError("protocol '" + std::string(to_string(protocol.kind)) +
                        "' needs ordered baskets, but the dataset is unordered");

  const auto& catalog = split.catalog;
  const auto p = static_cast<std::uint64_t>(catalog.size());
  const auto negatives = static_cast<std::size_t>(std::floor(negative_ratio));
  Rng rng(seed);
  ExampleSet out;
  out.train.reserve(split.train.baskets.size() * (1 + negatives));

  for (std::size_t b = 0; b < split.train.baskets.size(); ++b) {
    const auto& basket = split.train.baskets[b];
    if (basket.size() < 2)
      throw InputError("training basket " + std::to_string(b) +
                       " has fewer than two items");
    IndexSet items = to_indices(catalog, basket);
    const auto pos = holdout_position(basket, protocol.train_rule(), rng);
    const ItemIndex target = items[pos];
    IndexSet full = items;
    std::sort(full.begin(), full.end());
    items.erase(items.begin() + static_cast<std::ptrdiff_t>(pos));

    out.train.push_back({items, target, true});
    if (full.size() >= p) continue;
    for (std::size_t n = 0; n < negatives; ++n) {
      ItemIndex negative;
      do {
        negative = static_cast<ItemIndex>(rng.uniform_index(p));
      } while (std::binary_search(full.begin(), full.end(), negative));
      out.train.push_back({items, negative, false});
    }
  }

  out.test.reserve(split.test.baskets.size());
  for (std::size_t b = 0; b < split.test.baskets.size(); ++b) {
    const auto& basket = split.test.baskets[b];
    if (basket.size() < 2)
      throw InputError("test basket " + std::to_string(b) + " has fewer than two items");
    IndexSet items = to_indices(catalog, basket);
    const auto pos = holdout_position(basket, protocol.test_rule(), rng);
    const ItemIndex held_out = items[pos];
    items.erase(items.begin() + static_cast<std::ptrdiff_t>(pos));
    out.test.push_back({std::move(items), held_out});
  }
  return out;
}

}  // namespace mtdpp
