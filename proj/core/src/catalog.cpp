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
#include "mtdpp/catalog.hpp"

#include <string>

#include "mtdpp/error.hpp"

namespace mtdpp {

ItemCatalog::ItemCatalog(std::vector<std::string> tokens) {
  for (const auto& t : tokens) {
    if (t.empty()) throw InputError("catalog token is empty");
    if (find(t)) throw InputError("duplicate catalog token '" + t + "'");
    add(t);
  }
}

ItemIndex ItemCatalog::add(std::string_view token) {
  if (auto found = find(token)) return *found;
  const auto index = static_cast<ItemIndex>(tokens_.size());
  tokens_.emplace_back(token);
  index_.emplace(tokens_.back(), index);
  counts_.push_back(0);
  weights_.conservativeResize(index + 1);
  weights_[index] = 1.0;
  return index;
}

std::optional<ItemIndex> ItemCatalog::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& ItemCatalog::token(ItemIndex index) const {
  if (index < 0 || index >= size())
    throw InputError("catalog index " + std::to_string(index) + " out of range");
  return tokens_[static_cast<std::size_t>(index)];
}

void ItemCatalog::set_counts(std::vector<std::size_t> counts) {
  if (counts.size() != tokens_.size())
    throw InputError("catalog counts have the wrong length");
  counts_ = std::move(counts);
}

void ItemCatalog::set_weights(Eigen::VectorXd weights) {
  if (weights.size() != size())
    throw InputError("catalog weights have the wrong length");
  if (!weights.allFinite() || (weights.array() <= 0.0).any())
    throw InputError("catalog weights must be finite and positive");
  weights_ = std::move(weights);
}

}  // namespace mtdpp
