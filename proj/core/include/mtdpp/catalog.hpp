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
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mtdpp/types.hpp"

namespace mtdpp {

/// Bijection between item tokens and dense indices [0, p), plus per-item
/// popularity counts and regularization weights.
class ItemCatalog {
 public:
  ItemCatalog() = default;
  /// Throws InputError on empty or duplicate tokens.
  explicit ItemCatalog(std::vector<std::string> tokens);

  /// Index of `token`, inserting it at the end if new.
  ItemIndex add(std::string_view token);

  std::optional<ItemIndex> find(std::string_view token) const;
  const std::string& token(ItemIndex index) const;
  const std::vector<std::string>& tokens() const { return tokens_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(tokens_.size()); }

  const std::vector<std::size_t>& counts() const { return counts_; }
  void set_counts(std::vector<std::size_t> counts);

  /// Per-item alpha_i. All ones until set_weights is called.
  const Eigen::VectorXd& weights() const { return weights_; }
  void set_weights(Eigen::VectorXd weights);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, ItemIndex> index_;
  std::vector<std::size_t> counts_;
  Eigen::VectorXd weights_;
};

}  // namespace mtdpp
