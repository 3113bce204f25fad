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

#include <filesystem>
#include <iosfwd>

#include "mtdpp/catalog.hpp"
#include "mtdpp/model.hpp"

namespace mtdpp {

/// Model file layout, version 1.
///
/// A text header, one `key value` pair per line:
///
///     mtdpp-model 1
///     kind multitask
///     p 100
///     r 50
///     w 0.01
///     tokens 100
///     <one catalog token per line, p lines>
///     data
///
/// followed by the parameter blocks V (p x r), D (p) and, for the multi-task
/// kinds, R (p x r), as IEEE-754 doubles, row-major, little-endian.
/// `w` is written in shortest round-trip form, so a load/save cycle is
/// bit-exact.
inline constexpr int kModelFormatVersion = 1;

void write_model(std::ostream& out, const AnyModel& model, const ItemCatalog& catalog);

struct LoadedModel {
  AnyModel model;
  ItemCatalog catalog;
};

/// Throws ParseError on a malformed or truncated file.
LoadedModel read_model(std::istream& in);

/// Writes to a temporary file next to `path`, then renames it into place.
void save_model(const std::filesystem::path& path, const AnyModel& model,
                const ItemCatalog& catalog);
LoadedModel load_model(const std::filesystem::path& path);

}  // namespace mtdpp
