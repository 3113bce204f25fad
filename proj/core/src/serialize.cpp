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
#include "mtdpp/serialize.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <system_error>

#include "mtdpp/error.hpp"

namespace mtdpp {

namespace {

void put_doubles(std::ostream& out, const double* data, Eigen::Index count) {
  for (Eigen::Index i = 0; i < count; ++i) {
    auto bits = std::bit_cast<std::uint64_t>(data[i]);
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
}

void get_doubles(std::istream& in, double* data, Eigen::Index count) {
  for (Eigen::Index i = 0; i < count; ++i) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8))
      throw ParseError("model file is truncated in the parameter blocks", 0);
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    data[i] = std::bit_cast<double>(bits);
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

class HeaderReader {
 public:
  explicit HeaderReader(std::istream& in) : in_(in) {}

  std::string line() {
    std::string s;
    if (!std::getline(in_, s)) throw ParseError("model header is truncated", number_ + 1);
    ++number_;
    return s;
  }

  std::string value(std::string_view key) {
    const std::string s = line();
    if (s.size() <= key.size() + 1 || s.compare(0, key.size(), key) != 0 ||
        s[key.size()] != ' ')
      throw ParseError("expected '" + std::string(key) + " <value>'", number_);
    return s.substr(key.size() + 1);
  }

  long long integer(std::string_view key) {
    const std::string s = value(key);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v < 1)
      throw ParseError("'" + std::string(key) + "' must be a positive integer", number_);
    return v;
  }

  double real(std::string_view key) {
    const std::string s = value(key);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw ParseError("'" + std::string(key) + "' must be a number", number_);
    return v;
  }

  std::size_t number() const { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

}  // namespace

void write_model(std::ostream& out, const AnyModel& model, const ItemCatalog& catalog) {
  const Eigen::Index p = items_of(model);
  if (catalog.size() != p) throw InputError("catalog size does not match the model");
  std::visit(
      [&](const auto& m) {
        out << "mtdpp-model " << kModelFormatVersion << '\n'
            << "kind " << to_string(kind_of(model)) << '\n'
            << "p " << m.items() << '\n'
            << "r " << m.rank() << '\n'
            << "w " << format_double(m.scale()) << '\n'
            << "tokens " << catalog.size() << '\n';
        for (const auto& t : catalog.tokens()) out << t << '\n';
        out << "data\n";
        put_doubles(out, m.factors().data(), m.factors().size());
        put_doubles(out, m.bias().data(), m.bias().size());
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, MultiTaskDppModel>)
          put_doubles(out, m.task_factors().data(), m.task_factors().size());
      },
      model);
  if (!out) throw InputError("failed to write model");
}

LoadedModel read_model(std::istream& in) {
  HeaderReader header(in);
  const std::string magic = header.line();
  if (magic != "mtdpp-model " + std::to_string(kModelFormatVersion))
    throw ParseError("not an mtdpp model file (or unsupported version)", 1);

  ModelKind kind;
  try {
    kind = parse_model_kind(header.value("kind"));
  } catch (const InputError& e) {
    throw ParseError(e.what(), header.number());
  }
  const auto p = static_cast<Eigen::Index>(header.integer("p"));
  const auto r = static_cast<Eigen::Index>(header.integer("r"));
  const double w = header.real("w");
  if (header.integer("tokens") != p)
    throw ParseError("token count does not match p", header.number());
  std::vector<std::string> tokens;
  tokens.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index i = 0; i < p; ++i) tokens.push_back(header.line());
  if (header.line() != "data")
    throw ParseError("expected 'data' after the token list", header.number());

  ItemCatalog catalog;
  try {
    catalog = ItemCatalog(std::move(tokens));
  } catch (const InputError& e) {
    throw ParseError(e.what(), 0);
  }

  RowMatrix v(p, r);
  Eigen::VectorXd d(p);
  get_doubles(in, v.data(), v.size());
  get_doubles(in, d.data(), d.size());
  if (kind == ModelKind::logistic)
    return {LogisticDppModel(std::move(v), std::move(d), w), std::move(catalog)};

  RowMatrix tasks(p, r);
  get_doubles(in, tasks.data(), tasks.size());
  return {MultiTaskDppModel(std::move(v), std::move(d), std::move(tasks), w,
                            kind == ModelKind::multitask),
          std::move(catalog)};
}

void save_model(const std::filesystem::path& path, const AnyModel& model,
                const ItemCatalog& catalog) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    write_model(out, model, catalog);
    out.flush();
    if (!out) throw InputError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw InputError("cannot move model into '" + path.string() + "': " + ec.message());
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model file '" + path.string() + "'");
  return read_model(in);
}

}  // namespace mtdpp
