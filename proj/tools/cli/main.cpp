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
// mtdpp: train, evaluate and query basket-completion DPP models.
//
// Exit codes: 0 success, 2 input or parse error, 3 protocol or configuration
// error, 4 numerical failure.

#include <functional>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "mtdpp/error.hpp"

namespace {

int exit_code(mtdpp::ErrorKind kind) {
  switch (kind) {
    case mtdpp::ErrorKind::input:
    case mtdpp::ErrorKind::parse:
      return 2;
    case mtdpp::ErrorKind::protocol:
      return 3;
    case mtdpp::ErrorKind::singular_kernel:
    case mtdpp::ErrorKind::numerical:
      return 4;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mtdpp::cli;
  CLI::App app{"Logistic and multi-task DPP models for basket completion", "mtdpp"};
  RunConfig config;
  app.set_config("--config", "", "File of 'key = value' lines; command-line flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  add_options(app, config);
  app.require_subcommand(1, 1);

  std::function<int()> command;
  auto sub = [&](const char* name, const char* help, std::function<int()> run) {
    app.add_subcommand(name, help)->fallthrough()->callback([&command, run] { command = run; });
  };
  sub("summary", "Basket count, item count and mean basket size after filtering",
      [&] { return cmd_summary(config); });
  sub("train", "Fit a model and write it to --model-file", [&] { return cmd_train(config); });
  sub("eval", "MPR and precision@K on the test split for one or more models",
      [&] { return cmd_eval(config); });
  sub("complete", "Rank completions for --basket", [&] { return cmd_complete(config); });
  sub("gradcheck", "Compare analytic gradients with finite differences",
      [&] { return cmd_gradcheck(config, app); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    return dynamic_cast<const CLI::FileError*>(&e) ? 2 : 3;
  }

  try {
    return command();
  } catch (const mtdpp::Error& e) {
    std::cerr << "mtdpp: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "mtdpp: " << e.what() << "\n";
    return 1;
  }
}
