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
#include "run_config.hpp"

#include <thread>

#include "mtdpp/error.hpp"
#include "mtdpp/rng.hpp"

namespace mtdpp::cli {

void add_options(CLI::App& app, RunConfig& c) {
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* g = "Dataset";
  app.add_option("--data", c.data, "Basket file")->group(g);
  app.add_option("--format", c.format, "basket-lines or csv-transactions")
      ->capture_default_str()
      ->group(g);
  app.add_option("--delimiter", c.delimiter,
                 "Item separator for basket lines: a character, 'space' or 'tab'")
      ->capture_default_str()
      ->group(g);
  app.add_flag("--csv-header", c.csv_header, "Skip the first CSV row")->group(g);
  app.add_flag("--ordered", c.ordered, "Basket lines list items in the order they were added")
      ->group(g);
  app.add_option("--min-item-count", c.min_item_count, "Drop items in fewer baskets")
      ->capture_default_str()
      ->group(g);
  app.add_option("--min-basket-size", c.min_basket_size)->capture_default_str()->group(g);
  app.add_option("--max-basket-size", c.max_basket_size)->group(g);
  app.add_option("--train-fraction", c.train_fraction)->capture_default_str()->group(g);
  app.add_option("--protocol", c.protocol, "random, last-item or mixed")
      ->capture_default_str()
      ->group(g);
  app.add_option("--negative-ratio", c.train.negative_ratio,
                 "Negatives per positive training example")
      ->capture_default_str()
      ->group(g);

  g = "Model";
  app.add_option("--model,--kind", c.model, "logistic, multitask or multitask-nobias")
      ->capture_default_str()
      ->group(g);
  app.add_option("--rank", c.train.rank)->capture_default_str()->group(g);
  app.add_option("--w", c.train.scale, "Link scale")->capture_default_str()->group(g);
  app.add_option("--alpha0", c.train.alpha0, "Regularization strength")
      ->capture_default_str()
      ->group(g);
  app.add_option("--step", c.train.step)->capture_default_str()->group(g);
  app.add_option("--momentum", c.train.momentum)->capture_default_str()->group(g);
  app.add_option("--batch", c.train.minibatch_size)->capture_default_str()->group(g);
  app.add_option("--epochs", c.train.max_epochs)->capture_default_str()->group(g);
  app.add_option("--tol", c.train.convergence_tol)->capture_default_str()->group(g);
  app.add_option("--seed", c.train.seed)->capture_default_str()->group(g);
  app.add_option("--workers", c.train.workers, "Worker threads, 0 for one per core")
      ->capture_default_str()
      ->group(g);

  g = "Output";
  app.add_option("--model-file", c.model_files,
                 "Model written by train, read by eval and complete (repeatable for eval)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->capture_default_str()
      ->group(g);
  app.add_option("--out", c.out, "Write the JSON result here instead of stdout")->group(g);
  app.add_flag("--mask-context", c.mask_context, "Leave context items out of the ranking")
      ->group(g);
  app.add_flag("--quiet", c.quiet, "No progress log")->group(g);

  g = "Completion";
  app.add_option("--basket", c.basket, "Comma-separated item tokens")->group(g);
  app.add_option("--count", c.count)->capture_default_str()->group(g);

  g = "Gradient check";
  app.add_option("--items", c.items)->capture_default_str()->group(g);
  app.add_option("--instances", c.instances)->capture_default_str()->group(g);
  app.add_option("--tolerance", c.tolerance)->capture_default_str()->group(g);
}

LoadOptions load_options(const RunConfig& c) {
  LoadOptions lo;
  lo.format = parse_input_format(c.format);
  if (c.delimiter == "space" || c.delimiter == "tab" || c.delimiter == " ")
    lo.delimiter = ' ';
  else if (c.delimiter == "comma")
    lo.delimiter = ',';
  else if (c.delimiter.size() == 1)
    lo.delimiter = c.delimiter[0];
  else
    throw ProtocolError("delimiter must be one character, 'space' or 'tab'");
  lo.csv_header = c.csv_header;
  lo.assume_ordered = c.ordered;
  return lo;
}

FilterOptions filter_options(const RunConfig& c) {
  return {c.min_item_count, c.min_basket_size, c.max_basket_size};
}

SeedPlan seed_plan(std::uint64_t seed) {
  Rng rng(seed);
  SeedPlan plan{};
  plan.split = rng.next();
  plan.examples = rng.next();
  plan.train = rng.next();
  return plan;
}

unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

PreparedData prepare(const RunConfig& c) {
  if (c.data.empty()) throw InputError("--data is required");
  const auto protocol = parse_protocol(c.protocol);
  auto dataset = filter_dataset(load_baskets(c.data, load_options(c)), filter_options(c));
  PreparedData out;
  out.summary = summarize(dataset);
  const auto seeds = seed_plan(c.train.seed);
  out.split = split(dataset, c.train_fraction, seeds.split);
  out.examples =
      make_examples(out.split, {protocol}, c.train.negative_ratio, seeds.examples);
  return out;
}

}  // namespace mtdpp::cli
