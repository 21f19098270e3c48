// Copyright 2026 The pretext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// pretext: federated DP synthetic text generation.
//
//   pretext run --config path [--seed N] [--threads N]
//   pretext calibrate --epsilon E --delta D --steps T --cap C
//   pretext account --sigma S --cap C --steps T --delta D
//   pretext evaluate --synthetic f --eval f --init f [--dim D]
//   pretext toy-data --out dir [--seed N]

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "pretext/accountant.h"
#include "pretext/corpus.h"
#include "pretext/embedder.h"
#include "pretext/error.h"
#include "pretext/fidelity.h"
#include "pretext/pipeline.h"
#include "pretext/toy_data.h"

namespace {

int Calibrate(double epsilon, double delta, int64_t steps, int64_t cap) {
  std::cout << pretext::ToJson(pretext::CalibrateSigma(epsilon, delta, steps, cap))
                   .dump(2)
            << '\n';
  return 0;
}

int Account(double sigma, int64_t cap, int64_t steps, double delta) {
  std::cout << pretext::ToJson(pretext::AccountSigma(sigma, cap, steps, delta))
                   .dump(2)
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated differentially private synthetic text generation"};
  app.require_subcommand(1);

  std::filesystem::path config_path;
  std::optional<uint64_t> seed;
  int threads = 1;
  bool verbose = false;
  CLI::App* run = app.add_subcommand("run", "Run the full pipeline from a JSON config");
  run->add_option("--config", config_path, "Run configuration (JSON)")->required();
  run->add_option("--seed", seed, "Override master_seed");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--verbose", verbose, "Stream per-round records to stderr");

  double epsilon = 0, delta = 3e-6, sigma = 0;
  int64_t steps = 11, cap = 8;
  CLI::App* calibrate =
      app.add_subcommand("calibrate", "Find the noise sigma for a target epsilon");
  calibrate->add_option("--epsilon", epsilon)->required();
  calibrate->add_option("--delta", delta)->capture_default_str();
  calibrate->add_option("--steps", steps)->capture_default_str();
  calibrate->add_option("--cap", cap)->capture_default_str();

  CLI::App* account = app.add_subcommand("account", "Epsilon spent by a given sigma");
  account->add_option("--sigma", sigma)->required();
  account->add_option("--cap", cap)->capture_default_str();
  account->add_option("--steps", steps)->capture_default_str();
  account->add_option("--delta", delta)->capture_default_str();

  std::filesystem::path syn_path, eval_path, init_path, out_path;
  pretext::EmbeddingProviderConfig embed_cfg;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Nearest-neighbour fidelity of existing files");
  evaluate->add_option("--synthetic", syn_path)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--eval", eval_path)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--init", init_path)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--dim", embed_cfg.dim)->capture_default_str();
  evaluate->add_option("--ngram-min", embed_cfg.ngram_min)->capture_default_str();
  evaluate->add_option("--ngram-max", embed_cfg.ngram_max)->capture_default_str();
  evaluate->add_option("--threads", threads);

  pretext::ToyCorpusSpec toy;
  std::filesystem::path toy_out;
  CLI::App* toy_data =
      app.add_subcommand("toy-data", "Write a clustered toy corpus (train/eval/public)");
  toy_data->add_option("--out", toy_out)->required();
  toy_data->add_option("--seed", toy.seed)->capture_default_str();
  toy_data->add_option("--train", toy.n_train)->capture_default_str();
  toy_data->add_option("--eval", toy.n_eval)->capture_default_str();
  toy_data->add_option("--public", toy.n_public)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      pretext::PipelineOptions options;
      options.seed_override = seed;
      options.threads = threads;
      if (verbose) options.progress = &std::cerr;
      return pretext::RunPipelineFromFile(config_path, options, std::cerr);
    }
    if (*calibrate) return Calibrate(epsilon, delta, steps, cap);
    if (*account) return Account(sigma, cap, steps, delta);
    if (*evaluate) {
      auto embedder = pretext::MakeEmbedder(embed_cfg);
      pretext::FidelityReport report = pretext::EvaluateFidelity(
          pretext::LoadJsonl(syn_path), pretext::LoadJsonl(eval_path),
          pretext::LoadJsonl(init_path), *embedder, threads);
      std::cout << pretext::ToJson(report).dump(2) << '\n';
      return 0;
    }
    if (*toy_data) {
      pretext::ToyCorpus corpus = pretext::MakeClusteredCorpus(toy);
      std::filesystem::create_directories(toy_out);
      pretext::SaveJsonl(toy_out / "private_train.jsonl", corpus.private_train);
      pretext::SaveJsonl(toy_out / "private_eval.jsonl", corpus.private_eval);
      pretext::SaveJsonl(toy_out / "public_pool.jsonl", corpus.public_pool);
      return 0;
    }
  } catch (const pretext::InvalidArgumentError& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
