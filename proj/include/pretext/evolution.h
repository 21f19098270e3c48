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

#ifndef PRETEXT_EVOLUTION_H_
#define PRETEXT_EVOLUTION_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "pretext/accountant.h"
#include "pretext/corpus.h"
#include "pretext/dp_histogram.h"
#include "pretext/embedder.h"
#include "pretext/variation.h"

namespace pretext {

struct EvolutionConfig {
  int64_t t_rounds = 11;
  int64_t n_syn = 1024;
  int k_lookahead = 4;
  NoiseParams noise;
  VariationConfig variation;
  EmbeddingProviderConfig embed;
  double delta = 3e-6;
  uint64_t master_seed = 0;
  int threads = 1;

  void Validate() const;
};

// The model-backed pieces of a run.
struct Providers {
  std::shared_ptr<const Embedder> embedder;
  std::shared_ptr<const Varier> varier;
};

// Builds providers from config; `public_samples` trains the unigram fill
// model when the built-in variation provider is selected.
Providers MakeProviders(const EvolutionConfig& cfg,
                        std::span<const Sample> public_samples);

// Server-side debug record emitted once per round.
struct RoundRecord {
  int64_t round = 0;  // 1-based
  double hist_sum_before_threshold = 0.0;
  double hist_sum_after_threshold = 0.0;
  int64_t distinct_survivors = 0;
  bool uniform_fallback = false;
  int64_t seed_union_size = 0;
  // Per-client communication in floats: lookahead vectors down, one
  // histogram up.
  int64_t client_download_floats = 0;
  int64_t client_upload_floats = 0;
};

nlohmann::ordered_json ToJson(const RoundRecord& record);

struct EvolutionState {
  int64_t round = 0;  // completed rounds
  CandidateSet population;
  std::vector<std::vector<Sample>> surviving_history;
  // Union of surviving sets, deduplicated by exact text, in first-seen order.
  std::vector<Sample> seed_union;
  std::unordered_set<std::string> seed_texts;
  // Gaussian releases performed so far; the only privacy-relevant events.
  int64_t histogram_releases = 0;

  void MergeIntoSeedUnion(std::span<const Sample> survivors);
};

// Draws n_syn public samples uniformly with replacement, renames them
// "syn-1-{i}" and computes their lookahead vectors.
CandidateSet InitPopulation(std::span<const Sample> public_samples,
                            int64_t n_syn, int k_lookahead,
                            const Providers& providers, uint64_t seed,
                            int threads = 1);

// Draws n_syn indices i.i.d. from hist / sum(hist). An all-zero histogram
// falls back to the uniform distribution over the population.
std::vector<std::size_t> SampleSurvivorIndices(const VoteHistogram& hist,
                                               int64_t n_syn, uint64_t seed,
                                               bool* used_fallback = nullptr);

std::vector<Sample> SampleSurvivors(const VoteHistogram& hist,
                                    const CandidateSet& population,
                                    int64_t n_syn, uint64_t seed);

// Round 0: a freshly initialized population and empty history.
EvolutionState StartEvolution(std::span<const Sample> public_samples,
                              const EvolutionConfig& cfg,
                              const Providers& providers);

// One round of vote -> survivor draw -> variation. When `vary_population`
// is false the survivors themselves (with their lookahead vectors) become
// the next population; the loop uses this for the final round, whose
// variations would never be read.
EvolutionState EvolveRound(
    EvolutionState state,
    std::span<const std::vector<Embedding>> client_embeddings,
    const EvolutionConfig& cfg, const Providers& providers,
    bool vary_population = true, RoundRecord* record = nullptr);

EvolutionState EvolveRound(EvolutionState state,
                           std::span<const ClientDataset> clients,
                           const EvolutionConfig& cfg,
                           const Providers& providers,
                           bool vary_population = true,
                           RoundRecord* record = nullptr);

struct EvolutionResult {
  std::vector<Sample> seed_union;
  PrivacyReport report;
  CandidateSet initial_population;
  std::vector<RoundRecord> rounds;
  EvolutionState final_state;
};

// Runs cfg.t_rounds rounds and stops before expansion. The noise parameters'
// client count is taken from `clients`. Private samples are embedded once,
// client-side, and reused every round.
EvolutionResult RunEvolution(
    std::span<const ClientDataset> clients,
    std::span<const Sample> public_samples, const EvolutionConfig& cfg,
    const Providers& providers,
    const std::function<void(const RoundRecord&)>& on_round = {});

}  // namespace pretext

#endif  // PRETEXT_EVOLUTION_H_
