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

#include "pretext/evolution.h"

#include <algorithm>
#include <cmath>

#include "pretext/error.h"
#include "pretext/parallel.h"
#include "pretext/random.h"

namespace pretext {
namespace {

std::string SyntheticId(int64_t round, std::size_t index) {
  return "syn-" + std::to_string(round) + "-" + std::to_string(index);
}

uint64_t LookaheadSeed(const EvolutionConfig& cfg) {
  return DeriveSeed(cfg.master_seed, "lookahead");
}

}  // namespace

void EvolutionConfig::Validate() const {
  if (t_rounds < 1) throw InvalidArgumentError("t_rounds must be >= 1");
  if (n_syn < 1) throw InvalidArgumentError("n_syn must be >= 1");
  if (k_lookahead < 1) throw InvalidArgumentError("k_lookahead must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgumentError("delta must be in (0, 1)");
  }
  noise.Validate();
  variation.Validate();
  embed.Validate();
}

Providers MakeProviders(const EvolutionConfig& cfg,
                        std::span<const Sample> public_samples) {
  Providers p;
  p.embedder = MakeEmbedder(cfg.embed);
  if (cfg.variation.provider == FillProviderKind::kRemote) {
    p.varier = MakeVarier(cfg.variation, FillModel({""}, {1.0}));
  } else {
    p.varier = MakeVarier(cfg.variation, TrainFillModel(public_samples));
  }
  return p;
}

nlohmann::ordered_json ToJson(const RoundRecord& r) {
  nlohmann::ordered_json j;
  j["round"] = r.round;
  j["hist_sum_before_threshold"] = r.hist_sum_before_threshold;
  j["hist_sum_after_threshold"] = r.hist_sum_after_threshold;
  j["distinct_survivors"] = r.distinct_survivors;
  j["uniform_fallback"] = r.uniform_fallback;
  j["seed_union_size"] = r.seed_union_size;
  j["client_download_floats"] = r.client_download_floats;
  j["client_upload_floats"] = r.client_upload_floats;
  return j;
}

void EvolutionState::MergeIntoSeedUnion(std::span<const Sample> survivors) {
  for (const Sample& s : survivors) {
    if (seed_texts.insert(s.text).second) seed_union.push_back(s);
  }
}

CandidateSet InitPopulation(std::span<const Sample> public_samples,
                            int64_t n_syn, int k_lookahead,
                            const Providers& providers, uint64_t seed,
                            int threads) {
  if (public_samples.empty()) {
    throw InvalidArgumentError("initial population needs a non-empty pool");
  }
  if (n_syn < 1) throw InvalidArgumentError("n_syn must be >= 1");
  Rng rng(DeriveSeed(seed, "init-population"));
  std::uniform_int_distribution<std::size_t> pick(0, public_samples.size() - 1);
  CandidateSet cands;
  cands.samples.reserve(static_cast<std::size_t>(n_syn));
  for (int64_t i = 0; i < n_syn; ++i) {
    const Sample& src = public_samples[pick(rng)];
    cands.samples.push_back(
        Sample{SyntheticId(1, static_cast<std::size_t>(i)), src.text, src.tokens});
  }
  cands.lookahead =
      LookaheadEmbeddings(cands.samples, k_lookahead, *providers.varier,
                          *providers.embedder, DeriveSeed(seed, "lookahead"),
                          threads);
  return cands;
}

std::vector<std::size_t> SampleSurvivorIndices(const VoteHistogram& hist,
                                               int64_t n_syn, uint64_t seed,
                                               bool* used_fallback) {
  if (hist.counts.empty()) throw InvalidArgumentError("empty histogram");
  for (double c : hist.counts) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw InvalidArgumentError("survivor histogram must be finite and >= 0");
    }
  }
  const bool fallback = !(hist.Sum() > 0.0);
  if (used_fallback) *used_fallback = fallback;
  Rng rng(seed);
  std::vector<std::size_t> out(static_cast<std::size_t>(std::max<int64_t>(n_syn, 0)));
  if (fallback) {
    std::uniform_int_distribution<std::size_t> uniform(0, hist.counts.size() - 1);
    for (auto& i : out) i = uniform(rng);
  } else {
    std::discrete_distribution<std::size_t> dist(hist.counts.begin(),
                                                 hist.counts.end());
    for (auto& i : out) i = dist(rng);
  }
  return out;
}

std::vector<Sample> SampleSurvivors(const VoteHistogram& hist,
                                    const CandidateSet& population,
                                    int64_t n_syn, uint64_t seed) {
  if (hist.counts.size() != population.size()) {
    throw InvalidArgumentError("histogram length differs from population");
  }
  std::vector<Sample> out;
  for (std::size_t i : SampleSurvivorIndices(hist, n_syn, seed)) {
    out.push_back(population.samples[i]);
  }
  return out;
}

EvolutionState StartEvolution(std::span<const Sample> public_samples,
                              const EvolutionConfig& cfg,
                              const Providers& providers) {
  cfg.Validate();
  EvolutionState state;
  state.population = InitPopulation(public_samples, cfg.n_syn, cfg.k_lookahead,
                                    providers, cfg.master_seed, cfg.threads);
  return state;
}

EvolutionState EvolveRound(
    EvolutionState state,
    std::span<const std::vector<Embedding>> client_embeddings,
    const EvolutionConfig& cfg, const Providers& providers,
    bool vary_population, RoundRecord* record) {
  if (state.round >= cfg.t_rounds) {
    throw InvalidArgumentError("evolution already ran all " +
                               std::to_string(cfg.t_rounds) + " rounds");
  }
  state.population.Validate();
  const int64_t round = state.round + 1;
  const auto r = static_cast<uint64_t>(round);

  HistogramRoundStats stats;
  VoteHistogram hist = DpHistogramRoundEmbedded(
      client_embeddings, state.population.lookahead, cfg.noise,
      DeriveSeed(cfg.master_seed, "histogram", r), cfg.threads, &stats);
  ++state.histogram_releases;

  bool fallback = false;
  std::vector<std::size_t> picks = SampleSurvivorIndices(
      hist, cfg.n_syn, DeriveSeed(cfg.master_seed, "survivors", r), &fallback);
  std::vector<Sample> survivors;
  survivors.reserve(picks.size());
  for (std::size_t i : picks) survivors.push_back(state.population.samples[i]);
  state.MergeIntoSeedUnion(survivors);

  CandidateSet next;
  if (vary_population) {
    std::vector<uint64_t> seeds(survivors.size());
    const uint64_t variation_seed = DeriveSeed(cfg.master_seed, "variation");
    std::vector<Sample> varied;
    for (std::size_t i = 0; i < survivors.size(); ++i) {
      seeds[i] = DeriveSeed(variation_seed, SyntheticId(round + 1, i));
    }
    varied = providers.varier->VaryBatch(survivors, seeds, cfg.threads);
    for (std::size_t i = 0; i < varied.size(); ++i) {
      varied[i].id = SyntheticId(round + 1, i);
    }
    next.lookahead =
        LookaheadEmbeddings(varied, cfg.k_lookahead, *providers.varier,
                            *providers.embedder, LookaheadSeed(cfg), cfg.threads);
    next.samples = std::move(varied);
  } else {
    next.samples = survivors;
    next.lookahead.reserve(picks.size());
    for (std::size_t i : picks) {
      next.lookahead.push_back(state.population.lookahead[i]);
    }
  }

  if (record) {
    std::unordered_set<std::string> distinct;
    for (const Sample& s : survivors) distinct.insert(s.text);
    const auto n = static_cast<int64_t>(state.population.size());
    const auto dim = static_cast<int64_t>(
        state.population.lookahead.empty() ? 0 : state.population.lookahead[0].dim());
    *record = RoundRecord{
        .round = round,
        .hist_sum_before_threshold = stats.sum_before_threshold,
        .hist_sum_after_threshold = stats.sum_after_threshold,
        .distinct_survivors = static_cast<int64_t>(distinct.size()),
        .uniform_fallback = fallback,
        .seed_union_size = static_cast<int64_t>(state.seed_union.size()),
        .client_download_floats = n * dim,
        .client_upload_floats = n,
    };
  }

  state.surviving_history.push_back(std::move(survivors));
  state.population = std::move(next);
  state.round = round;
  return state;
}

EvolutionState EvolveRound(EvolutionState state,
                           std::span<const ClientDataset> clients,
                           const EvolutionConfig& cfg,
                           const Providers& providers, bool vary_population,
                           RoundRecord* record) {
  std::vector<std::vector<Embedding>> embedded(clients.size());
  ParallelFor(clients.size(), cfg.threads, [&](std::size_t i) {
    const ClientDataset& c = clients[i];
    const std::size_t voters = std::min<std::size_t>(
        c.samples.size(), static_cast<std::size_t>(std::min(c.cap, cfg.noise.cap)));
    embedded[i] = providers.embedder->EmbedSamples(
        std::span<const Sample>(c.samples).first(voters));
  });
  return EvolveRound(std::move(state), embedded, cfg, providers,
                     vary_population, record);
}

EvolutionResult RunEvolution(
    std::span<const ClientDataset> clients,
    std::span<const Sample> public_samples, const EvolutionConfig& cfg_in,
    const Providers& providers,
    const std::function<void(const RoundRecord&)>& on_round) {
  if (clients.empty()) throw InvalidArgumentError("no training clients");
  EvolutionConfig cfg = cfg_in;
  cfg.noise.n_train_clients = static_cast<int64_t>(clients.size());
  cfg.Validate();
  for (const ClientDataset& c : clients) {
    if (static_cast<int64_t>(c.samples.size()) > cfg.noise.cap) {
      throw InvalidArgumentError("client " + std::to_string(c.client_id) +
                                 " holds more samples than the cap; clip first");
    }
  }

  std::vector<std::vector<Embedding>> embedded(clients.size());
  ParallelFor(clients.size(), cfg.threads, [&](std::size_t i) {
    embedded[i] = providers.embedder->EmbedSamples(clients[i].samples);
  });

  EvolutionResult result;
  EvolutionState state = StartEvolution(public_samples, cfg, providers);
  result.initial_population = state.population;
  for (int64_t t = 1; t <= cfg.t_rounds; ++t) {
    RoundRecord record;
    state = EvolveRound(std::move(state), embedded, cfg, providers,
                        /*vary_population=*/t < cfg.t_rounds, &record);
    if (on_round) on_round(record);
    result.rounds.push_back(record);
  }
  result.seed_union = state.seed_union;
  result.report = AccountSigma(cfg.noise.sigma, cfg.noise.cap,
                               state.histogram_releases, cfg.delta);
  result.final_state = std::move(state);
  return result;
}

}  // namespace pretext
