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

#include "pretext/dp_histogram.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pretext/error.h"
#include "pretext/parallel.h"
#include "pretext/random.h"

namespace pretext {

void CandidateSet::Validate() const {
  if (samples.size() != lookahead.size()) {
    throw InvalidArgumentError("candidate set: " +
                               std::to_string(samples.size()) +
                               " samples but " +
                               std::to_string(lookahead.size()) +
                               " lookahead vectors");
  }
}

double VoteHistogram::Sum() const {
  return std::accumulate(counts.begin(), counts.end(), 0.0);
}

void NoiseParams::Validate() const {
  if (!(sigma >= 0.0)) throw InvalidArgumentError("sigma must be >= 0");
  if (n_train_clients < 1) {
    throw InvalidArgumentError("n_train_clients must be >= 1");
  }
  if (!(threshold_h >= 0.0)) {
    throw InvalidArgumentError("threshold_h must be >= 0");
  }
  if (cap < 1) throw InvalidArgumentError("cap must be >= 1");
}

double NoiseParams::PerClientStddev() const {
  return sigma / std::sqrt(static_cast<double>(n_train_clients));
}

std::size_t NearestIndex(std::span<const double> query,
                         std::span<const Embedding> refs) {
  if (refs.empty()) throw InvalidArgumentError("empty candidate set");
  std::size_t best = 0;
  double best_sq = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < refs.size(); ++j) {
    if (refs[j].dim() != query.size()) {
      throw InvalidArgumentError("nearest neighbour: dimension mismatch");
    }
    const double sq = SquaredDistance(query, refs[j].values);
    if (sq < best_sq) {
      best_sq = sq;
      best = j;
    }
  }
  return best;
}

VoteHistogram VoteNearest(std::span<const Embedding> private_embeddings,
                          std::span<const Embedding> candidates, int64_t cap) {
  if (candidates.empty()) throw InvalidArgumentError("empty candidate set");
  VoteHistogram hist{std::vector<double>(candidates.size(), 0.0),
                     HistogramStage::kRaw};
  const std::size_t voters = std::min<std::size_t>(
      private_embeddings.size(), static_cast<std::size_t>(std::max<int64_t>(cap, 0)));
  for (std::size_t i = 0; i < voters; ++i) {
    hist.counts[NearestIndex(private_embeddings[i].values, candidates)] += 1.0;
  }
  return hist;
}

VoteHistogram ClientVote(const ClientDataset& client, const CandidateSet& cands,
                         const Embedder& embedder) {
  cands.Validate();
  if (cands.size() == 0) throw InvalidArgumentError("empty candidate set");
  const std::size_t voters = std::min<std::size_t>(
      client.samples.size(), static_cast<std::size_t>(client.cap));
  std::vector<Embedding> embedded = embedder.EmbedSamples(
      std::span<const Sample>(client.samples).first(voters));
  return VoteNearest(embedded, cands.lookahead, client.cap);
}

VoteHistogram AddClientNoise(const VoteHistogram& hist,
                             const NoiseParams& params, uint64_t seed) {
  if (hist.stage != HistogramStage::kRaw) {
    throw InvalidArgumentError("AddClientNoise expects a raw histogram");
  }
  params.Validate();
  VoteHistogram out{hist.counts, HistogramStage::kNoisy};
  const double stddev = params.PerClientStddev();
  if (stddev == 0.0) return out;
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, stddev);
  for (double& c : out.counts) c += noise(rng);
  return out;
}

SecureAggregator::SecureAggregator(std::size_t length) : sum_(length, 0.0) {}

void SecureAggregator::Submit(const VoteHistogram& noisy) {
  if (noisy.stage != HistogramStage::kNoisy) {
    throw InvalidArgumentError("secure aggregation expects noisy histograms");
  }
  if (noisy.counts.size() != sum_.size()) {
    throw InvalidArgumentError(
        "secure aggregation: histogram length " +
        std::to_string(noisy.counts.size()) + ", expected " +
        std::to_string(sum_.size()));
  }
  for (std::size_t j = 0; j < sum_.size(); ++j) sum_[j] += noisy.counts[j];
  ++submissions_;
}

VoteHistogram SecureAggregator::Sum() const {
  return VoteHistogram{sum_, HistogramStage::kAggregated};
}

VoteHistogram SecureAggregate(std::span<const VoteHistogram> noisy) {
  if (noisy.empty()) throw InvalidArgumentError("no histograms to aggregate");
  SecureAggregator agg(noisy.front().counts.size());
  for (const VoteHistogram& h : noisy) agg.Submit(h);
  return agg.Sum();
}

VoteHistogram Threshold(const VoteHistogram& aggregated, double h) {
  if (aggregated.stage != HistogramStage::kAggregated) {
    throw InvalidArgumentError("Threshold expects an aggregated histogram");
  }
  VoteHistogram out{aggregated.counts, HistogramStage::kThresholded};
  for (double& c : out.counts) c = std::max(c - h, 0.0);
  return out;
}

VoteHistogram DpHistogramRoundEmbedded(
    std::span<const std::vector<Embedding>> client_embeddings,
    std::span<const Embedding> candidates, const NoiseParams& params,
    uint64_t seed, int threads, HistogramRoundStats* stats) {
  params.Validate();
  if (candidates.empty()) throw InvalidArgumentError("empty candidate set");
  if (client_embeddings.empty()) throw InvalidArgumentError("no clients");
  std::vector<VoteHistogram> noisy(client_embeddings.size());
  std::vector<int64_t> voters(client_embeddings.size(), 0);
  ParallelFor(client_embeddings.size(), threads, [&](std::size_t i) {
    VoteHistogram raw = VoteNearest(client_embeddings[i], candidates, params.cap);
    voters[i] = static_cast<int64_t>(std::llround(raw.Sum()));
    noisy[i] = AddClientNoise(raw, params,
                              DeriveSeed(seed, "client-noise", i));
  });
  SecureAggregator agg(candidates.size());
  for (const VoteHistogram& h : noisy) agg.Submit(h);
  VoteHistogram aggregated = agg.Sum();
  VoteHistogram thresholded = Threshold(aggregated, params.threshold_h);
  if (stats) {
    stats->sum_before_threshold = aggregated.Sum();
    stats->sum_after_threshold = thresholded.Sum();
    stats->voting_samples =
        std::accumulate(voters.begin(), voters.end(), int64_t{0});
  }
  return thresholded;
}

VoteHistogram DpHistogramRound(std::span<const ClientDataset> clients,
                               const CandidateSet& cands,
                               const NoiseParams& params,
                               const Embedder& embedder, uint64_t seed,
                               int threads, HistogramRoundStats* stats) {
  cands.Validate();
  std::vector<std::vector<Embedding>> embedded(clients.size());
  ParallelFor(clients.size(), threads, [&](std::size_t i) {
    const ClientDataset& c = clients[i];
    const std::size_t voters = std::min<std::size_t>(
        c.samples.size(), static_cast<std::size_t>(std::min(c.cap, params.cap)));
    embedded[i] = embedder.EmbedSamples(
        std::span<const Sample>(c.samples).first(voters));
  });
  return DpHistogramRoundEmbedded(embedded, cands.lookahead, params, seed,
                                  threads, stats);
}

}  // namespace pretext
