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

#ifndef PRETEXT_DP_HISTOGRAM_H_
#define PRETEXT_DP_HISTOGRAM_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pretext/corpus.h"
#include "pretext/embedder.h"

namespace pretext {

// The synthetic candidates of one round together with the vectors clients
// actually download (one lookahead mean per candidate).
struct CandidateSet {
  std::vector<Sample> samples;
  std::vector<Embedding> lookahead;

  std::size_t size() const { return samples.size(); }
  void Validate() const;
};

enum class HistogramStage { kRaw, kNoisy, kAggregated, kThresholded };

struct VoteHistogram {
  std::vector<double> counts;
  HistogramStage stage = HistogramStage::kRaw;

  double Sum() const;
};

struct NoiseParams {
  // Standard deviation of the total noise in the aggregate histogram.
  double sigma = 0.0;
  int64_t n_train_clients = 1;
  double threshold_h = 0.0;
  // Per-client vote cap; also the L1 and L2 sensitivity of the aggregate.
  int64_t cap = 1;

  void Validate() const;
  // sigma / sqrt(n_train_clients): each client's share of the noise.
  double PerClientStddev() const;
};

// Index of the nearest reference by Euclidean distance; ties go to the
// lowest index. Throws on an empty reference set.
std::size_t NearestIndex(std::span<const double> query,
                         std::span<const Embedding> refs);

// Raw vote histogram from pre-embedded private samples. Only the first
// `cap` samples vote.
VoteHistogram VoteNearest(std::span<const Embedding> private_embeddings,
                          std::span<const Embedding> candidates, int64_t cap);

// Client-side voting: embeds the client's samples with plain embeddings and
// votes against the candidates' lookahead vectors.
VoteHistogram ClientVote(const ClientDataset& client, const CandidateSet& cands,
                         const Embedder& embedder);

// Adds i.i.d. N(0, sigma^2 / n_train_clients) noise to every bin.
VoteHistogram AddClientNoise(const VoteHistogram& hist,
                             const NoiseParams& params, uint64_t seed);

// Simulated secure aggregation. Clients submit noisy histograms; the only
// thing the server side can read back is the elementwise sum, accumulated in
// submission order.
class SecureAggregator {
 public:
  explicit SecureAggregator(std::size_t length);

  void Submit(const VoteHistogram& noisy);
  std::size_t submissions() const { return submissions_; }
  VoteHistogram Sum() const;

 private:
  std::vector<double> sum_;
  std::size_t submissions_ = 0;
};

VoteHistogram SecureAggregate(std::span<const VoteHistogram> noisy);

// Elementwise max(x - h, 0).
VoteHistogram Threshold(const VoteHistogram& aggregated, double h);

// Server-visible aggregates of one histogram release.
struct HistogramRoundStats {
  double sum_before_threshold = 0.0;
  double sum_after_threshold = 0.0;
  int64_t voting_samples = 0;
};

// One full private histogram release over pre-embedded clients. Client i's
// noise is drawn from DeriveSeed(seed, "client-noise", i).
VoteHistogram DpHistogramRoundEmbedded(
    std::span<const std::vector<Embedding>> client_embeddings,
    std::span<const Embedding> candidates, const NoiseParams& params,
    uint64_t seed, int threads = 1, HistogramRoundStats* stats = nullptr);

// Threshold(SecureAggregate([AddClientNoise(ClientVote(c)) for c in clients])).
VoteHistogram DpHistogramRound(std::span<const ClientDataset> clients,
                               const CandidateSet& cands,
                               const NoiseParams& params,
                               const Embedder& embedder, uint64_t seed,
                               int threads = 1,
                               HistogramRoundStats* stats = nullptr);

}  // namespace pretext

#endif  // PRETEXT_DP_HISTOGRAM_H_
