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

#ifndef PRETEXT_EMBEDDER_H_
#define PRETEXT_EMBEDDER_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pretext/corpus.h"
#include "pretext/variation.h"

namespace pretext {

inline constexpr int kDefaultEmbeddingDim = 384;

// A point in embedding space. Provider outputs are unit-norm, or zero for
// texts without tokens; lookahead means may have norm below 1.
struct Embedding {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
  double Norm() const;

  friend bool operator==(const Embedding&, const Embedding&) = default;
};

enum class EmbeddingKind { kHashedNgram, kRemote };

struct EmbeddingProviderConfig {
  EmbeddingKind kind = EmbeddingKind::kHashedNgram;
  int dim = kDefaultEmbeddingDim;
  int ngram_min = 3;
  int ngram_max = 5;
  std::optional<std::string> remote_url;

  void Validate() const;
};

// Euclidean distance. Throws InvalidArgumentError on dimension mismatch.
double Distance(const Embedding& y, const Embedding& z);
double SquaredDistance(std::span<const double> y, std::span<const double> z);

// Scales to unit L2 norm; the zero vector is returned unchanged.
void Normalize(Embedding& e);

// Signed feature hashing of character n-grams.
//
// The text is normalized to its whitespace tokens joined by single spaces
// and ASCII-lowercased. Every n-gram of n in [ngram_min, ngram_max] code
// points contributes +1 or -1 at FNV-1a-64(gram) mod dim; the sign is -1
// when the top bit of SplitMix64(FNV-1a-64(gram)) is set. A non-empty text
// shorter than ngram_min contributes itself as a single gram. The result is
// L2-normalized; texts without tokens map to the zero vector.
Embedding HashedNgramEmbed(std::string_view text, int dim, int ngram_min,
                           int ngram_max);

class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual int dim() const = 0;
  virtual Embedding Embed(std::string_view text) const = 0;
  virtual std::vector<Embedding> EmbedBatch(std::span<const std::string> texts,
                                            int threads = 1) const;

  std::vector<Embedding> EmbedSamples(std::span<const Sample> samples,
                                      int threads = 1) const;
};

class HashedNgramEmbedder : public Embedder {
 public:
  explicit HashedNgramEmbedder(EmbeddingProviderConfig cfg);

  int dim() const override { return cfg_.dim; }
  Embedding Embed(std::string_view text) const override;

 private:
  EmbeddingProviderConfig cfg_;
};

// Delegates to the sidecar's /embed endpoint and L2-normalizes the replies.
class RemoteEmbedder : public Embedder {
 public:
  RemoteEmbedder(std::string base_url, int dim, std::size_t max_batch = 256);

  int dim() const override { return dim_; }
  Embedding Embed(std::string_view text) const override;
  std::vector<Embedding> EmbedBatch(std::span<const std::string> texts,
                                    int threads = 1) const override;

 private:
  std::string base_url_;
  int dim_;
  std::size_t max_batch_;
};

std::unique_ptr<Embedder> MakeEmbedder(const EmbeddingProviderConfig& cfg);

// Convenience wrapper: MakeEmbedder(cfg)->Embed(text).
Embedding Embed(std::string_view text, const EmbeddingProviderConfig& cfg);

// Arithmetic mean; not re-normalized.
Embedding MeanEmbedding(std::span<const Embedding> vectors);

// Mean embedding of `k` variations of `z`. Variation i uses seed
// DeriveSeed(seed, "lookahead", i).
Embedding LookaheadEmbedding(const Sample& z, int k, const Varier& varier,
                             const Embedder& embedder, uint64_t seed);

// Lookahead vectors for a whole population. Sample i's variations are seeded
// from DeriveSeed(seed, samples[i].id), so ids should be unique.
std::vector<Embedding> LookaheadEmbeddings(std::span<const Sample> samples,
                                           int k, const Varier& varier,
                                           const Embedder& embedder,
                                           uint64_t seed, int threads = 1);

}  // namespace pretext

#endif  // PRETEXT_EMBEDDER_H_
