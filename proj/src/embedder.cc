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

#include "pretext/embedder.h"

#include <cmath>

#include "pretext/error.h"
#include "pretext/parallel.h"
#include "pretext/random.h"
#include "pretext/sidecar_client.h"

namespace pretext {
namespace {

// Byte offsets of UTF-8 code point starts, plus a final end offset.
std::vector<std::size_t> CodePointOffsets(std::string_view s) {
  std::vector<std::size_t> offsets;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) offsets.push_back(i);
  }
  offsets.push_back(s.size());
  return offsets;
}

void AddGram(std::string_view gram, std::vector<double>& acc) {
  const uint64_t h = Fnv1a64(gram);
  const std::size_t index = static_cast<std::size_t>(h % acc.size());
  acc[index] += (SplitMix64(h) >> 63) ? -1.0 : 1.0;
}

}  // namespace

double Embedding::Norm() const {
  double sq = 0.0;
  for (double v : values) sq += v * v;
  return std::sqrt(sq);
}

void EmbeddingProviderConfig::Validate() const {
  if (dim < 8) throw InvalidArgumentError("embedding dim must be >= 8");
  if (!(1 <= ngram_min && ngram_min <= ngram_max && ngram_max <= 8)) {
    throw InvalidArgumentError("need 1 <= ngram_min <= ngram_max <= 8");
  }
}

double SquaredDistance(std::span<const double> y, std::span<const double> z) {
  double sq = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - z[i];
    sq += d * d;
  }
  return sq;
}

double Distance(const Embedding& y, const Embedding& z) {
  if (y.dim() != z.dim()) {
    throw InvalidArgumentError("distance: dimension mismatch (" +
                               std::to_string(y.dim()) + " vs " +
                               std::to_string(z.dim()) + ")");
  }
  return std::sqrt(SquaredDistance(y.values, z.values));
}

void Normalize(Embedding& e) {
  const double norm = e.Norm();
  if (norm == 0.0) return;
  for (double& v : e.values) v /= norm;
}

Embedding HashedNgramEmbed(std::string_view text, int dim, int ngram_min,
                           int ngram_max) {
  Embedding out{std::vector<double>(static_cast<std::size_t>(dim), 0.0)};
  std::string norm = JoinTokens(Tokenize(text));
  if (norm.empty()) return out;
  for (char& c : norm) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  const std::vector<std::size_t> cp = CodePointOffsets(norm);
  const std::size_t n_cp = cp.size() - 1;
  const std::string_view view(norm);
  if (n_cp < static_cast<std::size_t>(ngram_min)) {
    AddGram(view, out.values);
  } else {
    for (int n = ngram_min; n <= ngram_max; ++n) {
      const auto len = static_cast<std::size_t>(n);
      if (len > n_cp) break;
      for (std::size_t start = 0; start + len <= n_cp; ++start) {
        AddGram(view.substr(cp[start], cp[start + len] - cp[start]),
                out.values);
      }
    }
  }
  Normalize(out);
  return out;
}

std::vector<Embedding> Embedder::EmbedBatch(std::span<const std::string> texts,
                                            int threads) const {
  std::vector<Embedding> out(texts.size());
  ParallelFor(texts.size(), threads,
              [&](std::size_t i) { out[i] = Embed(texts[i]); });
  return out;
}

std::vector<Embedding> Embedder::EmbedSamples(std::span<const Sample> samples,
                                              int threads) const {
  std::vector<std::string> texts;
  texts.reserve(samples.size());
  for (const Sample& s : samples) texts.push_back(s.text);
  return EmbedBatch(texts, threads);
}

HashedNgramEmbedder::HashedNgramEmbedder(EmbeddingProviderConfig cfg)
    : cfg_(std::move(cfg)) {
  cfg_.Validate();
}

Embedding HashedNgramEmbedder::Embed(std::string_view text) const {
  return HashedNgramEmbed(text, cfg_.dim, cfg_.ngram_min, cfg_.ngram_max);
}

RemoteEmbedder::RemoteEmbedder(std::string base_url, int dim,
                               std::size_t max_batch)
    : base_url_(std::move(base_url)),
      dim_(dim),
      max_batch_(std::max<std::size_t>(max_batch, 1)) {}

Embedding RemoteEmbedder::Embed(std::string_view text) const {
  std::string t(text);
  return EmbedBatch(std::span<const std::string>(&t, 1)).front();
}

std::vector<Embedding> RemoteEmbedder::EmbedBatch(
    std::span<const std::string> texts, int threads) const {
  const std::size_t n_chunks = (texts.size() + max_batch_ - 1) / max_batch_;
  std::vector<Embedding> out(texts.size());
  ParallelFor(n_chunks, threads, [&](std::size_t c) {
    const std::size_t begin = c * max_batch_;
    const std::size_t end = std::min(texts.size(), begin + max_batch_);
    nlohmann::json body = {
        {"texts", std::vector<std::string>(texts.begin() + begin,
                                           texts.begin() + end)}};
    nlohmann::json reply = SidecarClient(base_url_).Post("/embed", body);
    if (!reply.is_object() || !reply.contains("embeddings") ||
        !reply["embeddings"].is_array() ||
        reply["embeddings"].size() != end - begin) {
      throw ProtocolError("/embed reply must carry " +
                          std::to_string(end - begin) + " embeddings");
    }
    if (reply.contains("dim") && reply["dim"].is_number_integer() &&
        reply["dim"].get<int>() != dim_) {
      throw ProtocolError("/embed advertised dim " +
                          std::to_string(reply["dim"].get<int>()) +
                          ", expected " + std::to_string(dim_));
    }
    for (std::size_t i = begin; i < end; ++i) {
      const auto& row = reply["embeddings"][i - begin];
      if (!row.is_array() || row.size() != static_cast<std::size_t>(dim_)) {
        throw ProtocolError("/embed returned a vector of dimension " +
                            std::to_string(row.is_array() ? row.size() : 0) +
                            ", expected " + std::to_string(dim_));
      }
      Embedding e{row.get<std::vector<double>>()};
      Normalize(e);
      out[i] = std::move(e);
    }
  });
  return out;
}

std::unique_ptr<Embedder> MakeEmbedder(const EmbeddingProviderConfig& cfg) {
  cfg.Validate();
  if (cfg.kind == EmbeddingKind::kRemote) {
    return std::make_unique<RemoteEmbedder>(ResolveSidecarUrl(cfg.remote_url),
                                            cfg.dim);
  }
  return std::make_unique<HashedNgramEmbedder>(cfg);
}

Embedding Embed(std::string_view text, const EmbeddingProviderConfig& cfg) {
  return MakeEmbedder(cfg)->Embed(text);
}

Embedding MeanEmbedding(std::span<const Embedding> vectors) {
  if (vectors.empty()) throw InvalidArgumentError("mean of no embeddings");
  Embedding mean{std::vector<double>(vectors.front().dim(), 0.0)};
  for (const Embedding& v : vectors) {
    if (v.dim() != mean.dim()) {
      throw InvalidArgumentError("mean: dimension mismatch");
    }
    for (std::size_t j = 0; j < v.dim(); ++j) mean.values[j] += v.values[j];
  }
  const double inv = 1.0 / static_cast<double>(vectors.size());
  for (double& x : mean.values) x *= inv;
  return mean;
}

Embedding LookaheadEmbedding(const Sample& z, int k, const Varier& varier,
                             const Embedder& embedder, uint64_t seed) {
  if (k < 1) throw InvalidArgumentError("lookahead K must be >= 1");
  std::vector<Sample> copies(static_cast<std::size_t>(k), z);
  std::vector<uint64_t> seeds(copies.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    seeds[i] = DeriveSeed(seed, "lookahead", i);
  }
  std::vector<Sample> variations = varier.VaryBatch(copies, seeds, 1);
  return MeanEmbedding(embedder.EmbedSamples(variations));
}

std::vector<Embedding> LookaheadEmbeddings(std::span<const Sample> samples,
                                           int k, const Varier& varier,
                                           const Embedder& embedder,
                                           uint64_t seed, int threads) {
  if (k < 1) throw InvalidArgumentError("lookahead K must be >= 1");
  const std::size_t kk = static_cast<std::size_t>(k);
  // Flatten all K x N variations into one batch so remote providers can
  // amortize requests.
  std::vector<Sample> copies;
  std::vector<uint64_t> seeds;
  copies.reserve(samples.size() * kk);
  seeds.reserve(samples.size() * kk);
  for (const Sample& s : samples) {
    const uint64_t sample_seed = DeriveSeed(seed, s.id);
    for (std::size_t i = 0; i < kk; ++i) {
      copies.push_back(s);
      seeds.push_back(DeriveSeed(sample_seed, "lookahead", i));
    }
  }
  std::vector<Sample> variations = varier.VaryBatch(copies, seeds, threads);
  std::vector<Embedding> embedded = embedder.EmbedSamples(variations, threads);
  std::vector<Embedding> out(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    out[s] = MeanEmbedding(
        std::span<const Embedding>(embedded).subspan(s * kk, kk));
  }
  return out;
}

}  // namespace pretext
