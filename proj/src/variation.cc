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

#include "pretext/variation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "pretext/error.h"
#include "pretext/parallel.h"
#include "pretext/random.h"
#include "pretext/sidecar_client.h"

namespace pretext {

void VariationConfig::Validate() const {
  if (!(mask_pct >= 0.0 && mask_pct <= 1.0)) {
    throw InvalidArgumentError("mask_pct must be in [0, 1]");
  }
  if (w_steps < 0) throw InvalidArgumentError("w_steps must be >= 0");
}

FillModel::FillModel(std::vector<std::string> vocabulary,
                     std::vector<double> weights)
    : vocabulary_(std::move(vocabulary)), weights_(std::move(weights)) {
  if (vocabulary_.empty()) {
    throw InvalidArgumentError("fill model vocabulary is empty");
  }
  if (vocabulary_.size() != weights_.size()) {
    throw InvalidArgumentError("fill model vocabulary/weights length mismatch");
  }
  cumulative_.reserve(weights_.size());
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw InvalidArgumentError("negative fill weight");
    total += w;
    cumulative_.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgumentError("fill weights must sum to 1");
  }
}

std::size_t FillModel::DrawIndex(double u) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
  if (i >= cumulative_.size()) i = cumulative_.size() - 1;
  // Skip zero-weight entries that share a cumulative value with a neighbour.
  while (weights_[i] == 0.0 && i > 0) --i;
  return i;
}

FillModel TrainFillModel(std::span<const Sample> public_samples) {
  std::vector<std::string> vocab;
  std::vector<int64_t> counts;
  std::unordered_map<std::string, std::size_t> index;
  int64_t total = 0;
  for (const Sample& s : public_samples) {
    for (const std::string& tok : s.tokens) {
      auto [it, inserted] = index.try_emplace(tok, vocab.size());
      if (inserted) {
        vocab.push_back(tok);
        counts.push_back(0);
      }
      ++counts[it->second];
      ++total;
    }
  }
  if (total == 0) {
    throw InvalidArgumentError(
        "cannot train fill model: public corpus has no tokens");
  }
  std::vector<double> weights(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    weights[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return FillModel(std::move(vocab), std::move(weights));
}

std::size_t MaskCount(double mask_pct, std::size_t n_tokens) {
  if (n_tokens == 0 || mask_pct <= 0.0) return 0;
  double raw = mask_pct * static_cast<double>(n_tokens);
  auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::clamp<std::size_t>(k, 1, n_tokens);
}

Sample Vary(const Sample& s, const FillModel& fill, const VariationConfig& cfg,
            uint64_t seed, VariationTrace* trace) {
  cfg.Validate();
  std::vector<std::string> tokens = s.tokens;
  const std::size_t k = MaskCount(cfg.mask_pct, tokens.size());
  Rng rng(seed);
  std::vector<std::size_t> positions(tokens.size());
  for (int step = 0; step < cfg.w_steps; ++step) {
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    // Partial Fisher-Yates: the first k entries are a uniform k-subset.
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, positions.size() - 1);
      std::swap(positions[i], positions[pick(rng)]);
    }
    for (std::size_t i = 0; i < k; ++i) tokens[positions[i]] = fill.Draw(rng);
    if (trace) {
      trace->masked_positions.emplace_back(positions.begin(),
                                           positions.begin() + k);
    }
  }
  if (k == 0) return Sample::Make(s.id + "-var", s.text);
  return Sample::Make(s.id + "-var", JoinTokens(tokens));
}

std::vector<Sample> Varier::VaryBatch(std::span<const Sample> samples,
                                      std::span<const uint64_t> seeds,
                                      int threads) const {
  if (samples.size() != seeds.size()) {
    throw InvalidArgumentError("VaryBatch: samples/seeds length mismatch");
  }
  std::vector<Sample> out(samples.size());
  ParallelFor(samples.size(), threads,
              [&](std::size_t i) { out[i] = Vary(samples[i], seeds[i]); });
  return out;
}

UnigramVarier::UnigramVarier(FillModel fill, VariationConfig cfg)
    : fill_(std::move(fill)), cfg_(std::move(cfg)) {
  cfg_.Validate();
}

Sample UnigramVarier::Vary(const Sample& s, uint64_t seed) const {
  return pretext::Vary(s, fill_, cfg_, seed);
}

RemoteVarier::RemoteVarier(std::string base_url, VariationConfig cfg,
                           std::size_t max_batch)
    : base_url_(std::move(base_url)),
      cfg_(std::move(cfg)),
      max_batch_(std::max<std::size_t>(max_batch, 1)) {
  cfg_.Validate();
}

std::vector<std::string> RemoteVarier::Call(
    const std::vector<std::string>& texts, uint64_t seed) const {
  nlohmann::json body = {{"texts", texts},
                         {"mask_pct", cfg_.mask_pct},
                         {"steps", cfg_.w_steps},
                         {"seed", seed}};
  nlohmann::json reply = SidecarClient(base_url_).Post("/variation", body);
  if (!reply.is_object() || !reply.contains("texts") ||
      !reply["texts"].is_array() || reply["texts"].size() != texts.size()) {
    throw ProtocolError("/variation reply must carry a 'texts' array of " +
                        std::to_string(texts.size()) + " strings");
  }
  std::vector<std::string> out;
  out.reserve(texts.size());
  for (const auto& t : reply["texts"]) {
    if (!t.is_string()) throw ProtocolError("/variation: non-string text");
    out.push_back(t.get<std::string>());
  }
  return out;
}

Sample RemoteVarier::Vary(const Sample& s, uint64_t seed) const {
  return Sample::Make(s.id + "-var", Call({s.text}, seed).front());
}

std::vector<Sample> RemoteVarier::VaryBatch(std::span<const Sample> samples,
                                            std::span<const uint64_t> seeds,
                                            int threads) const {
  if (samples.size() != seeds.size()) {
    throw InvalidArgumentError("VaryBatch: samples/seeds length mismatch");
  }
  const std::size_t n_chunks = (samples.size() + max_batch_ - 1) / max_batch_;
  std::vector<Sample> out(samples.size());
  ParallelFor(n_chunks, threads, [&](std::size_t c) {
    const std::size_t begin = c * max_batch_;
    const std::size_t end = std::min(samples.size(), begin + max_batch_);
    std::vector<std::string> texts;
    // The wire call takes one seed per request; fold the per-sample seeds.
    uint64_t chunk_seed = 0;
    for (std::size_t i = begin; i < end; ++i) {
      texts.push_back(samples[i].text);
      chunk_seed = SplitMix64(chunk_seed ^ seeds[i]);
    }
    std::vector<std::string> varied = Call(texts, chunk_seed);
    for (std::size_t i = begin; i < end; ++i) {
      out[i] = Sample::Make(samples[i].id + "-var",
                            std::move(varied[i - begin]));
    }
  });
  return out;
}

std::unique_ptr<Varier> MakeVarier(const VariationConfig& cfg, FillModel fill) {
  if (cfg.provider == FillProviderKind::kRemote) {
    return std::make_unique<RemoteVarier>(ResolveSidecarUrl(cfg.remote_url),
                                          cfg);
  }
  return std::make_unique<UnigramVarier>(std::move(fill), cfg);
}

}  // namespace pretext
