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

#ifndef PRETEXT_VARIATION_H_
#define PRETEXT_VARIATION_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pretext/corpus.h"

namespace pretext {

enum class FillProviderKind { kUnigram, kRemote };

struct VariationConfig {
  double mask_pct = 0.30;
  int w_steps = 2;
  FillProviderKind provider = FillProviderKind::kUnigram;
  std::optional<std::string> remote_url;

  void Validate() const;
};

// Unigram distribution over a public vocabulary, used to fill masked slots.
class FillModel {
 public:
  // `weights` must be nonnegative, the same length as `vocabulary`, and sum
  // to 1 within 1e-9.
  FillModel(std::vector<std::string> vocabulary, std::vector<double> weights);

  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  const std::vector<double>& weights() const { return weights_; }

  template <typename URBG>
  const std::string& Draw(URBG& rng) const {
    return vocabulary_[DrawIndex(std::uniform_real_distribution<double>(
        0.0, cumulative_.back())(rng))];
  }

 private:
  std::size_t DrawIndex(double u) const;

  std::vector<std::string> vocabulary_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

// Vocabulary in first-occurrence order; weights proportional to counts.
FillModel TrainFillModel(std::span<const Sample> public_samples);

// Number of positions masked per step: ceil(mask_pct * n), guarded against
// floating-point overshoot such as 0.3 * 10 = 3.0000000000000004.
std::size_t MaskCount(double mask_pct, std::size_t n_tokens);

// Positions masked at each step, recorded when a trace is requested.
struct VariationTrace {
  std::vector<std::vector<std::size_t>> masked_positions;
};

// Applies `cfg.w_steps` rounds of mask-and-fill. Each round masks a fresh
// uniformly chosen set of MaskCount positions and refills each from `fill`.
// The output keeps the token count and has id `s.id + "-var"`.
Sample Vary(const Sample& s, const FillModel& fill, const VariationConfig& cfg,
            uint64_t seed, VariationTrace* trace = nullptr);

// Provider-independent variation interface used by the evolution loop.
class Varier {
 public:
  virtual ~Varier() = default;

  virtual Sample Vary(const Sample& s, uint64_t seed) const = 0;

  // Varies samples[i] with seeds[i]. Results are in input order.
  virtual std::vector<Sample> VaryBatch(std::span<const Sample> samples,
                                        std::span<const uint64_t> seeds,
                                        int threads) const;
};

class UnigramVarier : public Varier {
 public:
  UnigramVarier(FillModel fill, VariationConfig cfg);

  Sample Vary(const Sample& s, uint64_t seed) const override;

 private:
  FillModel fill_;
  VariationConfig cfg_;
};

// Delegates to the sidecar's /variation endpoint.
class RemoteVarier : public Varier {
 public:
  RemoteVarier(std::string base_url, VariationConfig cfg,
               std::size_t max_batch = 64);

  Sample Vary(const Sample& s, uint64_t seed) const override;
  std::vector<Sample> VaryBatch(std::span<const Sample> samples,
                                std::span<const uint64_t> seeds,
                                int threads) const override;

 private:
  std::vector<std::string> Call(const std::vector<std::string>& texts,
                                uint64_t seed) const;

  std::string base_url_;
  VariationConfig cfg_;
  std::size_t max_batch_;
};

// `fill` is only consulted for the unigram provider.
std::unique_ptr<Varier> MakeVarier(const VariationConfig& cfg, FillModel fill);

}  // namespace pretext

#endif  // PRETEXT_VARIATION_H_
