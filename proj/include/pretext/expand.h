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

#ifndef PRETEXT_EXPAND_H_
#define PRETEXT_EXPAND_H_

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pretext/corpus.h"

namespace pretext {

enum class GeneratorKind { kMarkov, kRemote };

struct ExpandConfig {
  int64_t target_count = 2000;
  GeneratorKind generator = GeneratorKind::kMarkov;
  std::optional<std::string> remote_url;
  int max_new_tokens = 64;
  uint64_t seed = 0;
  int max_retries = 10;
  int threads = 1;

  void Validate() const;
};

// The few-shot template, compiled in from assets/expand_prompt.txt. It holds
// the placeholders {sample_1}, {sample_2} and {sample_3}.
std::string_view PromptTemplate();

inline constexpr std::string_view kNextSampleHeader = "Original Text Sample 5";

struct ExpandPrompt {
  std::array<Sample, 3> seeds;
  std::string rendered;
};

// Throws InvalidArgumentError unless exactly three seeds are given.
ExpandPrompt BuildPrompt(std::span<const Sample> seeds);

// Text before the first "Original Text Sample 5", trimmed. std::nullopt when
// nothing is left, which tells the caller to discard and retry.
std::optional<std::string> ParseGeneration(std::string_view raw);

// Bigram walk over the three seed texts: start at a uniformly chosen seed
// token occurrence, then repeatedly move to a uniformly chosen successor
// occurrence until max_new_tokens tokens or a token without successors.
// Returns "" when the seeds have no tokens.
std::string MarkovGenerate(std::span<const Sample> seeds, int max_new_tokens,
                           uint64_t seed);

class Generator {
 public:
  virtual ~Generator() = default;
  // Raw continuation of the prompt.
  virtual std::string Generate(const ExpandPrompt& prompt, int max_new_tokens,
                               uint64_t seed) const = 0;
};

class MarkovGenerator : public Generator {
 public:
  std::string Generate(const ExpandPrompt& prompt, int max_new_tokens,
                       uint64_t seed) const override;
};

// Delegates to the sidecar's /expand endpoint.
class RemoteGenerator : public Generator {
 public:
  explicit RemoteGenerator(std::string base_url);
  std::string Generate(const ExpandPrompt& prompt, int max_new_tokens,
                       uint64_t seed) const override;

 private:
  std::string base_url_;
};

std::unique_ptr<Generator> MakeGenerator(const ExpandConfig& cfg);

// Produces exactly cfg.target_count samples "exp-{i}". Slot i draws three
// distinct seeds and generates; empty parses are retried up to
// cfg.max_retries times. target_count == 0 returns `seeds` unchanged.
std::vector<Sample> ExpandSeedSet(std::span<const Sample> seeds,
                                  const ExpandConfig& cfg,
                                  const Generator& generator);

}  // namespace pretext

#endif  // PRETEXT_EXPAND_H_
