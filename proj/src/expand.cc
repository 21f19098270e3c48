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

#include "pretext/expand.h"

#include <unordered_map>

#include "pretext/error.h"
#include "pretext/parallel.h"
#include "pretext/random.h"
#include "pretext/sidecar_client.h"
#include "prompt_template.inc"

namespace pretext {
namespace {

void ReplaceOnce(std::string& s, std::string_view key, std::string_view value) {
  const std::size_t pos = s.find(key);
  if (pos == std::string::npos) {
    throw Error("prompt template lacks placeholder " + std::string(key));
  }
  s.replace(pos, key.size(), value);
}

std::string_view Trim(std::string_view s) {
  const char* ws = " \t\n\r\f\v";
  const std::size_t begin = s.find_first_not_of(ws);
  if (begin == std::string_view::npos) return {};
  return s.substr(begin, s.find_last_not_of(ws) - begin + 1);
}

}  // namespace

void ExpandConfig::Validate() const {
  if (target_count < 0) throw InvalidArgumentError("target_count must be >= 0");
  if (max_new_tokens < 1) {
    throw InvalidArgumentError("max_new_tokens must be >= 1");
  }
  if (max_retries < 1) throw InvalidArgumentError("max_retries must be >= 1");
}

std::string_view PromptTemplate() { return kExpandPromptTemplate; }

ExpandPrompt BuildPrompt(std::span<const Sample> seeds) {
  if (seeds.size() != 3) {
    throw InvalidArgumentError("expand prompts take exactly 3 seeds, got " +
                               std::to_string(seeds.size()));
  }
  ExpandPrompt prompt{{seeds[0], seeds[1], seeds[2]},
                      std::string(PromptTemplate())};
  // Substitute back to front so seed text containing a placeholder string
  // is never expanded again.
  ReplaceOnce(prompt.rendered, "{sample_3}", seeds[2].text);
  ReplaceOnce(prompt.rendered, "{sample_2}", seeds[1].text);
  ReplaceOnce(prompt.rendered, "{sample_1}", seeds[0].text);
  return prompt;
}

std::optional<std::string> ParseGeneration(std::string_view raw) {
  const std::size_t cut = raw.find(kNextSampleHeader);
  std::string_view body = Trim(raw.substr(0, cut));
  if (body.empty()) return std::nullopt;
  return std::string(body);
}

std::string MarkovGenerate(std::span<const Sample> seeds, int max_new_tokens,
                           uint64_t seed) {
  std::vector<const std::string*> occurrences;
  std::unordered_map<std::string, std::vector<const std::string*>> successors;
  for (const Sample& s : seeds) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      occurrences.push_back(&s.tokens[i]);
      if (i + 1 < s.tokens.size()) {
        successors[s.tokens[i]].push_back(&s.tokens[i + 1]);
      }
    }
  }
  if (occurrences.empty() || max_new_tokens < 1) return "";
  Rng rng(seed);
  auto uniform = [&rng](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };
  std::vector<std::string> out;
  const std::string* current = occurrences[uniform(occurrences.size())];
  out.push_back(*current);
  while (static_cast<int>(out.size()) < max_new_tokens) {
    auto it = successors.find(*current);
    if (it == successors.end()) break;
    current = it->second[uniform(it->second.size())];
    out.push_back(*current);
  }
  return JoinTokens(out);
}

std::string MarkovGenerator::Generate(const ExpandPrompt& prompt,
                                      int max_new_tokens, uint64_t seed) const {
  return MarkovGenerate(prompt.seeds, max_new_tokens, seed);
}

RemoteGenerator::RemoteGenerator(std::string base_url)
    : base_url_(std::move(base_url)) {}

std::string RemoteGenerator::Generate(const ExpandPrompt& prompt,
                                      int max_new_tokens, uint64_t seed) const {
  nlohmann::json body = {{"prompt", prompt.rendered},
                         {"max_new_tokens", max_new_tokens},
                         {"seed", seed}};
  nlohmann::json reply = SidecarClient(base_url_).Post("/expand", body);
  if (!reply.is_object() || !reply.contains("text") ||
      !reply["text"].is_string()) {
    throw ProtocolError("/expand reply must carry a string 'text'");
  }
  return reply["text"].get<std::string>();
}

std::unique_ptr<Generator> MakeGenerator(const ExpandConfig& cfg) {
  if (cfg.generator == GeneratorKind::kRemote) {
    return std::make_unique<RemoteGenerator>(ResolveSidecarUrl(cfg.remote_url));
  }
  return std::make_unique<MarkovGenerator>();
}

std::vector<Sample> ExpandSeedSet(std::span<const Sample> seeds,
                                  const ExpandConfig& cfg,
                                  const Generator& generator) {
  cfg.Validate();
  if (cfg.target_count == 0) return {seeds.begin(), seeds.end()};
  if (seeds.size() < 3) {
    throw InvalidArgumentError("expansion needs at least 3 seeds, got " +
                               std::to_string(seeds.size()));
  }
  std::vector<Sample> out(static_cast<std::size_t>(cfg.target_count));
  ParallelFor(out.size(), cfg.threads, [&](std::size_t slot) {
    const uint64_t slot_seed = DeriveSeed(cfg.seed, "expand-slot", slot);
    Rng rng(DeriveSeed(slot_seed, "pick-seeds"));
    for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
      std::array<std::size_t, 3> idx{};
      for (std::size_t k = 0; k < 3; ++k) {
        // Sequential rejection keeps the three picks distinct.
        std::uniform_int_distribution<std::size_t> pick(0, seeds.size() - 1);
        do {
          idx[k] = pick(rng);
        } while ((k > 0 && idx[k] == idx[0]) || (k > 1 && idx[k] == idx[1]));
      }
      const Sample chosen[3] = {seeds[idx[0]], seeds[idx[1]], seeds[idx[2]]};
      ExpandPrompt prompt = BuildPrompt(chosen);
      std::optional<std::string> text = ParseGeneration(generator.Generate(
          prompt, cfg.max_new_tokens,
          DeriveSeed(slot_seed, "generate", static_cast<uint64_t>(attempt))));
      if (text) {
        out[slot] = Sample::Make("exp-" + std::to_string(slot), std::move(*text));
        return;
      }
    }
    throw Error("expansion slot " + std::to_string(slot) + " exhausted " +
                std::to_string(cfg.max_retries) + " retries");
  });
  return out;
}

}  // namespace pretext
