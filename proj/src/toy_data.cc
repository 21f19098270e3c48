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

#include "pretext/toy_data.h"

#include <string>
#include <unordered_set>

#include "pretext/error.h"
#include "pretext/random.h"

namespace pretext {
namespace {

std::vector<std::string> InventWords(int count, Rng& rng,
                                     std::unordered_set<std::string>& used) {
  static constexpr char kConsonants[] = "bcdfghjklmnprstvwz";
  static constexpr char kVowels[] = "aeiou";
  std::uniform_int_distribution<int> syllables(2, 3);
  std::uniform_int_distribution<std::size_t> cons(0, sizeof(kConsonants) - 2);
  std::uniform_int_distribution<std::size_t> vow(0, sizeof(kVowels) - 2);
  std::vector<std::string> words;
  while (static_cast<int>(words.size()) < count) {
    std::string w;
    const int n = syllables(rng);
    for (int i = 0; i < n; ++i) {
      w.push_back(kConsonants[cons(rng)]);
      w.push_back(kVowels[vow(rng)]);
    }
    w.push_back(kConsonants[cons(rng)]);
    if (used.insert(w).second) words.push_back(std::move(w));
  }
  return words;
}

const std::string& PickFrom(const std::vector<std::string>& words, Rng& rng) {
  return words[std::uniform_int_distribution<std::size_t>(0, words.size() - 1)(
      rng)];
}

}  // namespace

ToyCorpus MakeClusteredCorpus(const ToyCorpusSpec& spec) {
  if (spec.n_clusters < 1 || spec.words_per_cluster < 1 ||
      spec.tokens_per_sample < 1) {
    throw InvalidArgumentError("toy corpus: sizes must be >= 1");
  }
  Rng rng(DeriveSeed(spec.seed, "toy-corpus"));
  std::unordered_set<std::string> used;
  std::vector<std::vector<std::string>> topics;
  for (int c = 0; c < spec.n_clusters; ++c) {
    topics.push_back(InventWords(spec.words_per_cluster, rng, used));
  }
  const std::vector<std::string> shared = InventWords(12, rng, used);
  const std::vector<std::string> filler =
      InventWords(spec.words_per_cluster * 2, rng, used);

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> cluster(0, spec.n_clusters - 1);

  auto private_text = [&] {
    const auto& topic = topics[static_cast<std::size_t>(cluster(rng))];
    std::vector<std::string> toks;
    for (int i = 0; i < spec.tokens_per_sample; ++i) {
      toks.push_back(coin(rng) < spec.private_purity ? PickFrom(topic, rng)
                                                     : PickFrom(shared, rng));
    }
    return JoinTokens(toks);
  };
  auto public_text = [&] {
    std::vector<std::string> toks;
    for (int i = 0; i < spec.tokens_per_sample; ++i) {
      const double u = coin(rng);
      if (u < 0.4) {
        toks.push_back(PickFrom(topics[static_cast<std::size_t>(cluster(rng))], rng));
      } else if (u < 0.6) {
        toks.push_back(PickFrom(shared, rng));
      } else {
        toks.push_back(PickFrom(filler, rng));
      }
    }
    return JoinTokens(toks);
  };

  ToyCorpus out;
  for (int64_t i = 0; i < spec.n_train; ++i) {
    out.private_train.push_back(
        Sample::Make("train-" + std::to_string(i), private_text()));
  }
  for (int64_t i = 0; i < spec.n_eval; ++i) {
    out.private_eval.push_back(
        Sample::Make("eval-" + std::to_string(i), private_text()));
  }
  for (int64_t i = 0; i < spec.n_public; ++i) {
    out.public_pool.push_back(
        Sample::Make("pub-" + std::to_string(i), public_text()));
  }
  return out;
}

}  // namespace pretext
