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

#include "pretext/fidelity.h"

#include <cmath>
#include <unordered_set>

#include "pretext/dp_histogram.h"
#include "pretext/error.h"
#include "pretext/parallel.h"

namespace pretext {

double MeanNearestDistance(std::span<const Embedding> queries,
                           std::span<const Embedding> refs) {
  if (queries.empty() || refs.empty()) {
    throw InvalidArgumentError("nearest distance needs non-empty sets");
  }
  double total = 0.0;
  for (const Embedding& q : queries) {
    total += Distance(q, refs[NearestIndex(q.values, refs)]);
  }
  return total / static_cast<double>(queries.size());
}

FidelityReport EvaluateFidelity(std::span<const Sample> syn,
                                std::span<const Sample> eval_set,
                                std::span<const Sample> init_pool,
                                const Embedder& embedder, int threads) {
  if (syn.empty() || eval_set.empty() || init_pool.empty()) {
    throw InvalidArgumentError("fidelity needs non-empty syn/eval/init sets");
  }
  const std::vector<Embedding> eval_emb = embedder.EmbedSamples(eval_set, threads);
  const std::vector<Embedding> syn_emb = embedder.EmbedSamples(syn, threads);
  const std::vector<Embedding> init_emb = embedder.EmbedSamples(init_pool, threads);

  std::unordered_set<std::string> distinct;
  for (const Sample& s : syn) distinct.insert(s.text);

  FidelityReport r;
  r.mean_nn_distance_eval_to_syn = MeanNearestDistance(eval_emb, syn_emb);
  r.mean_nn_distance_eval_to_init = MeanNearestDistance(eval_emb, init_emb);
  r.distinct_fraction_of_syn =
      static_cast<double>(distinct.size()) / static_cast<double>(syn.size());
  return r;
}

nlohmann::ordered_json ToJson(const FidelityReport& r) {
  nlohmann::ordered_json j;
  j["mean_nn_distance_eval_to_syn"] = r.mean_nn_distance_eval_to_syn;
  j["mean_nn_distance_eval_to_init"] = r.mean_nn_distance_eval_to_init;
  j["distinct_fraction_of_syn"] = r.distinct_fraction_of_syn;
  return j;
}

}  // namespace pretext
