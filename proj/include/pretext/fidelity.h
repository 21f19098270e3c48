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

#ifndef PRETEXT_FIDELITY_H_
#define PRETEXT_FIDELITY_H_

#include <span>

#include "json.hpp"
#include "pretext/corpus.h"
#include "pretext/embedder.h"

namespace pretext {

struct FidelityReport {
  double mean_nn_distance_eval_to_syn = 0.0;
  double mean_nn_distance_eval_to_init = 0.0;
  double distinct_fraction_of_syn = 0.0;
};

// Mean over queries of the exact nearest-reference Euclidean distance.
double MeanNearestDistance(std::span<const Embedding> queries,
                           std::span<const Embedding> refs);

FidelityReport EvaluateFidelity(std::span<const Sample> syn,
                                std::span<const Sample> eval_set,
                                std::span<const Sample> init_pool,
                                const Embedder& embedder, int threads = 1);

nlohmann::ordered_json ToJson(const FidelityReport& report);

}  // namespace pretext

#endif  // PRETEXT_FIDELITY_H_
