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

#ifndef PRETEXT_TOY_DATA_H_
#define PRETEXT_TOY_DATA_H_

#include <cstdint>
#include <vector>

#include "pretext/corpus.h"

namespace pretext {

// Shape of a synthetic clustered corpus for desk-scale runs.
struct ToyCorpusSpec {
  int n_clusters = 4;
  int words_per_cluster = 16;
  int tokens_per_sample = 10;
  int64_t n_train = 160;
  int64_t n_eval = 40;
  int64_t n_public = 400;
  // Probability that a private token comes from its cluster's vocabulary
  // rather than the shared function-word vocabulary.
  double private_purity = 0.8;
  uint64_t seed = 7;
};

struct ToyCorpus {
  std::vector<Sample> private_train;  // ids "train-{i}"
  std::vector<Sample> private_eval;   // ids "eval-{i}"
  std::vector<Sample> public_pool;    // ids "pub-{i}"
};

// Private samples are topical: each belongs to one cluster and mostly uses
// that cluster's invented words. Public samples mix words from every
// cluster, a shared vocabulary and off-topic filler, so they are similar to
// the private data only by chance.
ToyCorpus MakeClusteredCorpus(const ToyCorpusSpec& spec);

}  // namespace pretext

#endif  // PRETEXT_TOY_DATA_H_
