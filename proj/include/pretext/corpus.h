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

#ifndef PRETEXT_CORPUS_H_
#define PRETEXT_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pretext {

// Splits on ASCII whitespace; runs of whitespace never produce empty tokens.
std::vector<std::string> Tokenize(std::string_view text);

std::string JoinTokens(std::span<const std::string> tokens);

// One text record. `tokens` is always the whitespace tokenization of `text`.
struct Sample {
  std::string id;
  std::string text;
  std::vector<std::string> tokens;

  static Sample Make(std::string id, std::string text);

  friend bool operator==(const Sample&, const Sample&) = default;
};

// A simulated device's private data. Only the first `cap` samples ever
// vote, which bounds the client's contribution to any histogram.
struct ClientDataset {
  int64_t client_id = 0;
  std::vector<Sample> samples;
  int64_t cap = 1;
};

struct Federation {
  std::vector<ClientDataset> train_clients;
  std::vector<Sample> eval_samples;

  // Throws InvalidArgumentError if client ids are not 0..N-1 in order or if
  // any sample id appears both in training and evaluation data.
  void Validate() const;
};

// JSON Lines with required string keys "id" and "text". Blank lines are
// skipped; unknown keys are ignored.
std::vector<Sample> ReadJsonl(std::istream& in);
std::vector<Sample> LoadJsonl(const std::filesystem::path& path);
void WriteJsonl(std::ostream& out, std::span<const Sample> samples);
void SaveJsonl(const std::filesystem::path& path,
               std::span<const Sample> samples);

// Deals a seeded uniform permutation of `samples` into `n_clients` clients
// of exactly `per_client` samples each. Surplus samples are left unused.
std::vector<ClientDataset> PartitionUniform(std::span<const Sample> samples,
                                            int64_t n_clients,
                                            int64_t per_client, uint64_t seed);

// Keeps a seeded random subset of size `cap` (in original order) when the
// client holds more than `cap` samples.
ClientDataset ClipClient(const ClientDataset& client, int64_t cap,
                         uint64_t seed);

}  // namespace pretext

#endif  // PRETEXT_CORPUS_H_
