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

#include "pretext/corpus.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include "json.hpp"
#include "pretext/error.h"
#include "pretext/random.h"

namespace pretext {
namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !IsSpace(text[i])) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

std::string JoinTokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

Sample Sample::Make(std::string id, std::string text) {
  Sample s;
  s.id = std::move(id);
  s.tokens = Tokenize(text);
  s.text = std::move(text);
  return s;
}

void Federation::Validate() const {
  std::unordered_set<std::string> train_ids;
  for (std::size_t i = 0; i < train_clients.size(); ++i) {
    if (train_clients[i].client_id != static_cast<int64_t>(i)) {
      throw InvalidArgumentError("client ids must be 0..N-1 in order; got " +
                                 std::to_string(train_clients[i].client_id) +
                                 " at position " + std::to_string(i));
    }
    for (const Sample& s : train_clients[i].samples) train_ids.insert(s.id);
  }
  for (const Sample& s : eval_samples) {
    if (train_ids.contains(s.id)) {
      throw InvalidArgumentError("sample id '" + s.id +
                                 "' is in both train and eval sets");
    }
  }
}

std::vector<Sample> ReadJsonl(std::istream& in) {
  std::vector<Sample> samples;
  std::unordered_set<std::string> seen;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), IsSpace)) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": invalid JSON: " + e.what());
    }
    if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
        !obj.contains("text") || !obj["text"].is_string()) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected an object with string keys \"id\" and "
                       "\"text\"");
    }
    std::string id = obj["id"].get<std::string>();
    if (id.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": empty id");
    }
    if (!seen.insert(id).second) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": duplicate id '" + id + "'");
    }
    samples.push_back(Sample::Make(std::move(id), obj["text"].get<std::string>()));
  }
  return samples;
}

std::vector<Sample> LoadJsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return ReadJsonl(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void WriteJsonl(std::ostream& out, std::span<const Sample> samples) {
  for (const Sample& s : samples) {
    nlohmann::json obj = {{"id", s.id}, {"text", s.text}};
    out << obj.dump() << '\n';
  }
}

void SaveJsonl(const std::filesystem::path& path,
               std::span<const Sample> samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  WriteJsonl(out, samples);
  if (!out) throw Error("write failed: " + path.string());
}

std::vector<ClientDataset> PartitionUniform(std::span<const Sample> samples,
                                            int64_t n_clients,
                                            int64_t per_client, uint64_t seed) {
  if (n_clients < 1 || per_client < 1) {
    throw InvalidArgumentError("n_clients and per_client must be >= 1");
  }
  const int64_t required = n_clients * per_client;
  if (static_cast<int64_t>(samples.size()) < required) {
    throw InvalidArgumentError(
        "not enough samples to partition: required " +
        std::to_string(required) + ", available " +
        std::to_string(samples.size()));
  }
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(DeriveSeed(seed, "partition"));
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<ClientDataset> clients(static_cast<std::size_t>(n_clients));
  for (int64_t c = 0; c < n_clients; ++c) {
    ClientDataset& client = clients[static_cast<std::size_t>(c)];
    client.client_id = c;
    client.cap = per_client;
    client.samples.reserve(static_cast<std::size_t>(per_client));
    for (int64_t j = 0; j < per_client; ++j) {
      client.samples.push_back(
          samples[order[static_cast<std::size_t>(c * per_client + j)]]);
    }
  }
  return clients;
}

ClientDataset ClipClient(const ClientDataset& client, int64_t cap,
                         uint64_t seed) {
  if (cap < 1) throw InvalidArgumentError("cap must be >= 1");
  ClientDataset out;
  out.client_id = client.client_id;
  out.cap = cap;
  if (static_cast<int64_t>(client.samples.size()) <= cap) {
    out.samples = client.samples;
    return out;
  }
  std::vector<std::size_t> order(client.samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(DeriveSeed(seed, "clip", static_cast<uint64_t>(client.client_id)));
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(static_cast<std::size_t>(cap));
  std::sort(order.begin(), order.end());
  out.samples.reserve(order.size());
  for (std::size_t i : order) out.samples.push_back(client.samples[i]);
  return out;
}

}  // namespace pretext
