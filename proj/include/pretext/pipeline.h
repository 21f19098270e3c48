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

#ifndef PRETEXT_PIPELINE_H_
#define PRETEXT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

#include "json.hpp"
#include "pretext/evolution.h"
#include "pretext/expand.h"
#include "pretext/fidelity.h"

namespace pretext {

// Everything a `pretext run` needs. Relative paths are resolved against the
// directory holding the config file.
struct RunConfig {
  std::filesystem::path private_train;
  std::filesystem::path private_eval;
  std::filesystem::path public_pool;

  int64_t n_clients = 0;
  int64_t per_client = 0;
  int64_t cap = 0;

  // Evolution settings. noise.sigma / noise.cap / noise.threshold_h are
  // filled from the privacy block and the partition cap.
  EvolutionConfig evolution;

  // Exactly one of these is set.
  std::optional<double> target_epsilon;
  std::optional<double> sigma;
  double delta = 3e-6;
  double threshold_h = 0.0;

  ExpandConfig expand;

  std::filesystem::path output_dir;
  uint64_t master_seed = 0;

  void Validate() const;
};

// Evaluates a product of positive factors such as "5.9 × 8.0 × 1.541 ×
// sqrt(2)". Accepts numbers, '*' or '×', sqrt(...) and parentheses.
double EvaluateProductExpression(std::string_view expr);

// Throws ConfigError on unknown keys, wrong types or invalid values.
RunConfig ParseRunConfig(const nlohmann::json& j,
                         const std::filesystem::path& base_dir);
RunConfig LoadRunConfig(const std::filesystem::path& path);

struct PipelineOptions {
  std::optional<uint64_t> seed_override;
  int threads = 1;
  // Receives each per-round JSON record as it is produced.
  std::ostream* progress = nullptr;
};

struct PipelineResult {
  std::vector<Sample> seeds;
  std::vector<Sample> synthetic;
  PrivacyReport privacy;
  FidelityReport fidelity;
  std::vector<RoundRecord> rounds;
};

inline constexpr char kSyntheticFile[] = "synthetic.jsonl";
inline constexpr char kSeedsFile[] = "seeds.jsonl";
inline constexpr char kPrivacyReportFile[] = "privacy_report.json";
inline constexpr char kFidelityReportFile[] = "fidelity_report.json";
inline constexpr char kRoundsLogFile[] = "rounds.log.jsonl";

// partition -> clip -> evolution -> expansion -> reports. Writes the five
// output files; on failure any file already written is removed.
PipelineResult RunPipeline(const RunConfig& config,
                           const PipelineOptions& options = {});

// CLI wrapper: 0 on success, 2 for configuration errors, 1 otherwise.
// Diagnostics go to `err`.
int RunPipelineFromFile(const std::filesystem::path& config_path,
                        const PipelineOptions& options, std::ostream& err);

}  // namespace pretext

#endif  // PRETEXT_PIPELINE_H_
