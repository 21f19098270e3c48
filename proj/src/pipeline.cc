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

#include "pretext/pipeline.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "pretext/error.h"
#include "pretext/random.h"

namespace pretext {
namespace {

using nlohmann::json;

// Reads typed fields from a JSON object and remembers which keys were
// consumed so leftovers can be reported as typos.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where)
      : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  bool Has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_[key].is_null();
  }

  template <typename T>
  T Required(const std::string& key) {
    if (!Has(key)) throw ConfigError(Path(key) + ": required");
    return As<T>(key);
  }

  template <typename T>
  T Get(const std::string& key, T fallback) {
    return Has(key) ? As<T>(key) : fallback;
  }

  template <typename T>
  std::optional<T> Optional(const std::string& key) {
    if (!Has(key)) return std::nullopt;
    return As<T>(key);
  }

  ObjectReader Child(const std::string& key) {
    static const json kEmpty = json::object();
    return ObjectReader(Has(key) ? j_[key] : kEmpty, Path(key));
  }

  const json& Raw(const std::string& key) {
    seen_.insert(key);
    return j_[key];
  }

  std::string Path(const std::string& key) const {
    return where_.empty() ? key : where_ + "." + key;
  }

  void Finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) throw ConfigError(Path(key) + ": unknown key");
    }
  }

 private:
  template <typename T>
  T As(const std::string& key) {
    const json& v = j_[key];
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(Path(key) + ": expected a string");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) {
        throw ConfigError(Path(key) + ": expected an integer");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(Path(key) + ": expected a number");
    }
    return v.get<T>();
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view s) : s_(s) {}

  double Parse() {
    double v = Product();
    SkipSpace();
    if (pos_ != s_.size()) Fail("unexpected trailing input");
    return v;
  }

 private:
  double Product() {
    double v = Factor();
    while (true) {
      SkipSpace();
      if (Consume("*") || Consume("\xC3\x97")) {
        v *= Factor();
      } else {
        return v;
      }
    }
  }

  double Factor() {
    SkipSpace();
    if (Consume("sqrt")) {
      SkipSpace();
      if (!Consume("(")) Fail("expected '(' after sqrt");
      double inner = Product();
      SkipSpace();
      if (!Consume(")")) Fail("expected ')'");
      if (inner < 0) Fail("sqrt of a negative number");
      return std::sqrt(inner);
    }
    if (Consume("(")) {
      double inner = Product();
      SkipSpace();
      if (!Consume(")")) Fail("expected ')'");
      return inner;
    }
    // Factors are unsigned; from_chars alone would accept a leading '-'.
    if (pos_ >= s_.size() ||
        !(std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
      Fail("expected a number");
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc()) Fail("expected a number");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }

  bool Consume(std::string_view tok) {
    if (s_.substr(pos_, tok.size()) != tok) return false;
    pos_ += tok.size();
    return true;
  }

  void SkipSpace() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  [[noreturn]] void Fail(const std::string& what) const {
    throw ConfigError("expression '" + std::string(s_) + "' at offset " +
                      std::to_string(pos_) + ": " + what);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

EmbeddingKind ParseEmbeddingKind(const std::string& s) {
  if (s == "hashed-ngram") return EmbeddingKind::kHashedNgram;
  if (s == "remote") return EmbeddingKind::kRemote;
  throw ConfigError("evolution.embedding.kind: expected hashed-ngram|remote");
}

FillProviderKind ParseFillProvider(const std::string& s) {
  if (s == "unigram") return FillProviderKind::kUnigram;
  if (s == "remote") return FillProviderKind::kRemote;
  throw ConfigError("evolution.variation.provider: expected unigram|remote");
}

GeneratorKind ParseGenerator(const std::string& s) {
  if (s == "markov") return GeneratorKind::kMarkov;
  if (s == "remote") return GeneratorKind::kRemote;
  throw ConfigError("expand.generator: expected markov|remote");
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace

double EvaluateProductExpression(std::string_view expr) {
  return ExpressionParser(expr).Parse();
}

void RunConfig::Validate() const {
  if (target_epsilon.has_value() == sigma.has_value()) {
    throw ConfigError(
        "privacy: set exactly one of target_epsilon and sigma");
  }
  if (target_epsilon && !(*target_epsilon > 0)) {
    throw ConfigError("privacy.target_epsilon must be > 0");
  }
  if (sigma && !(*sigma > 0)) throw ConfigError("privacy.sigma must be > 0");
  if (!(delta > 0 && delta < 1)) throw ConfigError("privacy.delta must be in (0,1)");
  if (!(threshold_h >= 0)) throw ConfigError("privacy.threshold_h must be >= 0");
  if (n_clients < 1 || per_client < 1 || cap < 1) {
    throw ConfigError("partition: n_clients, per_client, cap must be >= 1");
  }
  if (output_dir.empty()) throw ConfigError("output_dir is required");
  try {
    EvolutionConfig e = evolution;
    e.noise.cap = cap;
    e.noise.threshold_h = threshold_h;
    e.noise.sigma = sigma.value_or(1.0);
    e.delta = delta;
    e.Validate();
    expand.Validate();
  } catch (const InvalidArgumentError& ex) {
    throw ConfigError(ex.what());
  }
}

RunConfig ParseRunConfig(const json& j, const std::filesystem::path& base_dir) {
  RunConfig c;
  ObjectReader root(j, "");

  ObjectReader data = root.Child("data");
  c.private_train = Resolve(base_dir, data.Required<std::string>("private_train"));
  c.private_eval = Resolve(base_dir, data.Required<std::string>("private_eval"));
  c.public_pool = Resolve(base_dir, data.Required<std::string>("public_pool"));
  data.Finish();

  ObjectReader part = root.Child("partition");
  c.n_clients = part.Required<int64_t>("n_clients");
  c.per_client = part.Required<int64_t>("per_client");
  c.cap = part.Get<int64_t>("cap", c.per_client);
  part.Finish();

  ObjectReader evo = root.Child("evolution");
  EvolutionConfig& e = c.evolution;
  e.t_rounds = evo.Get<int64_t>("t_rounds", e.t_rounds);
  e.n_syn = evo.Get<int64_t>("n_syn", e.n_syn);
  e.k_lookahead = evo.Get<int>("k_lookahead", e.k_lookahead);
  ObjectReader emb = evo.Child("embedding");
  e.embed.kind = ParseEmbeddingKind(emb.Get<std::string>("kind", "hashed-ngram"));
  e.embed.dim = emb.Get<int>("dim", e.embed.dim);
  e.embed.ngram_min = emb.Get<int>("ngram_min", e.embed.ngram_min);
  e.embed.ngram_max = emb.Get<int>("ngram_max", e.embed.ngram_max);
  e.embed.remote_url = emb.Optional<std::string>("remote_url");
  emb.Finish();
  ObjectReader var = evo.Child("variation");
  e.variation.mask_pct = var.Get<double>("mask_pct", e.variation.mask_pct);
  e.variation.w_steps = var.Get<int>("w_steps", e.variation.w_steps);
  e.variation.provider = ParseFillProvider(var.Get<std::string>("provider", "unigram"));
  e.variation.remote_url = var.Optional<std::string>("remote_url");
  var.Finish();
  evo.Finish();

  ObjectReader priv = root.Child("privacy");
  c.target_epsilon = priv.Optional<double>("target_epsilon");
  c.sigma = priv.Optional<double>("sigma");
  c.delta = priv.Get<double>("delta", c.delta);
  const bool has_h = priv.Has("threshold_h");
  const bool has_expr = priv.Has("threshold_h_expr");
  if (has_h && has_expr) {
    throw ConfigError("privacy: set at most one of threshold_h and threshold_h_expr");
  }
  if (has_h) c.threshold_h = priv.Required<double>("threshold_h");
  if (has_expr) {
    c.threshold_h =
        EvaluateProductExpression(priv.Required<std::string>("threshold_h_expr"));
  }
  priv.Finish();

  ObjectReader exp = root.Child("expand");
  c.expand.target_count = exp.Get<int64_t>("target_count", c.expand.target_count);
  c.expand.generator = ParseGenerator(exp.Get<std::string>("generator", "markov"));
  c.expand.remote_url = exp.Optional<std::string>("remote_url");
  c.expand.max_new_tokens = exp.Get<int>("max_new_tokens", c.expand.max_new_tokens);
  c.expand.max_retries = exp.Get<int>("max_retries", c.expand.max_retries);
  exp.Finish();

  c.output_dir = Resolve(base_dir, root.Required<std::string>("output_dir"));
  c.master_seed = root.Get<uint64_t>("master_seed", 0);
  root.Finish();

  c.Validate();
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return ParseRunConfig(j, path.parent_path());
}

PipelineResult RunPipeline(const RunConfig& config_in,
                           const PipelineOptions& options) {
  RunConfig config = config_in;
  if (options.seed_override) config.master_seed = *options.seed_override;
  config.Validate();
  const uint64_t seed = config.master_seed;

  const std::vector<Sample> train = LoadJsonl(config.private_train);
  const std::vector<Sample> eval = LoadJsonl(config.private_eval);
  const std::vector<Sample> pool = LoadJsonl(config.public_pool);

  Federation fed;
  for (const ClientDataset& c :
       PartitionUniform(train, config.n_clients, config.per_client,
                        DeriveSeed(seed, "partition"))) {
    fed.train_clients.push_back(ClipClient(c, config.cap, DeriveSeed(seed, "clip")));
  }
  fed.eval_samples = eval;
  fed.Validate();

  EvolutionConfig evo = config.evolution;
  evo.noise.cap = config.cap;
  evo.noise.threshold_h = config.threshold_h;
  evo.noise.n_train_clients = config.n_clients;
  evo.noise.sigma = config.sigma ? *config.sigma
                                 : CalibrateSigma(*config.target_epsilon,
                                                  config.delta, evo.t_rounds,
                                                  config.cap)
                                       .sigma;
  evo.delta = config.delta;
  evo.master_seed = DeriveSeed(seed, "evolution");
  evo.threads = options.threads;

  const Providers providers = MakeProviders(evo, pool);
  EvolutionResult evolved = RunEvolution(
      fed.train_clients, pool, evo, providers, [&](const RoundRecord& r) {
        if (options.progress) *options.progress << ToJson(r).dump() << '\n';
      });

  ExpandConfig expand = config.expand;
  expand.seed = DeriveSeed(seed, "expand");
  expand.threads = options.threads;
  std::unique_ptr<Generator> generator = MakeGenerator(expand);

  PipelineResult result;
  result.seeds = evolved.seed_union;
  result.synthetic = ExpandSeedSet(result.seeds, expand, *generator);
  result.privacy = evolved.report;
  result.rounds = evolved.rounds;
  result.fidelity =
      EvaluateFidelity(result.synthetic, eval, evolved.initial_population.samples,
                       *providers.embedder, options.threads);

  std::ostringstream synthetic_out, seeds_out, rounds_out;
  WriteJsonl(synthetic_out, result.synthetic);
  WriteJsonl(seeds_out, result.seeds);
  for (const RoundRecord& r : result.rounds) rounds_out << ToJson(r).dump() << '\n';

  const std::filesystem::path& dir = config.output_dir;
  std::vector<std::filesystem::path> written;
  try {
    std::filesystem::create_directories(dir);
    const std::pair<const char*, std::string> files[] = {
        {kSyntheticFile, synthetic_out.str()},
        {kSeedsFile, seeds_out.str()},
        {kPrivacyReportFile, ToJson(result.privacy).dump(2) + "\n"},
        {kFidelityReportFile, ToJson(result.fidelity).dump(2) + "\n"},
        {kRoundsLogFile, rounds_out.str()},
    };
    for (const auto& [name, body] : files) {
      written.push_back(dir / name);
      WriteText(dir / name, body);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) std::filesystem::remove(p, ec);
    throw;
  }
  return result;
}

int RunPipelineFromFile(const std::filesystem::path& config_path,
                        const PipelineOptions& options, std::ostream& err) {
  RunConfig config;
  try {
    config = LoadRunConfig(config_path);
    if (options.seed_override) config.master_seed = *options.seed_override;
    config.Validate();
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }
  try {
    RunPipeline(config, options);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "run failed: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace pretext
