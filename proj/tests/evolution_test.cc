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

#include "pretext/evolution.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "gtest/gtest.h"
#include "pretext/error.h"
#include "pretext/random.h"
#include "pretext/toy_data.h"
#include "test_util.h"

namespace pretext {
namespace {

using ::pretext::testing::Basis;

class IdentityVarier : public Varier {
 public:
  Sample Vary(const Sample& s, uint64_t) const override {
    Sample out = s;
    out.id += "-var";
    return out;
  }
};

Providers HashedProviders(std::shared_ptr<const Varier> varier) {
  return Providers{std::make_shared<HashedNgramEmbedder>(EmbeddingProviderConfig{}),
                   std::move(varier)};
}

std::vector<Sample> Pool(std::initializer_list<const char*> texts) {
  std::vector<Sample> out;
  int i = 0;
  for (const char* t : texts) out.push_back(Sample::Make("pub-" + std::to_string(i++), t));
  return out;
}

EvolutionConfig SmallConfig(int64_t n_syn, int64_t t_rounds) {
  EvolutionConfig cfg;
  cfg.n_syn = n_syn;
  cfg.t_rounds = t_rounds;
  cfg.k_lookahead = 2;
  cfg.noise = NoiseParams{.sigma = 0, .n_train_clients = 1, .threshold_h = 0, .cap = 8};
  cfg.master_seed = 3;
  return cfg;
}

TEST(InitPopulationTest, SingletonPoolRepeats) {
  auto pool = Pool({"only text here"});
  CandidateSet c = InitPopulation(pool, 3, 2, HashedProviders(std::make_shared<IdentityVarier>()), 1);
  ASSERT_EQ(c.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(c.samples[i].text, "only text here");
    EXPECT_EQ(c.samples[i].id, "syn-1-" + std::to_string(i));
  }
  EXPECT_EQ(c.lookahead.size(), 3u);
  // Identity variation: the lookahead mean is the plain embedding.
  EXPECT_LT(Distance(c.lookahead[0], Embed("only text here", EmbeddingProviderConfig{})), 1e-12);
}

TEST(InitPopulationTest, DrawsFromPoolWithReplacement) {
  auto pool = Pool({"a b c", "d e f"});
  Providers p = HashedProviders(std::make_shared<IdentityVarier>());
  CandidateSet c = InitPopulation(pool, 10, 1, p, 5);
  ASSERT_EQ(c.size(), 10u);
  for (const Sample& s : c.samples) EXPECT_TRUE(s.text == "a b c" || s.text == "d e f");
  EXPECT_EQ(InitPopulation(pool, 10, 1, p, 5).samples, c.samples);
  EXPECT_THROW(InitPopulation({}, 1, 1, p, 5), InvalidArgumentError);
}

TEST(SurvivorSamplingTest, PointMass) {
  VoteHistogram h{{0, 0, 5, 0}, HistogramStage::kThresholded};
  bool fallback = true;
  auto idx = SampleSurvivorIndices(h, 4, 1, &fallback);
  EXPECT_FALSE(fallback);
  EXPECT_EQ(idx, (std::vector<std::size_t>{2, 2, 2, 2}));
}

TEST(SurvivorSamplingTest, FrequenciesFollowHistogram) {
  VoteHistogram h{{1, 3}, HistogramStage::kThresholded};
  auto idx = SampleSurvivorIndices(h, 100000, 9);
  const double frac = std::count(idx.begin(), idx.end(), 1u) / 100000.0;
  EXPECT_NEAR(frac, 0.75, 0.01);
}

TEST(SurvivorSamplingTest, ZeroHistogramFallsBackToUniform) {
  const int n = 16, draws = 16000;
  VoteHistogram h{std::vector<double>(n, 0.0), HistogramStage::kThresholded};
  bool fallback = false;
  auto idx = SampleSurvivorIndices(h, draws, 4, &fallback);
  EXPECT_TRUE(fallback);
  std::vector<int> counts(n, 0);
  for (auto i : idx) ++counts[i];
  double chi2 = 0;
  const double expect = double(draws) / n;
  for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
  EXPECT_LT(chi2, 30.58);  // chi-square(15) at p = 0.01
}

TEST(SurvivorSamplingTest, RejectsInvalidHistograms) {
  EXPECT_THROW(SampleSurvivorIndices({{1, -1}, HistogramStage::kThresholded}, 1, 0),
               InvalidArgumentError);
  EXPECT_THROW(SampleSurvivorIndices({{}, HistogramStage::kThresholded}, 1, 0),
               InvalidArgumentError);
}

TEST(EvolveRoundTest, PointMassCandidateTakesOverPopulation) {
  // Every private sample sits on candidate 0.
  auto pool = Pool({"the cat sat", "a dog ran", "birds fly high"});
  EvolutionConfig cfg = SmallConfig(3, 2);
  Providers p = HashedProviders(std::make_shared<IdentityVarier>());
  EvolutionState s;
  s.population.samples = {Sample::Make("syn-1-0", "the cat sat"),
                          Sample::Make("syn-1-1", "a dog ran"),
                          Sample::Make("syn-1-2", "birds fly high")};
  for (const Sample& x : s.population.samples) {
    s.population.lookahead.push_back(p.embedder->Embed(x.text));
  }
  std::vector<std::vector<Embedding>> clients = {
      {p.embedder->Embed("the cat sat"), p.embedder->Embed("the cat sat")}};
  RoundRecord rec;
  EvolutionState next = EvolveRound(s, clients, cfg, p, true, &rec);
  ASSERT_EQ(next.surviving_history.size(), 1u);
  for (const Sample& x : next.surviving_history[0]) EXPECT_EQ(x.text, "the cat sat");
  for (const Sample& x : next.population.samples) EXPECT_EQ(x.text, "the cat sat");
  EXPECT_EQ(next.population.samples[1].id, "syn-2-1");
  EXPECT_EQ(next.seed_union.size(), 1u);
  EXPECT_EQ(next.histogram_releases, 1);
  EXPECT_EQ(rec.round, 1);
  EXPECT_EQ(rec.hist_sum_before_threshold, 2.0);
  EXPECT_EQ(rec.distinct_survivors, 1);
  EXPECT_FALSE(rec.uniform_fallback);
  EXPECT_EQ(rec.client_download_floats, 3 * 384);
  EXPECT_EQ(rec.client_upload_floats, 3);
}

TEST(EvolveRoundTest, FinalRoundKeepsSurvivorsAndTheirVectors) {
  auto pool = Pool({"x y z", "p q r"});
  EvolutionConfig cfg = SmallConfig(4, 1);
  Providers p = HashedProviders(std::make_shared<IdentityVarier>());
  EvolutionState s = StartEvolution(pool, cfg, p);
  std::vector<std::vector<Embedding>> clients = {{p.embedder->Embed("x y z")}};
  EvolutionState next = EvolveRound(s, clients, cfg, p, false);
  EXPECT_EQ(next.population.samples, next.surviving_history[0]);
  EXPECT_THROW(EvolveRound(next, clients, cfg, p), InvalidArgumentError);
}

std::vector<ClientDataset> ToyClients(const ToyCorpus& corpus, uint64_t seed) {
  auto clients = PartitionUniform(corpus.private_train, 20, 8, seed);
  for (auto& c : clients) c.cap = 8;
  return clients;
}

struct ToyRun {
  ToyCorpus corpus = MakeClusteredCorpus(ToyCorpusSpec{});
  EvolutionConfig cfg;
  Providers providers;

  explicit ToyRun(double sigma, uint64_t seed) {
    cfg.t_rounds = 5;
    cfg.n_syn = 64;
    cfg.k_lookahead = 4;
    cfg.noise = NoiseParams{.sigma = sigma, .n_train_clients = 20, .threshold_h = 0, .cap = 8};
    cfg.master_seed = seed;
    providers = MakeProviders(cfg, corpus.public_pool);
  }
  EvolutionResult Run(int threads = 1) {
    cfg.threads = threads;
    return RunEvolution(ToyClients(corpus, cfg.master_seed), corpus.public_pool, cfg,
                        providers);
  }
};

TEST(RunEvolutionTest, DeterministicAcrossThreadCounts) {
  ToyRun run(4.0, 11);
  EvolutionResult a = run.Run(1);
  EvolutionResult b = run.Run(4);
  EXPECT_EQ(a.seed_union, b.seed_union);
  EXPECT_EQ(a.final_state.population.samples, b.final_state.population.samples);
  EXPECT_EQ(a.final_state.population.lookahead, b.final_state.population.lookahead);
  ToyRun other(4.0, 12);
  EXPECT_NE(other.Run().seed_union, a.seed_union);
}

TEST(RunEvolutionTest, StructuralInvariants) {
  ToyRun run(4.0, 5);
  std::vector<RoundRecord> seen;
  EvolutionResult r =
      RunEvolution(ToyClients(run.corpus, 5), run.corpus.public_pool, run.cfg, run.providers,
                   [&](const RoundRecord& rec) { seen.push_back(rec); });
  EXPECT_EQ(r.report.steps, run.cfg.t_rounds);
  EXPECT_EQ(r.final_state.histogram_releases, run.cfg.t_rounds);
  ASSERT_EQ(seen.size(), static_cast<std::size_t>(run.cfg.t_rounds));
  EXPECT_EQ(r.final_state.surviving_history.size(), static_cast<std::size_t>(run.cfg.t_rounds));
  EXPECT_EQ(r.final_state.population.size(), static_cast<std::size_t>(run.cfg.n_syn));
  EXPECT_EQ(r.initial_population.size(), static_cast<std::size_t>(run.cfg.n_syn));

  int64_t prev = 0;
  for (const RoundRecord& rec : seen) {
    EXPECT_GE(rec.seed_union_size, prev);
    prev = rec.seed_union_size;
  }
  EXPECT_EQ(prev, static_cast<int64_t>(r.seed_union.size()));

  std::set<std::string> texts;
  for (const Sample& s : r.seed_union) {
    EXPECT_TRUE(texts.insert(s.text).second) << "duplicate seed text";
    EXPECT_EQ(s.id.rfind("syn-", 0), 0u);
  }
  std::set<std::string> union_from_history;
  for (const auto& surv : r.final_state.surviving_history) {
    EXPECT_EQ(surv.size(), static_cast<std::size_t>(run.cfg.n_syn));
    for (const Sample& s : surv) union_from_history.insert(s.text);
  }
  EXPECT_EQ(texts, union_from_history);
}

TEST(RunEvolutionTest, SurvivorsComeFromThePopulation) {
  ToyRun run(2.0, 8);
  auto clients = ToyClients(run.corpus, 8);
  EvolutionState s = StartEvolution(run.corpus.public_pool, run.cfg, run.providers);
  for (int64_t t = 1; t <= run.cfg.t_rounds; ++t) {
    std::set<std::string> ids;
    for (const Sample& x : s.population.samples) ids.insert(x.id);
    s = EvolveRound(std::move(s), clients, run.cfg, run.providers, t < run.cfg.t_rounds);
    for (const Sample& x : s.surviving_history.back()) EXPECT_TRUE(ids.count(x.id)) << x.id;
  }
}

TEST(RunEvolutionTest, SingleRoundAndReportIndependentOfData) {
  ToyRun run(0.0, 2);
  run.cfg.t_rounds = 1;
  EvolutionResult r = run.Run();
  EXPECT_EQ(r.report.steps, 1);
  EXPECT_TRUE(std::isinf(r.report.epsilon));
  ToyRun noisy(9.0, 2);
  PrivacyReport a = noisy.Run().report;
  noisy.corpus = MakeClusteredCorpus(ToyCorpusSpec{.seed = 99});
  PrivacyReport b = noisy.Run().report;
  EXPECT_EQ(ToJson(a), ToJson(b));
}

TEST(RunEvolutionTest, RejectsUnclippedClients) {
  ToyRun run(1.0, 1);
  auto clients = ToyClients(run.corpus, 1);
  run.cfg.noise.cap = 4;
  EXPECT_THROW(RunEvolution(clients, run.corpus.public_pool, run.cfg, run.providers),
               InvalidArgumentError);
}

TEST(RunEvolutionTest, NoiselessRunMovesTowardPrivateData) {
  ToyRun run(0.0, 1);
  EvolutionResult r = run.Run(2);
  HashedNgramEmbedder e{EmbeddingProviderConfig{}};
  auto nn = [&](const std::vector<Sample>& refs) {
    auto ref_emb = e.EmbedSamples(refs);
    double total = 0;
    for (const Sample& q : run.corpus.private_eval) {
      Embedding qe = e.Embed(q.text);
      double best = 1e9;
      for (const auto& x : ref_emb) best = std::min(best, Distance(qe, x));
      total += best;
    }
    return total / run.corpus.private_eval.size();
  };
  EXPECT_LT(nn(r.seed_union), nn(r.initial_population.samples));
}

TEST(RoundRecordTest, JsonFields) {
  RoundRecord rec{.round = 2, .distinct_survivors = 3};
  auto j = ToJson(rec);
  EXPECT_EQ(j["round"], 2);
  EXPECT_EQ(j["distinct_survivors"], 3);
  EXPECT_TRUE(j.contains("client_download_floats"));
  EXPECT_TRUE(j.contains("uniform_fallback"));
}

}  // namespace
}  // namespace pretext
