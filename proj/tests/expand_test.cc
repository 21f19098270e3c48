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

#include <mutex>
#include <set>
#include <utility>

#include "gtest/gtest.h"
#include "pretext/error.h"
#include "test_util.h"

namespace pretext {
namespace {

std::vector<Sample> Seeds(std::initializer_list<const char*> texts) {
  std::vector<Sample> out;
  int i = 0;
  for (const char* t : texts) out.push_back(Sample::Make("syn-1-" + std::to_string(i++), t));
  return out;
}

class ScriptedGenerator : public Generator {
 public:
  explicit ScriptedGenerator(std::string reply) : reply_(std::move(reply)) {}
  std::string Generate(const ExpandPrompt&, int, uint64_t) const override { return reply_; }

 private:
  std::string reply_;
};

// Records every prompt it sees, so tests can inspect what reached the model.
class RecordingGenerator : public Generator {
 public:
  std::string Generate(const ExpandPrompt& p, int, uint64_t) const override {
    std::lock_guard<std::mutex> lock(mu_);
    prompts_.push_back(p);
    return "ok";
  }
  std::vector<ExpandPrompt> prompts() const { return prompts_; }

 private:
  mutable std::mutex mu_;
  mutable std::vector<ExpandPrompt> prompts_;
};

TEST(PromptTest, TemplateMatchesAssetByteForByte) {
  const std::string asset = pretext::testing::ReadFile(
      std::filesystem::path(PRETEXT_SOURCE_DIR) / "assets" / "expand_prompt.txt");
  ASSERT_FALSE(asset.empty());
  EXPECT_EQ(PromptTemplate(), asset);
}

TEST(PromptTest, FillsSeedsInOrder) {
  auto seeds = Seeds({"A", "B", "C"});
  ExpandPrompt p = BuildPrompt(seeds);
  std::string expected(PromptTemplate());
  auto put = [&](std::string_view key, std::string_view v) {
    expected.replace(expected.find(key), key.size(), v);
  };
  put("{sample_1}", "A");
  put("{sample_2}", "B");
  put("{sample_3}", "C");
  EXPECT_EQ(p.rendered, expected);
  EXPECT_NE(p.rendered.find("Original Text Sample 1:\nA\n\nOriginal Text Sample 2:\nB\n\n"
                            "Original Text Sample 3:\nC\n\nOriginal Text Sample 4:\n"),
            std::string::npos);
  EXPECT_EQ(p.rendered.find("{sample_"), std::string::npos);
  EXPECT_EQ(p.seeds[2].text, "C");
}

TEST(PromptTest, PlaceholderTextInsideSeedsIsNotReexpanded) {
  auto seeds = Seeds({"{sample_2}", "B", "C"});
  ExpandPrompt p = BuildPrompt(seeds);
  EXPECT_NE(p.rendered.find("Original Text Sample 1:\n{sample_2}\n"), std::string::npos);
}

TEST(PromptTest, RequiresExactlyThreeSeeds) {
  auto two = Seeds({"a", "b"});
  auto four = Seeds({"a", "b", "c", "d"});
  EXPECT_THROW(BuildPrompt(two), InvalidArgumentError);
  EXPECT_THROW(BuildPrompt(four), InvalidArgumentError);
}

TEST(ParseGenerationTest, Examples) {
  EXPECT_EQ(ParseGeneration("hello world\nOriginal Text Sample 5: junk"), "hello world");
  EXPECT_EQ(ParseGeneration("Original Text Sample 5 x"), std::nullopt);
  EXPECT_EQ(ParseGeneration("  padded \n"), "padded");
  EXPECT_EQ(ParseGeneration(""), std::nullopt);
  EXPECT_EQ(ParseGeneration(" \n\t "), std::nullopt);
}

TEST(MarkovGenerateTest, Examples) {
  auto same = Seeds({"a b", "a b", "a b"});
  for (uint64_t s = 0; s < 20; ++s) {
    const std::string g = MarkovGenerate(same, 10, s);
    EXPECT_TRUE(g == "a b" || g == "b") << g;
  }
  auto single = Seeds({"x", "x", "x"});
  EXPECT_EQ(MarkovGenerate(single, 10, 4), "x");
  auto empty = Seeds({"", "", ""});
  EXPECT_EQ(MarkovGenerate(empty, 10, 4), "");
  auto chain = Seeds({"one two three", "four five", "six"});
  for (uint64_t s = 0; s < 50; ++s) {
    std::string g = MarkovGenerate(chain, 64, s);
    EXPECT_TRUE(g == "one two three" || g == "two three" || g == "three" ||
                g == "four five" || g == "five" || g == "six")
        << g;
  }
}

TEST(MarkovGenerateTest, RespectsTokenBudget) {
  auto loop = Seeds({"a a a a", "a", "a"});
  EXPECT_EQ(Tokenize(MarkovGenerate(loop, 7, 1)).size(), 7u);
  EXPECT_EQ(MarkovGenerate(loop, 0, 1), "");
}

TEST(MarkovGenerateTest, BigramsAreClosedOverSeeds) {
  auto seeds = Seeds({"the quick brown fox jumps", "a quick red fox runs far",
                      "the lazy dog sleeps in the sun"});
  std::set<std::pair<std::string, std::string>> bigrams;
  std::set<std::string> vocab;
  for (const Sample& s : seeds) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      vocab.insert(s.tokens[i]);
      if (i + 1 < s.tokens.size()) bigrams.emplace(s.tokens[i], s.tokens[i + 1]);
    }
  }
  for (uint64_t s = 0; s < 1000; ++s) {
    auto toks = Tokenize(MarkovGenerate(seeds, 20, s));
    ASSERT_FALSE(toks.empty());
    ASSERT_LE(toks.size(), 20u);
    for (std::size_t i = 0; i < toks.size(); ++i) {
      EXPECT_TRUE(vocab.count(toks[i]));
      if (i + 1 < toks.size()) EXPECT_TRUE(bigrams.count({toks[i], toks[i + 1]}));
    }
  }
}

TEST(ExpandSeedSetTest, ZeroTargetReturnsSeeds) {
  auto seeds = Seeds({"a", "b"});
  ExpandConfig cfg;
  cfg.target_count = 0;
  EXPECT_EQ(ExpandSeedSet(seeds, cfg, MarkovGenerator()), seeds);
}

TEST(ExpandSeedSetTest, ProducesTargetCountFromSeedVocabulary) {
  auto seeds = Seeds({"a b a", "b a", "a a b b"});
  ExpandConfig cfg;
  cfg.target_count = 100;
  cfg.max_new_tokens = 8;
  cfg.seed = 12;
  auto out = ExpandSeedSet(seeds, cfg, MarkovGenerator());
  ASSERT_EQ(out.size(), 100u);
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(out[i].id, "exp-" + std::to_string(i));
    ASSERT_FALSE(out[i].tokens.empty());
    for (const auto& t : out[i].tokens) EXPECT_TRUE(t == "a" || t == "b") << t;
  }
  cfg.threads = 4;
  EXPECT_EQ(ExpandSeedSet(seeds, cfg, MarkovGenerator()), out);
}

TEST(ExpandSeedSetTest, RetriesExhaustAndFail) {
  auto seeds = Seeds({"a", "b", "c"});
  ExpandConfig cfg;
  cfg.target_count = 2;
  cfg.max_retries = 3;
  EXPECT_THROW(ExpandSeedSet(seeds, cfg, ScriptedGenerator("Original Text Sample 5")), Error);
  EXPECT_EQ(ExpandSeedSet(seeds, cfg, ScriptedGenerator(" fine \n")).at(1).text, "fine");
  auto two = Seeds({"a", "b"});
  EXPECT_THROW(ExpandSeedSet(two, cfg, MarkovGenerator()), InvalidArgumentError);
}

TEST(ExpandSeedSetTest, PromptsOnlyCarryDistinctSeeds) {
  auto seeds = Seeds({"s0", "s1", "s2", "s3", "s4"});
  ExpandConfig cfg;
  cfg.target_count = 200;
  RecordingGenerator gen;
  ExpandSeedSet(seeds, cfg, gen);
  auto prompts = gen.prompts();
  ASSERT_EQ(prompts.size(), 200u);
  for (const ExpandPrompt& p : prompts) {
    std::set<std::string> ids;
    for (const Sample& s : p.seeds) {
      EXPECT_EQ(s.id.rfind("syn-", 0), 0u);
      ids.insert(s.id);
    }
    EXPECT_EQ(ids.size(), 3u);
    EXPECT_EQ(p.rendered.find("train-"), std::string::npos);
  }
}

}  // namespace
}  // namespace pretext
