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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "pretext/accountant.h"
#include "pretext/dp_histogram.h"
#include "pretext/embedder.h"
#include "pretext/error.h"
#include "pretext/evolution.h"
#include "pretext/expand.h"
#include "pretext/pipeline.h"
#include "pretext/variation.h"

namespace py = pybind11;

namespace pretext {
namespace {

py::array_t<double> ToArray(const Embedding& e) {
  return py::array_t<double>(static_cast<py::ssize_t>(e.dim()), e.values.data());
}

std::vector<Embedding> FromMatrix(const py::array_t<double, py::array::c_style |
                                                               py::array::forcecast>& m) {
  if (m.ndim() != 2) throw InvalidArgumentError("expected a 2-D array");
  std::vector<Embedding> out(static_cast<std::size_t>(m.shape(0)));
  auto r = m.unchecked<2>();
  for (py::ssize_t i = 0; i < m.shape(0); ++i) {
    out[i].values.resize(static_cast<std::size_t>(m.shape(1)));
    for (py::ssize_t j = 0; j < m.shape(1); ++j) out[i].values[j] = r(i, j);
  }
  return out;
}

py::dict ReportDict(const PrivacyReport& r) {
  return py::module_::import("json").attr("loads")(ToJson(r).dump());
}

}  // namespace
}  // namespace pretext

PYBIND11_MODULE(_pretext, m) {
  using namespace pretext;
  m.doc() = "Federated DP synthetic text: core operations.";

  // Translators run newest first, so the base class goes in first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InvalidArgumentError>(m, "InvalidArgumentError", PyExc_ValueError);

  m.def(
      "embed",
      [](const std::string& text, int dim, int ngram_min, int ngram_max) {
        return ToArray(HashedNgramEmbed(text, dim, ngram_min, ngram_max));
      },
      py::arg("text"), py::arg("dim") = 384, py::arg("ngram_min") = 3, py::arg("ngram_max") = 5,
      "Hashed character n-gram embedding, L2-normalized.");

  m.def("tokenize", &Tokenize, py::arg("text"));

  m.def(
      "vary",
      [](const std::string& text, const std::vector<std::string>& public_texts, double mask_pct,
         int w_steps, uint64_t seed) {
        std::vector<Sample> pub;
        for (std::size_t i = 0; i < public_texts.size(); ++i) {
          pub.push_back(Sample::Make("pub-" + std::to_string(i), public_texts[i]));
        }
        VariationConfig cfg;
        cfg.mask_pct = mask_pct;
        cfg.w_steps = w_steps;
        return Vary(Sample::Make("x", text), TrainFillModel(pub), cfg, seed).text;
      },
      py::arg("text"), py::arg("public_texts"), py::arg("mask_pct") = 0.30,
      py::arg("w_steps") = 2, py::arg("seed") = 0,
      "Mask-and-fill variation with a unigram model trained on public_texts.");

  m.def(
      "dp_histogram_round",
      [](const std::vector<py::array_t<double, py::array::c_style | py::array::forcecast>>&
             clients,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& candidates,
         double sigma, double threshold_h, int64_t cap, uint64_t seed, int threads) {
        std::vector<std::vector<Embedding>> emb;
        for (const auto& c : clients) emb.push_back(FromMatrix(c));
        NoiseParams p{.sigma = sigma,
                      .n_train_clients = static_cast<int64_t>(clients.size()),
                      .threshold_h = threshold_h,
                      .cap = cap};
        const auto cands = FromMatrix(candidates);
        VoteHistogram h;
        {
          py::gil_scoped_release release;
          h = DpHistogramRoundEmbedded(emb, cands, p, seed, threads);
        }
        return py::array_t<double>(static_cast<py::ssize_t>(h.counts.size()), h.counts.data());
      },
      py::arg("clients"), py::arg("candidates"), py::arg("sigma"), py::arg("threshold_h") = 0.0,
      py::arg("cap") = 8, py::arg("seed") = 0, py::arg("threads") = 1,
      "One private nearest-neighbour histogram release over pre-embedded clients.");

  m.def(
      "threshold",
      [](std::vector<double> counts, double h) {
        return Threshold({std::move(counts), HistogramStage::kAggregated}, h).counts;
      },
      py::arg("counts"), py::arg("h"));

  m.def(
      "sample_survivors",
      [](std::vector<double> hist, int64_t n, uint64_t seed) {
        return SampleSurvivorIndices({std::move(hist), HistogramStage::kThresholded}, n, seed);
      },
      py::arg("hist"), py::arg("n"), py::arg("seed") = 0);

  m.def(
      "calibrate_sigma",
      [](double epsilon, double delta, int64_t steps, int64_t cap) {
        return ReportDict(CalibrateSigma(epsilon, delta, steps, cap));
      },
      py::arg("epsilon"), py::arg("delta"), py::arg("steps"), py::arg("cap"));

  m.def(
      "account_sigma",
      [](double sigma, int64_t cap, int64_t steps, double delta) {
        return ReportDict(AccountSigma(sigma, cap, steps, delta));
      },
      py::arg("sigma"), py::arg("cap"), py::arg("steps"), py::arg("delta"));

  m.def(
      "build_prompt",
      [](const std::vector<std::string>& seeds) {
        std::vector<Sample> s;
        for (const auto& t : seeds) s.push_back(Sample::Make("seed", t));
        return BuildPrompt(s).rendered;
      },
      py::arg("seeds"));

  m.def("parse_generation", &ParseGeneration, py::arg("raw"));

  m.def(
      "markov_generate",
      [](const std::vector<std::string>& seeds, int max_new_tokens, uint64_t seed) {
        std::vector<Sample> s;
        for (const auto& t : seeds) s.push_back(Sample::Make("seed", t));
        return MarkovGenerate(s, max_new_tokens, seed);
      },
      py::arg("seeds"), py::arg("max_new_tokens") = 64, py::arg("seed") = 0);

  m.def(
      "run",
      [](const std::filesystem::path& config, std::optional<uint64_t> seed,
         std::optional<std::filesystem::path> output_dir, int threads) {
        RunConfig cfg = LoadRunConfig(config);
        if (output_dir) cfg.output_dir = *output_dir;
        PipelineResult r;
        {
          py::gil_scoped_release release;
          r = RunPipeline(cfg, {.seed_override = seed, .threads = threads});
        }
        py::dict out;
        out["n_seeds"] = r.seeds.size();
        out["n_synthetic"] = r.synthetic.size();
        out["privacy"] = ReportDict(r.privacy);
        out["fidelity"] = py::module_::import("json").attr("loads")(ToJson(r.fidelity).dump());
        out["output_dir"] = cfg.output_dir;
        return out;
      },
      py::arg("config"), py::arg("seed") = py::none(), py::arg("output_dir") = py::none(),
      py::arg("threads") = 1, "Runs the full pipeline and writes the output files.");
}
