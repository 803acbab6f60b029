// Copyright 2026 The aadocre Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aadocre/anaphor_graph.hpp"
#include "aadocre/corpus.hpp"
#include "aadocre/errors.hpp"
#include "aadocre/gradcheck.hpp"
#include "aadocre/inference.hpp"
#include "aadocre/model.hpp"
#include "aadocre/synthetic.hpp"
#include "aadocre/trainer.hpp"

namespace py = pybind11;
using namespace aadocre;

namespace {

Corpus with_parses(Corpus corpus, const std::string& parses_text) {
  if (!parses_text.empty()) attach_parses(corpus.docs, parse_parses(parses_text));
  return corpus;
}

std::vector<std::size_t> anaphor_counts(const std::vector<Document>& docs, bool exclude_overlap) {
  std::vector<std::size_t> counts;
  for (const auto& d : docs)
    counts.push_back(d.parse.empty() ? 0 : extract_anaphors(d, {exclude_overlap}).size());
  return counts;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Anaphor-assisted document-level relation extraction";
  m.attr("__version__") = "0.1.0";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<Mention>(m, "Mention")
      .def_readonly("sent_id", &Mention::sent_id)
      .def_readonly("start", &Mention::start)
      .def_readonly("end", &Mention::end)
      .def_readonly("surface", &Mention::surface)
      .def_readonly("type", &Mention::type);
  py::class_<Entity>(m, "Entity")
      .def_readonly("entity_id", &Entity::entity_id)
      .def_readonly("mentions", &Entity::mentions)
      .def_readonly("type", &Entity::type);
  py::class_<RelationFact>(m, "RelationFact")
      .def_readonly("head", &RelationFact::head)
      .def_readonly("tail", &RelationFact::tail)
      .def_readonly("relation", &RelationFact::relation)
      .def_readonly("evidence", &RelationFact::evidence);
  py::class_<Document>(m, "Document")
      .def_readonly("doc_id", &Document::doc_id)
      .def_readonly("sentences", &Document::sentences)
      .def_readonly("entities", &Document::entities)
      .def_readonly("facts", &Document::facts)
      .def_property_readonly("has_parse", [](const Document& d) { return !d.parse.empty(); })
      .def("token_count", &Document::token_count);

  py::class_<Corpus>(m, "Corpus")
      .def_readonly("docs", &Corpus::docs)
      .def_property_readonly("relations", [](const Corpus& c) { return c.relations.names(); })
      .def("__len__", [](const Corpus& c) { return c.docs.size(); })
      .def("to_json", [](const Corpus& c) { return serialize_corpus(c.docs, c.relations); })
      .def("parses_jsonl", [](const Corpus& c) { return serialize_parses(c.docs); })
      .def(
          "stats",
          [](const Corpus& c, bool exclude_overlap) {
            const CorpusStats s = corpus_stats(c.docs, anaphor_counts(c.docs, exclude_overlap));
            return py::dict(py::arg("docs") = s.docs, py::arg("anaphors") = s.anaphors,
                            py::arg("mentions") = s.mentions, py::arg("entities") = s.entities,
                            py::arg("triples") = s.triples, py::arg("sentences") = s.sentences);
          },
          py::arg("exclude_overlap") = true);

  m.def(
      "load_corpus",
      [](const std::string& path, const std::string& parses_path) {
        Corpus c = load_corpus(path);
        if (!parses_path.empty()) attach_parses(c.docs, load_parses(parses_path));
        return c;
      },
      py::arg("path"), py::arg("parses") = "");
  m.def(
      "parse_corpus", [](const std::string& text, const std::string& parses) { return with_parses(parse_corpus(text), parses); },
      py::arg("text"), py::arg("parses") = "");

  py::class_<Anaphor>(m, "Anaphor")
      .def_property_readonly("kind", [](const Anaphor& a) { return std::string(to_string(a.kind)); })
      .def_readonly("sent_id", &Anaphor::sent_id)
      .def_readonly("start", &Anaphor::start)
      .def_readonly("end", &Anaphor::end)
      .def_readonly("surface", &Anaphor::surface)
      .def("__repr__", [](const Anaphor& a) {
        return "Anaphor(" + std::string(to_string(a.kind)) + ", '" + a.surface + "', sent " + std::to_string(a.sent_id) +
               ", [" + std::to_string(a.start) + ", " + std::to_string(a.end) + "))";
      });
  m.def(
      "extract_anaphors",
      [](const Document& doc, bool exclude_overlap) { return extract_anaphors(doc, {exclude_overlap}); },
      py::arg("doc"), py::arg("exclude_overlap") = true);
  m.def(
      "graph_json",
      [](const Document& doc, const std::string& variant, std::uint64_t seed, bool exclude_overlap) {
        const auto anaphors = doc.parse.empty() ? std::vector<Anaphor>{} : extract_anaphors(doc, {exclude_overlap});
        return graph_to_json(doc, build_graph(doc, anaphors, parse_graph_variant(variant), seed));
      },
      py::arg("doc"), py::arg("variant") = "full", py::arg("seed") = 1, py::arg("exclude_overlap") = true);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def("set", &TrainConfig::set)
      .def("validate", &TrainConfig::validate)
      .def("to_json", &TrainConfig::to_json)
      .def_static("from_json", &TrainConfig::from_json)
      .def_static("keys", &TrainConfig::keys);

  py::class_<Triple>(m, "Triple")
      .def_readonly("doc_id", &Triple::doc_id)
      .def_readonly("head", &Triple::head)
      .def_readonly("tail", &Triple::tail)
      .def_readonly("relation", &Triple::relation)
      .def_readonly("score", &Triple::score)
      .def_readonly("evidence", &Triple::evidence);

  py::class_<Model>(m, "Model")
      .def_property_readonly("relations", [](const Model& model) { return model.relations().names(); })
      .def(
          "predict",
          [](const Model& model, const Corpus& corpus, std::size_t threads, double evidence_threshold) {
            py::gil_scoped_release release;
            return predict(score_documents(model, corpus.docs, threads), evidence_threshold);
          },
          py::arg("corpus"), py::arg("threads") = 1, py::arg("evidence_threshold") = 0.2)
      .def(
          "save", [](const Model& model, const std::string& path) { save_checkpoint(path, model); }, py::arg("path"));
  m.def(
      "load_model", [](const std::string& path) { return load_checkpoint(path); }, py::arg("path"));

  m.def(
      "train",
      [](const Corpus& corpus, const TrainConfig& config, const Corpus* dev,
         const std::function<void(const std::string&)>& on_epoch) {
        EpochCallback cb;
        if (on_epoch) cb = [&](const EpochLog& log) {
            py::gil_scoped_acquire acquire;
            on_epoch(log.to_json());
          };
        py::gil_scoped_release release;
        return std::move(train(corpus, dev ? &dev->docs : nullptr, config, cb).model);
      },
      py::arg("corpus"), py::arg("config") = TrainConfig{}, py::arg("dev") = nullptr, py::arg("on_epoch") = nullptr);

  m.def(
      "evaluate",
      [](const std::vector<Triple>& preds, const Corpus& gold, const Corpus* train_corpus) {
        const FactKeys keys = train_corpus ? train_fact_keys(train_corpus->docs, train_corpus->relations) : FactKeys{};
        return evaluate(preds, gold.docs, gold.relations, keys).to_json();
      },
      py::arg("predictions"), py::arg("gold"), py::arg("train") = nullptr);
  m.def(
      "predictions_jsonl",
      [](const std::vector<Triple>& preds, const Corpus& corpus) { return predictions_jsonl(preds, corpus.relations); },
      py::arg("predictions"), py::arg("corpus"));

  m.def(
      "parse_predictions",
      [](const std::string& text, const Corpus& corpus) { return parse_predictions(text, corpus.relations); },
      py::arg("text"), py::arg("corpus"));

  m.def(
      "generate",
      [](const std::string& kind, int docs, int relations, std::uint64_t seed, const std::string& prefix,
         int bridge_gap) {
        synthetic::CorpusOptions o{docs, relations, seed, prefix, bridge_gap};
        if (kind == "relation") return synthetic::relation_corpus(o);
        if (kind == "bridge") return synthetic::bridge_corpus(o);
        if (kind == "walmart") return Corpus{{synthetic::walmart_example()}, RelationVocab({"located_near"})};
        throw ConfigError("unknown corpus kind '" + kind + "' (expected relation, bridge, walmart)");
      },
      py::arg("kind") = "relation", py::arg("docs") = 32, py::arg("relations") = 5, py::arg("seed") = 1,
      py::arg("prefix") = "synth", py::arg("bridge_gap") = 0);

  m.def(
      "gradcheck",
      [](std::size_t seeds, double tolerance) {
        GradCheckOptions o;
        o.seeds = seeds;
        o.tolerance = tolerance;
        const GradCheckReport r = [&] {
          py::gil_scoped_release release;
          return run_gradcheck_suite(o);
        }();
        return py::dict(py::arg("cases") = r.cases.size(), py::arg("failures") = r.failures(),
                        py::arg("worst") = r.worst(), py::arg("passed") = r.passed());
      },
      py::arg("seeds") = 2, py::arg("tolerance") = 1e-4);
}
