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

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include <json.hpp>

#include "aadocre/anaphor_graph.hpp"
#include "aadocre/errors.hpp"
#include "aadocre/synthetic.hpp"
#include "oracles.hpp"

using namespace aadocre;
using aadocre::testing::Span;

namespace {

std::set<Span> spans(const std::vector<Anaphor>& as) {
  std::set<Span> out;
  for (const auto& a : as) out.insert({a.sent_id, a.start, a.end});
  return out;
}

Document tagged(std::vector<std::string> toks, std::vector<std::tuple<const char*, const char*, int>> tags) {
  Document d;
  d.doc_id = "t";
  d.sentences = {toks};
  for (std::size_t i = 0; i < toks.size(); ++i) {
    std::string low = toks[i];
    for (auto& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    d.parse.tokens.push_back({std::get<0>(tags[i]), std::get<1>(tags[i]), std::get<2>(tags[i]), low});
  }
  return d;
}

// Two entities of two mentions each, plus two anaphor spans.
Document two_by_two() {
  Document d;
  d.doc_id = "two";
  d.sentences = {{"A", "x", "B", "y", "it"}, {"A", "z", "B", "the", "w"}};
  for (int e = 0; e < 2; ++e) {
    Entity ent;
    ent.entity_id = e;
    ent.mentions.push_back({0, 2 * e, 2 * e + 1, e ? "B" : "A", "", ""});
    ent.mentions.push_back({1, 2 * e, 2 * e + 1, e ? "B" : "A", "", ""});
    d.entities.push_back(ent);
  }
  return d;
}

}  // namespace

TEST_CASE("walmart example yields He and the market") {
  const Document doc = synthetic::walmart_example();
  const auto as = extract_anaphors(doc);
  REQUIRE(as.size() == 2);
  CHECK(as[0].surface == "He");
  CHECK(as[0].kind == AnaphorKind::kPronoun);
  CHECK(as[1].surface == "the market");
  CHECK(as[1].kind == AnaphorKind::kDefinite);
  CHECK(extract_anaphors(doc) == as);
}

TEST_CASE("no pronoun and no the gives nothing") {
  const Document d = tagged({"Cats", "sleep", "."},
                            {{"NOUN", "nsubj", 1}, {"VERB", "ROOT", 1}, {"PUNCT", "punct", 1}});
  CHECK(extract_anaphors(d).empty());
}

TEST_CASE("definite span runs through the head") {
  const Document d = tagged({"I", "like", "the", "X-Files", "show", "."},
                            {{"PRON", "nsubj", 1}, {"VERB", "ROOT", 1}, {"DET", "det", 4},
                             {"PROPN", "compound", 4}, {"NOUN", "dobj", 1}, {"PUNCT", "punct", 1}});
  const auto as = extract_anaphors(d);
  REQUIRE(as.size() == 2);
  CHECK(as[0].surface == "I");
  CHECK(as[1].surface == "the X-Files show");
}

TEST_CASE("backward determiner is skipped and tallied") {
  const Document d = tagged({"show", "the", "."}, {{"NOUN", "ROOT", 0}, {"DET", "det", 0}, {"PUNCT", "punct", 0}});
  AnaphorDiagnostics diag;
  CHECK(extract_anaphors(d, {}, &diag).empty());
  CHECK(diag.backward_determiners == 1);
}

TEST_CASE("mention overlap flag") {
  Document d = tagged({"the", "Beatles", "sang"}, {{"DET", "det", 1}, {"PROPN", "nsubj", 2}, {"VERB", "ROOT", 2}});
  Entity e;
  e.mentions.push_back({0, 1, 2, "Beatles", "Beatles", "ORG"});
  d.entities.push_back(e);
  AnaphorDiagnostics diag;
  CHECK(extract_anaphors(d, {}, &diag).empty());
  CHECK(diag.mention_overlaps == 1);
  CHECK(extract_anaphors(d, {false}).size() == 1);
}

TEST_CASE("parse length mismatch is a validation error") {
  Document d = synthetic::walmart_example();
  d.parse.tokens.pop_back();
  CHECK_THROWS_AS(extract_anaphors(d), ValidationError);
}

TEST_CASE("extraction equals the rule oracle on random sentences") {
  std::mt19937_64 rng(2024);
  synthetic::RandomDocLimits one;
  one.max_sentences = 1;
  for (int k = 0; k < 50; ++k) {
    const Document d = synthetic::random_document(rng, one);
    CHECK(spans(extract_anaphors(d)) == testing::rule_oracle(d));
    CHECK(spans(extract_anaphors(d, {false})) == testing::rule_oracle(d, false));
  }
}

TEST_CASE("two-by-two graph edge counts") {
  const Document d = two_by_two();
  const std::vector<Anaphor> as = {{AnaphorKind::kPronoun, 0, 4, 5, "it"},
                                   {AnaphorKind::kDefinite, 1, 3, 5, "the w"}};
  const auto g = build_graph(d, as);
  CHECK(g.size() == 6);
  CHECK(g.edge_count(kMentionAnaphor) == 8);
  CHECK(g.edge_count(kCoreference) == 2);
  CHECK(g.edge_count(kInterEntity) == 4);
  CHECK(testing::graph_well_formed(g));

  const auto none = build_graph(d, as, GraphVariant::kNoAnaphor);
  CHECK(none.size() == 4);
  CHECK(none.edge_count(kMentionAnaphor) == 0);
  CHECK(none.edge_count(kInterEntity) == 4);
}

TEST_CASE("single mention graph is empty") {
  Document d;
  d.doc_id = "one";
  d.sentences = {{"A"}};
  Entity e;
  e.mentions.push_back({0, 0, 1, "A", "A", ""});
  d.entities.push_back(e);
  const auto g = build_graph(d, {});
  CHECK(g.size() == 1);
  for (std::size_t t = 0; t < kEdgeTypes; ++t) CHECK(g.edge_count(t) == 0);
}

TEST_CASE("graph equals brute force oracle on random documents") {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 100; ++k) {
    const Document d = synthetic::random_document(rng);
    const auto as = extract_anaphors(d);
    const auto g = build_graph(d, as);
    // Node order: entity-major mentions, then anaphors.
    std::size_t idx = 0;
    for (std::size_t e = 0; e < d.entities.size(); ++e)
      for (const auto& m : d.entities[e].mentions) {
        const auto& node = g.nodes[idx++];
        CHECK((!node.is_anaphor && node.entity == static_cast<int>(e) && node.start == m.start &&
               node.sent_id == m.sent_id));
      }
    for (const auto& a : as) CHECK((g.nodes[idx++].is_anaphor && g.nodes[idx - 1].start == a.start));
    REQUIRE(idx == g.size());

    const auto got = testing::edges_of(g);
    const auto want = testing::edge_oracle(g);
    for (std::size_t t = 0; t < kEdgeTypes; ++t) CHECK(got.edges[t] == want.edges[t]);
    CHECK(testing::graph_well_formed(g));
    const auto counts = testing::expected_edge_counts(d, as.size());
    for (std::size_t t = 0; t < kEdgeTypes; ++t) CHECK(g.edge_count(t) == counts[t]);
  }
}

TEST_CASE("random replace is seeded and avoids mentions and anaphors") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 30; ++k) {
    const Document d = synthetic::random_document(rng);
    const auto as = extract_anaphors(d, {false});
    const auto g1 = build_graph(d, as, GraphVariant::kRandomReplace, 11);
    const auto g2 = build_graph(d, as, GraphVariant::kRandomReplace, 11);
    CHECK(graph_to_json(d, g1) == graph_to_json(d, g2));
    CHECK(g1.size() <= d.mention_count() + as.size());
    
    for (std::size_t i = g1.mention_nodes; i < g1.size(); ++i) {
      const auto& n = g1.nodes[i];
      for (const auto& e : d.entities)
        for (const auto& m : e.mentions)
          CHECK_FALSE((m.sent_id == n.sent_id && m.start < n.end && n.start < m.end));
      for (const auto& a : as)
        CHECK_FALSE((a.sent_id == n.sent_id && a.start < n.end && n.start < a.end));
    }
  }
}

TEST_CASE("graph json dump") {
  const Document doc = synthetic::walmart_example();
  const auto g = build_graph(doc, extract_anaphors(doc));
  const auto j = nlohmann::json::parse(graph_to_json(doc, g));
  CHECK(j["nodes"].size() == 4);
  CHECK(j["nodes"][2]["entity_id"].is_null());
  CHECK(j["nodes"][0]["entity_id"] == 0);
  CHECK(j["edges"].size() == 5);  // 4 mention-anaphor + 1 inter-entity
  CHECK(parse_graph_variant("random-replace") == GraphVariant::kRandomReplace);
  CHECK_THROWS_AS(parse_graph_variant("bogus"), ConfigError);
}

TEST_CASE("synthetic corpora are valid") {
  synthetic::CorpusOptions opt;
  opt.docs = 16;
  const auto rel = synthetic::relation_corpus(opt);
  const auto bridge = synthetic::bridge_corpus(opt);
  std::mt19937_64 rng(3);
  for (const auto* c : {&rel, &bridge}) {
    CHECK(c->docs.size() == 16);
    CHECK(c->relations.size() == 5);
    for (const auto& d : c->docs) {
      CHECK_NOTHROW(validate_document(d, c->relations.size()));
      CHECK(d.parse.tokens.size() == d.token_count());
      CHECK_FALSE(d.facts.empty());
    }
  }
  CHECK_NOTHROW(validate_document(synthetic::random_document(rng), 0));
  // Bridge facts never share a sentence between head and tail.
  for (const auto& d : bridge.docs)
    for (const auto& f : d.facts) {
      CHECK(f.evidence.size() == 2);
      for (const auto& mh : d.entities[static_cast<std::size_t>(f.head)].mentions)
        for (const auto& mt : d.entities[static_cast<std::size_t>(f.tail)].mentions)
          CHECK(mh.sent_id != mt.sent_id);
    }
  // Same seed, same corpus.
  CHECK(serialize_corpus(synthetic::bridge_corpus(opt).docs, bridge.relations) ==
        serialize_corpus(bridge.docs, bridge.relations));
}

TEST_CASE("gapped bridge sentences keep the pronoun away from the cue") {
  synthetic::CorpusOptions opt;
  opt.docs = 20;
  opt.bridge_gap = 9;
  const auto c = synthetic::bridge_corpus(opt);
  for (const auto& d : c.docs) {
    CHECK_NOTHROW(validate_document(d, c.relations.size()));
    const auto anaphors = extract_anaphors(d);
    CHECK(spans(anaphors) == testing::rule_oracle(d));
    for (const auto& f : d.facts) {
      const int s = f.evidence.back();
      const auto& sent = d.sentences[static_cast<std::size_t>(s)];
      const auto& tail = d.entities[static_cast<std::size_t>(f.tail)].mentions.front();
      CHECK(tail.sent_id == s);
      CHECK(tail.start >= opt.bridge_gap + 2);
      const bool pronoun_first = std::any_of(anaphors.begin(), anaphors.end(), [&](const Anaphor& a) {
        return a.kind == AnaphorKind::kPronoun && a.sent_id == s && a.start == 0;
      });
      CHECK(pronoun_first);
      CHECK(sent.back() == ".");
    }
  }
}
