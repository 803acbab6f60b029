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
#include <set>

#include "aadocre/corpus.hpp"
#include "aadocre/errors.hpp"

using namespace aadocre;

namespace {

const char* kTwoDocs = R"([
 {"title": "Alpha",
  "sents": [["Tom", "lives", "in", "Paris", "."], ["He", "likes", "the", "city", "."]],
  "vertexSet": [
    [{"name": "Tom", "sent_id": 0, "pos": [0, 1], "type": "PER"}],
    [{"name": "Paris", "sent_id": 0, "pos": [3, 4], "type": "LOC"},
     {"name": "the city", "sent_id": 1, "pos": [2, 4], "type": "LOC"}]],
  "labels": [{"h": 0, "t": 1, "r": "P551", "evidence": [0]}]},
 {"title": "Beta",
  "sents": [["Acme", "hired", "Ann", "."]],
  "vertexSet": [
    [{"name": "Acme", "sent_id": 0, "pos": [0, 1], "type": "ORG"}],
    [{"name": "Ann", "sent_id": 0, "pos": [2, 3], "type": "PER"}],
    [{"name": "hired", "sent_id": 0, "pos": [1, 2], "type": "MISC"}]],
  "labels": [{"h": 2, "t": 0, "r": "P108", "evidence": [0]},
             {"h": 1, "t": 0, "r": "P108", "evidence": [0]}]}
])";

Document one_sentence(std::vector<std::string> toks, std::vector<std::pair<int, int>> spans) {
  Document d;
  d.doc_id = "t";
  d.sentences = {std::move(toks)};
  for (std::size_t i = 0; i < spans.size(); ++i) {
    Entity e;
    e.entity_id = static_cast<int>(i);
    e.mentions.push_back({0, spans[i].first, spans[i].second, "", "", ""});
    d.entities.push_back(e);
  }
  return d;
}

}  // namespace

TEST_CASE("load_corpus parses DocRED JSON") {
  Corpus c = parse_corpus(kTwoDocs);
  REQUIRE(c.docs.size() == 2);
  CHECK(c.relations.size() == 2);
  CHECK(c.relations.name(0) == "P108");  // sorted names
  CHECK(c.docs[0].doc_id == "Alpha");
  CHECK(c.docs[0].entities[1].mentions[1].surface == "the city");
  CHECK(c.docs[0].facts[0].relation == c.relations.id("P551"));
  CHECK(c.docs[1].facts.size() == 2);
}

TEST_CASE("empty corpus") {
  CHECK(parse_corpus("[]").docs.empty());
}

TEST_CASE("validation and parse errors") {
  const std::string bad_end = R"([{"title":"X","sents":[["a","b"]],
    "vertexSet":[[{"name":"a","sent_id":0,"pos":[1,3],"type":"T"}]],"labels":[]}])";
  CHECK_THROWS_AS(parse_corpus(bad_end), ValidationError);

  const std::string self_loop = R"([{"title":"X","sents":[["a","b"]],
    "vertexSet":[[{"name":"a","sent_id":0,"pos":[0,1],"type":"T"}]],
    "labels":[{"h":0,"t":0,"r":"R","evidence":[]}]}])";
  CHECK_THROWS_AS(parse_corpus(self_loop), ValidationError);

  const std::string bad_evidence = R"([{"title":"X","sents":[["a","b"]],
    "vertexSet":[[{"name":"a","sent_id":0,"pos":[0,1]}],[{"name":"b","sent_id":0,"pos":[1,2]}]],
    "labels":[{"h":0,"t":1,"r":"R","evidence":[4]}]}])";
  CHECK_THROWS_AS(parse_corpus(bad_evidence), ValidationError);

  const std::string bad_pos = R"([{"title":"Gamma","sents":[["a"]],
    "vertexSet":[[{"name":"a","sent_id":0,"pos":"0"}]]}])";
  try {
    parse_corpus(bad_pos);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("Gamma") != std::string::npos);
    CHECK(msg.find("vertexSet[0][0].pos") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_corpus("{"), ParseError);
  CHECK_THROWS_AS(parse_corpus("{}"), ParseError);
}

TEST_CASE("fixed relation vocabulary rejects unknown relations") {
  RelationVocab v({"P551"});
  CHECK_THROWS_AS(parse_corpus(kTwoDocs, &v), ValidationError);
  RelationVocab both({"P551", "P108"});
  auto c = parse_corpus(kTwoDocs, &both);
  CHECK(c.docs[1].facts[0].relation == 1);
}

TEST_CASE("load, re-serialize, load round-trips") {
  Corpus a = parse_corpus(kTwoDocs);
  Corpus b = parse_corpus(serialize_corpus(a.docs, a.relations));
  CHECK(serialize_corpus(a.docs, a.relations) == serialize_corpus(b.docs, b.relations));
  REQUIRE(b.docs.size() == 2);
  CHECK(b.docs[1].entities[2].mentions[0].name == "hired");
}

TEST_CASE("corpus_stats") {
  Corpus c = parse_corpus(kTwoDocs);
  auto s = corpus_stats(c.docs, {3, 1});
  CHECK(s.docs == 2);
  CHECK(s.mentions == doctest::Approx(3.0));
  CHECK(s.entities == doctest::Approx(2.5));
  CHECK(s.triples == doctest::Approx(1.5));
  CHECK(s.sentences == doctest::Approx(1.5));
  CHECK(s.anaphors == doctest::Approx(2.0));

  auto single = corpus_stats({one_sentence({"a", "b"}, {{0, 1}, {1, 2}})});
  CHECK(single.mentions == 2.0);
  CHECK_THROWS_AS(corpus_stats({}), ValidationError);

  const std::string table = format_stats_table({{"Train", s}});
  CHECK(table.find("Avg. #Mentions") != std::string::npos);
  CHECK(table.find("3.0") != std::string::npos);
}

TEST_CASE("parse sidecar") {
  Corpus c = parse_corpus(kTwoDocs);
  const std::string side =
      R"({"doc_id":"Beta","tokens":[{"pos":"PROPN","dep":"nsubj","head":1,"lower":"acme"},)"
      R"({"pos":"VERB","dep":"ROOT","head":1,"lower":"hired"},)"
      R"({"pos":"PROPN","dep":"dobj","head":1,"lower":"ann"},)"
      R"({"pos":"PUNCT","dep":"punct","head":1,"lower":"."}]})";
  attach_parses(c.docs, parse_parses(side));
  CHECK(c.docs[0].parse.empty());
  REQUIRE(c.docs[1].parse.tokens.size() == 4);
  CHECK(c.docs[1].parse.tokens[2].dep == "dobj");
  CHECK(parse_parses(serialize_parses(c.docs)).at("Beta").tokens[3].lower == ".");

  const std::string short_side = R"({"doc_id":"Beta","tokens":[]})";
  CHECK_THROWS_AS(attach_parses(c.docs, parse_parses(short_side)), ValidationError);
  CHECK_THROWS_AS(parse_parses("{\"doc_id\": 3}"), ParseError);
}

TEST_CASE("mark_entities examples") {
  auto d = one_sentence({"w", "x", "y"}, {{0, 1}});
  auto m = mark_entities(d);
  REQUIRE(m.size() == 5);
  CHECK(m.is_marker[0]);
  CHECK(m.tokens[1] == "w");
  CHECK(m.is_marker[2]);
  CHECK(m.mention_start[0][0] == 0);
  CHECK(m.mention_end[0][0] == 2);

  auto two = mark_entities(one_sentence({"a", "b", "c", "d"}, {{2, 3}, {0, 1}}));
  CHECK(two.marker_count() == 4);
  CHECK(two.mention_start[1][0] < two.mention_start[0][0]);
  std::vector<std::string> plain;
  for (std::size_t i = 0; i < two.size(); ++i)
    if (!two.is_marker[i]) plain.push_back(two.tokens[i]);
  CHECK(plain == std::vector<std::string>{"a", "b", "c", "d"});
}

TEST_CASE("mark_entities: exhaustive two-mention overlap configurations on a 6-token sentence") {
  const std::vector<std::string> toks{"t0", "t1", "t2", "t3", "t4", "t5"};
  std::vector<std::pair<int, int>> spans;
  for (int s = 0; s < 6; ++s)
    for (int e = s + 1; e <= 6; ++e) spans.emplace_back(s, e);
  std::size_t configs = 0;
  for (const auto& a : spans) {
    for (const auto& b : spans) {
      ++configs;
      auto doc = one_sentence(toks, {a, b});
      auto m = mark_entities(doc);
      CHECK(m.marker_count() == 4);
      // Stripping markers recovers the original sequence; maps are inverse.
      std::vector<std::string> plain;
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.is_marker[i]) continue;
        plain.push_back(m.tokens[i]);
        CHECK(m.original_to_marked[static_cast<std::size_t>(m.marked_to_original[i])] == i);
      }
      CHECK(plain == toks);
      for (std::size_t t = 0; t < toks.size(); ++t)
        CHECK(m.marked_to_original[m.original_to_marked[t]] == static_cast<std::ptrdiff_t>(t));
      // Each mention's markers enclose exactly its own tokens.
      const std::pair<int, int> sp[2] = {a, b};
      for (std::size_t e = 0; e < 2; ++e) {
        std::vector<std::string> inside;
        for (std::size_t i = m.mention_start[e][0] + 1; i < m.mention_end[e][0]; ++i)
          if (!m.is_marker[i]) inside.push_back(m.tokens[i]);
        CHECK(inside == std::vector<std::string>(toks.begin() + sp[e].first, toks.begin() + sp[e].second));
      }
      const bool a_in_b = b.first <= a.first && a.second <= b.second;
      const bool b_in_a = a.first <= b.first && b.second <= a.second;
      if (a_in_b || b_in_a) {
        // Nested (or identical) spans nest their markers properly: outer opens first, closes last.
        const std::size_t outer = (b_in_a && !(a_in_b && !b_in_a)) ? 0 : 1;
        const std::size_t inner = 1 - outer;
        CHECK(m.mention_start[outer][0] < m.mention_start[inner][0]);
        CHECK(m.mention_end[inner][0] < m.mention_end[outer][0]);
      }
      // Determinism.
      auto again = mark_entities(doc);
      CHECK(again.tokens == m.tokens);
      CHECK(again.mention_start == m.mention_start);
    }
  }
  CHECK(configs == 441);
}

TEST_CASE("marked sentence spans partition the marked sequence") {
  Corpus c = parse_corpus(kTwoDocs);
  auto m = mark_entities(c.docs[0]);
  REQUIRE(m.sentence_spans.size() == 2);
  CHECK(m.sentence_spans[0].first == 0);
  CHECK(m.sentence_spans[0].second == m.sentence_spans[1].first);
  CHECK(m.sentence_spans[1].second == m.size());
  // "the city" closes at the end of sentence 1 and its marker stays in sentence 1.
  CHECK(m.mention_end[1][1] < m.sentence_spans[1].second);
  CHECK(m.marker_count() == 2 * c.docs[0].mention_count());
}

TEST_CASE("build_vocab") {
  auto d = one_sentence({"a", "a", "b"}, {{0, 1}});
  auto v = Vocabulary::build({d}, 1);
  CHECK(v.size() == 5);
  CHECK(v.id("a") == 3);
  CHECK(v.id("b") == 4);
  auto v2 = Vocabulary::build({d}, 2);
  CHECK(v2.id("b") == Vocabulary::kUnk);

  auto e = one_sentence({"c", "b"}, {{0, 1}});
  CHECK(Vocabulary::build({d, e}).tokens() == Vocabulary::build({e, d}).tokens());

  auto ids = v.encode(mark_entities(d));
  CHECK(ids.front() == Vocabulary::kMarker);
  // A literal asterisk is an ordinary token, never the marker.
  auto star = one_sentence({"*", "x"}, {{1, 2}});
  auto sv = Vocabulary::build({star});
  auto sids = sv.encode(mark_entities(star));
  CHECK(sids[0] != Vocabulary::kMarker);
  CHECK(sids[1] == Vocabulary::kMarker);
}
