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

#include "aadocre/anaphor_graph.hpp"

#include <algorithm>
#include <random>
#include <tuple>

#include <json.hpp>

#include "aadocre/errors.hpp"
#include "aadocre/seeds.hpp"

namespace aadocre {
namespace {

bool overlaps(int a0, int a1, int b0, int b1) { return a0 < b1 && b0 < a1; }

bool overlaps_mention(const Document& doc, int sent, int start, int end) {
  for (const auto& e : doc.entities)
    for (const auto& m : e.mentions)
      if (m.sent_id == sent && overlaps(start, end, m.start, m.end)) return true;
  return false;
}

std::string span_text(const Document& doc, int sent, int start, int end) {
  std::string out;
  const auto& toks = doc.sentences[static_cast<std::size_t>(sent)];
  for (int i = start; i < end; ++i) {
    if (i > start) out += ' ';
    out += toks[static_cast<std::size_t>(i)];
  }
  return out;
}

}  // namespace

const char* to_string(AnaphorKind kind) {
  return kind == AnaphorKind::kPronoun ? "pronoun" : "definite";
}

const char* to_string(GraphVariant variant) {
  switch (variant) {
    case GraphVariant::kFull: return "full";
    case GraphVariant::kNoAnaphor: return "no-anaphor";
    case GraphVariant::kRandomReplace: return "random-replace";
  }
  return "full";
}

GraphVariant parse_graph_variant(const std::string& name) {
  if (name == "full") return GraphVariant::kFull;
  if (name == "no-anaphor") return GraphVariant::kNoAnaphor;
  if (name == "random-replace") return GraphVariant::kRandomReplace;
  throw ConfigError("unknown graph variant '" + name + "' (expected full, no-anaphor, random-replace)");
}

const char* edge_type_name(std::size_t type) {
  static const char* names[] = {"mention-anaphor", "coreference", "inter-entity"};
  return type < kEdgeTypes ? names[type] : "unknown";
}

std::vector<Anaphor> extract_anaphors(const Document& doc, const AnaphorOptions& options,
                                      AnaphorDiagnostics* diagnostics) {
  const std::size_t n = doc.token_count();
  if (doc.parse.tokens.size() != n) {
    throw ValidationError("document '" + doc.doc_id + "': anaphor extraction needs a parse with " +
                          std::to_string(n) + " tokens, found " + std::to_string(doc.parse.tokens.size()));
  }
  AnaphorDiagnostics local;
  AnaphorDiagnostics& diag = diagnostics ? *diagnostics : local;

  const auto offsets = doc.sentence_offsets();
  std::vector<Anaphor> found;
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    for (std::size_t i = offsets[s]; i < offsets[s + 1]; ++i) {
      const ParseToken& tok = doc.parse.tokens[i];
      const int sent = static_cast<int>(s);
      const int local_i = static_cast<int>(i - offsets[s]);
      if (tok.pos == "PRON") {
        found.push_back({AnaphorKind::kPronoun, sent, local_i, local_i + 1, ""});
      } else if (tok.dep == "det" && tok.lower == "the") {
        const auto head = static_cast<std::size_t>(tok.head);
        if (head < i) {
          ++diag.backward_determiners;
          continue;
        }
        if (head >= offsets[s + 1]) {
          ++diag.cross_sentence;
          continue;
        }
        found.push_back({AnaphorKind::kDefinite, sent, local_i, static_cast<int>(head - offsets[s]) + 1, ""});
      }
    }
  }

  std::vector<Anaphor> out;
  for (auto& a : found) {
    if (options.exclude_mention_overlap && overlaps_mention(doc, a.sent_id, a.start, a.end)) {
      ++diag.mention_overlaps;
      continue;
    }
    a.surface = span_text(doc, a.sent_id, a.start, a.end);
    out.push_back(std::move(a));
  }
  std::stable_sort(out.begin(), out.end(), [](const Anaphor& a, const Anaphor& b) {
    return std::tie(a.sent_id, a.start, a.end) < std::tie(b.sent_id, b.start, b.end);
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Anaphor& a, const Anaphor& b) {
                          return a.sent_id == b.sent_id && a.start == b.start && a.end == b.end;
                        }),
            out.end());
  return out;
}

std::size_t DocumentGraph::edge_count(std::size_t type) const {
  std::size_t c = 0;
  const std::size_t n = nodes.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) c += adjacency[type][i * n + j] ? 1 : 0;
  return c;
}

std::vector<std::uint8_t> DocumentGraph::support() const {
  std::vector<std::uint8_t> s(nodes.size() * nodes.size(), 0);
  for (const auto& a : adjacency)
    for (std::size_t i = 0; i < s.size(); ++i) s[i] |= a[i];
  return s;
}

namespace {

std::vector<Anaphor> random_replacements(const Document& doc, const std::vector<Anaphor>& anaphors,
                                         std::uint64_t seed) {
  auto rng = stream(seed, "random-replace/" + doc.doc_id);
  std::vector<Anaphor> taken;
  auto free_span = [&](int sent, int start, int end) {
    if (overlaps_mention(doc, sent, start, end)) return false;
    for (const auto& a : anaphors)
      if (a.sent_id == sent && overlaps(start, end, a.start, a.end)) return false;
    for (const auto& a : taken)
      if (a.sent_id == sent && overlaps(start, end, a.start, a.end)) return false;
    return true;
  };
  for (const auto& a : anaphors) {
    const int width = a.end - a.start;
    std::vector<std::pair<int, int>> candidates;
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      const int len = static_cast<int>(doc.sentences[s].size());
      for (int st = 0; st + width <= len; ++st)
        if (free_span(static_cast<int>(s), st, st + width)) candidates.emplace_back(static_cast<int>(s), st);
    }
    if (candidates.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    const auto [sent, st] = candidates[pick(rng)];
    taken.push_back({a.kind, sent, st, st + width, span_text(doc, sent, st, st + width)});
  }
  std::stable_sort(taken.begin(), taken.end(), [](const Anaphor& a, const Anaphor& b) {
    return std::tie(a.sent_id, a.start, a.end) < std::tie(b.sent_id, b.start, b.end);
  });
  return taken;
}

}  // namespace

DocumentGraph build_graph(const Document& doc, const std::vector<Anaphor>& anaphors, GraphVariant variant,
                          std::uint64_t seed) {
  DocumentGraph g;
  g.entity_nodes.resize(doc.entities.size());
  for (std::size_t e = 0; e < doc.entities.size(); ++e) {
    for (std::size_t m = 0; m < doc.entities[e].mentions.size(); ++m) {
      const auto& men = doc.entities[e].mentions[m];
      g.entity_nodes[e].push_back(g.nodes.size());
      g.nodes.push_back({false, men.sent_id, men.start, men.end, static_cast<int>(e), static_cast<int>(m),
                         AnaphorKind::kPronoun, men.surface});
    }
  }
  g.mention_nodes = g.nodes.size();

  std::vector<Anaphor> extra;
  if (variant == GraphVariant::kFull) {
    extra = anaphors;
  } else if (variant == GraphVariant::kRandomReplace) {
    extra = random_replacements(doc, anaphors, seed);
  }
  for (const auto& a : extra) g.nodes.push_back({true, a.sent_id, a.start, a.end, -1, -1, a.kind, a.surface});

  const std::size_t n = g.nodes.size();
  for (auto& a : g.adjacency) a.assign(n * n, 0);
  auto link = [&](std::size_t type, std::size_t i, std::size_t j) {
    g.adjacency[type][i * n + j] = 1;
    g.adjacency[type][j * n + i] = 1;
  };
  for (std::size_t i = 0; i < g.mention_nodes; ++i) {
    for (std::size_t j = i + 1; j < g.mention_nodes; ++j) {
      link(g.nodes[i].entity == g.nodes[j].entity ? kCoreference : kInterEntity, i, j);
    }
    for (std::size_t j = g.mention_nodes; j < n; ++j) link(kMentionAnaphor, i, j);
  }
  return g;
}

std::string graph_to_json(const Document& doc, const DocumentGraph& graph) {
  using nlohmann::json;
  json nodes = json::array();
  for (const auto& node : graph.nodes) {
    json j;
    j["kind"] = node.is_anaphor ? std::string("anaphor-") + to_string(node.anaphor_kind) : "mention";
    j["sent_id"] = node.sent_id;
    j["span"] = {node.start, node.end};
    j["surface"] = node.surface;
    j["entity_id"] = node.is_anaphor ? json(nullptr) : json(node.entity);
    nodes.push_back(std::move(j));
  }
  json edges = json::array();
  const std::size_t n = graph.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t t = 0; t < kEdgeTypes; ++t)
        if (graph.edge(t, i, j)) edges.push_back({i, j, edge_type_name(t)});
  return json{{"doc_id", doc.doc_id}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}}.dump();
}

}  // namespace aadocre
