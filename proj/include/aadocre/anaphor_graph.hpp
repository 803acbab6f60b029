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

// Rule-based anaphor extraction over offline parses and the three-edge-type
// mention/anaphor document graph.

#ifndef AADOCRE_ANAPHOR_GRAPH_HPP_
#define AADOCRE_ANAPHOR_GRAPH_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "aadocre/corpus.hpp"

namespace aadocre {

enum class AnaphorKind { kPronoun, kDefinite };

const char* to_string(AnaphorKind kind);

struct Anaphor {
  AnaphorKind kind = AnaphorKind::kPronoun;
  int sent_id = 0;
  int start = 0;
  int end = 0;  // exclusive
  std::string surface;

  bool operator==(const Anaphor&) const = default;
};

struct AnaphorOptions {
  bool exclude_mention_overlap = true;
};

// Candidates dropped while extracting.
struct AnaphorDiagnostics {
  std::size_t backward_determiners = 0;  // head precedes its "the"
  std::size_t cross_sentence = 0;        // head lies in another sentence
  std::size_t mention_overlaps = 0;
};

// Pronouns are tokens tagged PRON. A definite referent is a "the" token with
// dependency "det", spanning through its syntactic head inclusive. Output is
// sorted by position and deduplicated. Requires a length-consistent parse.
std::vector<Anaphor> extract_anaphors(const Document& doc, const AnaphorOptions& options = {},
                                      AnaphorDiagnostics* diagnostics = nullptr);

enum class GraphVariant { kFull, kNoAnaphor, kRandomReplace };

const char* to_string(GraphVariant variant);
GraphVariant parse_graph_variant(const std::string& name);

enum EdgeType : std::size_t { kMentionAnaphor = 0, kCoreference = 1, kInterEntity = 2 };
inline constexpr std::size_t kEdgeTypes = 3;
const char* edge_type_name(std::size_t type);

struct GraphNode {
  bool is_anaphor = false;
  int sent_id = 0;
  int start = 0;
  int end = 0;
  int entity = -1;   // -1 for anaphor nodes
  int mention = -1;  // index within the entity's mention list
  AnaphorKind anaphor_kind = AnaphorKind::kPronoun;
  std::string surface;
};

struct DocumentGraph {
  // Mention nodes (entity-major, mention order), then anaphor nodes in document order.
  std::vector<GraphNode> nodes;
  std::size_t mention_nodes = 0;
  // Node indices of each entity's mentions.
  std::vector<std::vector<std::size_t>> entity_nodes;
  // Row-major n x n binary symmetric matrices, one per edge type.
  std::array<std::vector<std::uint8_t>, kEdgeTypes> adjacency;

  std::size_t size() const { return nodes.size(); }
  bool edge(std::size_t type, std::size_t i, std::size_t j) const {
    return adjacency[type][i * nodes.size() + j] != 0;
  }
  // Undirected edge count of one type.
  std::size_t edge_count(std::size_t type) const;
  // Union support of all edge types, row-major.
  std::vector<std::uint8_t> support() const;
};

// kNoAnaphor drops anaphor nodes. kRandomReplace swaps every anaphor for a
// uniformly drawn same-width span inside one sentence that overlaps no mention
// and no anaphor; widths with no free span are dropped.
DocumentGraph build_graph(const Document& doc, const std::vector<Anaphor>& anaphors,
                          GraphVariant variant = GraphVariant::kFull, std::uint64_t seed = 0);

// {"doc_id", "nodes": [{kind, sent_id, span, surface, entity_id|null}], "edges": [[i, j, type]]}
std::string graph_to_json(const Document& doc, const DocumentGraph& graph);

}  // namespace aadocre

#endif  // AADOCRE_ANAPHOR_GRAPH_HPP_
