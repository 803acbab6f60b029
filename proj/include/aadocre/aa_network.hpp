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

// Anaphor-assisted relational core: entity pooling, localized context
// pooling, dynamic adjacency, residual GCN and grouped bilinear scoring.

#ifndef AADOCRE_AA_NETWORK_HPP_
#define AADOCRE_AA_NETWORK_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "aadocre/anaphor_graph.hpp"
#include "aadocre/corpus.hpp"
#include "aadocre/encoder.hpp"
#include "aadocre/params.hpp"
#include "aadocre/tensor.hpp"

namespace aadocre {

struct AAConfig {
  std::size_t gcn_layers = 2;   // K
  std::size_t iterations = 2;   // outer passes, each recomputing the adjacency
  std::size_t graph_heads = 2;
  std::size_t groups = 2;       // bilinear block count
  bool use_graph = true;        // false: the "w/o Graph" variant
  bool shared_bias = true;      // one bias for both projection heads
  double context_eps = 1e-10;

  void validate(std::size_t hidden) const;
};

// Coordinate-wise logsumexp over 1 x d rows.
ad::Tensor entity_pool(const std::vector<ad::Tensor>& mention_embeddings);

// Mean of the A rows at the entity's opening markers; 1 x l.
ad::Tensor entity_attention(const EncoderOutput& out, const MarkedDocument& marked, std::size_t entity);

// (a_head * a_tail) / (a_head . a_tail) per row; denominators below eps are replaced by eps.
ad::Tensor context_weights(const ad::Tensor& a_head, const ad::Tensor& a_tail, double eps = 1e-10);

// H^T weighted by context_weights, one row per pair.
ad::Tensor context_pool(const ad::Tensor& H, const ad::Tensor& a_head, const ad::Tensor& a_tail,
                        double eps = 1e-10);

struct AdjacencyParams {
  // [edge type][head], each d x d
  std::array<std::vector<ad::Tensor>, kEdgeTypes> wq, wk;
};

struct DynamicAdjacency {
  ad::Tensor weights;              // n x n
  std::vector<std::uint8_t> mask;  // union support, row-major
};

using EdgeMatrices = std::array<std::vector<std::uint8_t>, kEdgeTypes>;

// Masked row softmax of head-averaged, edge-type-gated attention scores.
// Rows without neighbours are all zero.
DynamicAdjacency dynamic_adjacency(const ad::Tensor& hv, const EdgeMatrices& edges, const AdjacencyParams& params);

// relu(adj . g . W + b) + g
ad::Tensor gcn_layer(const ad::Tensor& g, const ad::Tensor& adj, const ad::Tensor& w, const ad::Tensor& b);

struct PairForward {
  std::vector<std::pair<int, int>> pairs;  // (head, tail) entity indices
  ad::Tensor logits;                       // pairs x (|R| + 1); the last column is TH
  ad::Tensor q;                            // pairs x l token weights
  ad::Tensor node_states;                  // final g, n x d (empty without graph)
  std::vector<ad::Tensor> adjacency;       // one per iteration
};

class AANetwork {
 public:
  AANetwork() = default;
  AANetwork(const AAConfig& config, std::size_t hidden, std::size_t relations, ParamStore& store,
            std::mt19937_64& rng);

  const AAConfig& config() const { return config_; }
  std::size_t relations() const { return relations_; }

  // Initial node states: mention rows at opening markers, anaphor span means.
  ad::Tensor node_embeddings(const Document& doc, const DocumentGraph& graph, const MarkedDocument& marked,
                             const EncoderOutput& out) const;

  // Scores the given ordered pairs, or every ordered pair when empty.
  PairForward forward(const Document& doc, const DocumentGraph& graph, const MarkedDocument& marked,
                      const EncoderOutput& out, std::vector<std::pair<int, int>> pairs = {}) const;

 private:
  AAConfig config_;
  std::size_t hidden_ = 0;
  std::size_t relations_ = 0;
  AdjacencyParams adj_;
  std::vector<ad::Tensor> gcn_w_, gcn_b_;
  ad::Tensor wh_, wt_, bh_, bt_, wr_, br_;
};

}  // namespace aadocre

#endif  // AADOCRE_AA_NETWORK_HPP_
