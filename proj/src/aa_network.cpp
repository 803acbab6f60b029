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

#include "aadocre/aa_network.hpp"

#include <cmath>
#include <string>

#include "aadocre/errors.hpp"

namespace aadocre {

void AAConfig::validate(std::size_t hidden) const {
  if (iterations == 0) throw ConfigError("aa: iterations must be positive");
  if (graph_heads == 0) throw ConfigError("aa: graph_heads must be positive");
  if (groups == 0 || hidden % groups != 0)
    throw ConfigError("aa: hidden " + std::to_string(hidden) + " not divisible by groups " + std::to_string(groups));
  if (!(context_eps > 0.0)) throw ConfigError("aa: context_eps must be positive");
}

ad::Tensor entity_pool(const std::vector<ad::Tensor>& mention_embeddings) {
  if (mention_embeddings.empty()) throw ValidationError("entity_pool: entity without mention embeddings");
  const ad::Tensor stacked =
      mention_embeddings.size() == 1 ? mention_embeddings[0] : ad::concat(mention_embeddings, 0);
  return ad::logsumexp(stacked, 0);
}

ad::Tensor entity_attention(const EncoderOutput& out, const MarkedDocument& marked, std::size_t entity) {
  if (entity >= marked.mention_start.size() || marked.mention_start[entity].empty())
    throw ValidationError("entity_attention: entity " + std::to_string(entity) + " has no mentions");
  return ad::mean(ad::gather_rows(out.A, marked.mention_start[entity]), 0);
}

ad::Tensor context_weights(const ad::Tensor& a_head, const ad::Tensor& a_tail, double eps) {
  const ad::Tensor w = ad::mul(a_head, a_tail);
  const ad::Tensor denom = ad::sum(w, 1);
  std::vector<double> delta(denom.size(), 0.0);
  bool guarded = false;
  for (std::size_t i = 0; i < delta.size(); ++i)
    if (denom.values()[i] < eps) {
      delta[i] = eps - denom.values()[i];
      guarded = true;
    }
  const ad::Tensor safe = guarded ? ad::add(denom, ad::Tensor::from(denom.rows(), 1, std::move(delta))) : denom;
  return ad::mul(w, ad::reciprocal(safe));
}

ad::Tensor context_pool(const ad::Tensor& H, const ad::Tensor& a_head, const ad::Tensor& a_tail, double eps) {
  return ad::matmul(context_weights(a_head, a_tail, eps), H);
}

DynamicAdjacency dynamic_adjacency(const ad::Tensor& hv, const EdgeMatrices& edges, const AdjacencyParams& params) {
  const std::size_t n = hv.rows();
  const std::size_t d = hv.cols();
  for (const auto& a : edges)
    if (a.size() != n * n)
      throw ShapeError("dynamic_adjacency: edge matrix of " + std::to_string(a.size()) + " entries for " +
                       std::to_string(n) + " nodes");
  DynamicAdjacency out;
  out.mask.assign(n * n, 0);
  for (const auto& a : edges)
    for (std::size_t i = 0; i < n * n; ++i) out.mask[i] |= a[i];

  std::vector<std::uint8_t> isolated(n, 1);
  bool any_edge = false, any_isolated = false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      if (out.mask[i * n + j]) isolated[i] = 0;
    any_edge = any_edge || !isolated[i];
    any_isolated = any_isolated || isolated[i];
  }
  if (!any_edge) {
    out.weights = ad::Tensor::zeros(n, n);
    return out;
  }

  const std::size_t heads = params.wq[0].size();
  const double s = 1.0 / (std::sqrt(static_cast<double>(d)) * static_cast<double>(heads));
  ad::Tensor raw;
  for (std::size_t u = 0; u < kEdgeTypes; ++u) {
    bool used = false;
    for (auto v : edges[u]) used = used || v;
    if (!used) continue;
    std::vector<double> gate(edges[u].begin(), edges[u].end());
    const ad::Tensor gate_t = ad::Tensor::from(n, n, std::move(gate));
    for (std::size_t h = 0; h < heads; ++h) {
      if (params.wq[u][h].rows() != d || params.wk[u][h].rows() != d)
        throw ShapeError("dynamic_adjacency: projection " + params.wq[u][h].shape().str() + " for node states " +
                         hv.shape().str());
      const ad::Tensor score = ad::matmul(ad::matmul(hv, params.wq[u][h]), ad::transpose(ad::matmul(hv, params.wk[u][h])));
      const ad::Tensor gated = ad::mul(score, gate_t);
      raw = raw.defined() ? ad::add(raw, gated) : gated;
    }
  }
  raw = ad::scale(raw, s);

  std::vector<std::uint8_t> off(n * n, 0), dead(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (isolated[i]) dead[i * n + j] = 1;
      else if (!out.mask[i * n + j]) off[i * n + j] = 1;
    }
  ad::Tensor filled = ad::masked_fill(raw, off, ad::kNegInf);
  if (!any_isolated) {
    out.weights = ad::softmax(filled, 1);
    return out;
  }
  filled = ad::masked_fill(filled, dead, 0.0);
  std::vector<double> keep(n);
  for (std::size_t i = 0; i < n; ++i) keep[i] = isolated[i] ? 0.0 : 1.0;
  out.weights = ad::mul(ad::softmax(filled, 1), ad::Tensor::from(n, 1, std::move(keep)));
  return out;
}

ad::Tensor gcn_layer(const ad::Tensor& g, const ad::Tensor& adj, const ad::Tensor& w, const ad::Tensor& b) {
  return ad::add(ad::relu(ad::add(ad::matmul(ad::matmul(adj, g), w), b)), g);
}

AANetwork::AANetwork(const AAConfig& config, std::size_t hidden, std::size_t relations, ParamStore& store,
                     std::mt19937_64& rng)
    : config_(config), hidden_(hidden), relations_(relations) {
  config_.validate(hidden);
  const auto cls = ParamGroup::kClassifier;
  const std::size_t d = hidden;
  if (config_.use_graph) {
    for (std::size_t u = 0; u < kEdgeTypes; ++u)
      for (std::size_t h = 0; h < config_.graph_heads; ++h) {
        const std::string p = "aa.adj." + std::to_string(u) + "." + std::to_string(h);
        adj_.wq[u].push_back(store.add(p + ".q", cls, xavier(rng, d, d)));
        adj_.wk[u].push_back(store.add(p + ".k", cls, xavier(rng, d, d)));
      }
    for (std::size_t k = 0; k < config_.gcn_layers; ++k) {
      const std::string p = "aa.gcn" + std::to_string(k);
      gcn_w_.push_back(store.add(p + ".w", cls, ad::scale(xavier(rng, d, d), 0.1)));
      gcn_b_.push_back(store.add(p + ".b", cls, ad::Tensor::zeros(1, d), false));
    }
  }
  const std::size_t in = (config_.use_graph ? 3 : 2) * d;
  wh_ = store.add("aa.head.w", cls, xavier(rng, in, d));
  wt_ = store.add("aa.tail.w", cls, xavier(rng, in, d));
  bh_ = store.add("aa.head.b", cls, ad::Tensor::zeros(1, d), false);
  bt_ = config_.shared_bias ? bh_ : store.add("aa.tail.b", cls, ad::Tensor::zeros(1, d), false);
  const std::size_t block = d * d / config_.groups;
  wr_ = store.add("aa.bilinear.w", cls, xavier(rng, block, relations + 1));
  br_ = store.add("aa.bilinear.b", cls, ad::Tensor::zeros(1, relations + 1), false);
}

ad::Tensor AANetwork::node_embeddings(const Document& doc, const DocumentGraph& graph, const MarkedDocument& marked,
                                      const EncoderOutput& out) const {
  const std::size_t n = graph.size(), l = out.H.rows();
  std::vector<double> m(n * l, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = graph.nodes[i];
    if (!node.is_anaphor) {
      m[i * l + marked.mention_start[static_cast<std::size_t>(node.entity)][static_cast<std::size_t>(node.mention)]] = 1.0;
    } else {
      const auto pos = anaphor_positions(doc, marked, node.sent_id, node.start, node.end);
      for (auto p : pos) m[i * l + p] += 1.0 / static_cast<double>(pos.size());
    }
  }
  return ad::matmul(ad::Tensor::from(n, l, std::move(m)), out.H);
}

PairForward AANetwork::forward(const Document& doc, const DocumentGraph& graph, const MarkedDocument& marked,
                               const EncoderOutput& out, std::vector<std::pair<int, int>> pairs) const {
  const std::size_t E = doc.entities.size();
  PairForward res;
  if (pairs.empty())
    for (std::size_t h = 0; h < E; ++h)
      for (std::size_t t = 0; t < E; ++t)
        if (h != t) pairs.emplace_back(static_cast<int>(h), static_cast<int>(t));
  res.pairs = pairs;
  if (pairs.empty()) return res;

  std::vector<ad::Tensor> pooled, att;
  for (std::size_t e = 0; e < E; ++e) {
    if (marked.mention_start[e].empty())
      throw ValidationError("aa_forward: entity " + std::to_string(e) + " of '" + doc.doc_id + "' has no mentions");
    pooled.push_back(ad::logsumexp(ad::gather_rows(out.H, marked.mention_start[e]), 0));
    att.push_back(entity_attention(out, marked, e));
  }
  const ad::Tensor h_ent = E == 1 ? pooled[0] : ad::concat(pooled, 0);
  const ad::Tensor a_ent = E == 1 ? att[0] : ad::concat(att, 0);
  std::vector<std::size_t> hi, ti;
  for (const auto& [h, t] : pairs) {
    hi.push_back(static_cast<std::size_t>(h));
    ti.push_back(static_cast<std::size_t>(t));
  }
  res.q = context_weights(ad::gather_rows(a_ent, hi), ad::gather_rows(a_ent, ti), config_.context_eps);
  const ad::Tensor c = ad::matmul(res.q, out.H);

  std::vector<ad::Tensor> in_h = {ad::gather_rows(h_ent, hi), c};
  std::vector<ad::Tensor> in_t = {ad::gather_rows(h_ent, ti), c};
  if (config_.use_graph) {
    if (graph.entity_nodes.size() != E)
      throw ValidationError("aa_forward: graph has " + std::to_string(graph.entity_nodes.size()) +
                            " entities, document has " + std::to_string(E));
    ad::Tensor g = node_embeddings(doc, graph, marked, out);
    if (config_.gcn_layers > 0) {
      for (std::size_t it = 0; it < config_.iterations; ++it) {
        const DynamicAdjacency adj = dynamic_adjacency(g, graph.adjacency, adj_);
        res.adjacency.push_back(adj.weights);
        for (std::size_t k = 0; k < config_.gcn_layers; ++k) g = gcn_layer(g, adj.weights, gcn_w_[k], gcn_b_[k]);
      }
    }
    res.node_states = g;
    std::vector<ad::Tensor> gpool;
    for (std::size_t e = 0; e < E; ++e) {
      if (graph.entity_nodes[e].empty())
        throw ValidationError("aa_forward: entity " + std::to_string(e) + " has no mention nodes");
      gpool.push_back(ad::logsumexp(ad::gather_rows(g, graph.entity_nodes[e]), 0));
    }
    const ad::Tensor g_ent = E == 1 ? gpool[0] : ad::concat(gpool, 0);
    in_h.push_back(ad::gather_rows(g_ent, hi));
    in_t.push_back(ad::gather_rows(g_ent, ti));
  }
  const ad::Tensor zh = ad::tanh(ad::add(ad::matmul(ad::concat(in_h, 1), wh_), bh_));
  const ad::Tensor zt = ad::tanh(ad::add(ad::matmul(ad::concat(in_t, 1), wt_), bt_));
  res.logits = ad::add(ad::matmul(ad::grouped_outer(zh, zt, config_.groups), wr_), br_);
  return res;
}

}  // namespace aadocre
