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

#include "aadocre/gradcheck.hpp"

#include <algorithm>
#include <random>

#include "aadocre/aa_network.hpp"
#include "aadocre/objectives.hpp"
#include "aadocre/params.hpp"
#include "aadocre/seeds.hpp"
#include "aadocre/synthetic.hpp"
#include "aadocre/tensor.hpp"
#include "aadocre/trainer.hpp"

namespace aadocre {
namespace {

using ad::Tensor;

Tensor uniform(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double lo = -1.0, double hi = 1.0,
               bool requires_grad = false) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = dist(rng);
  return Tensor::from(rows, cols, std::move(v), requires_grad);
}

// Entries with magnitude in [0.1, 1] keep relu kinks outside the stencil.
Tensor away_from_zero(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> mag(0.1, 1.0);
  std::bernoulli_distribution sign(0.5);
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = sign(rng) ? mag(rng) : -mag(rng);
  return Tensor::from(rows, cols, std::move(v));
}

// Random linear read-out, so every output coordinate reaches the scalar.
Tensor probe(const Tensor& y, std::uint64_t seed) {
  auto rng = stream(seed, "gradcheck/probe");
  return ad::sum(ad::mul(y, uniform(rng, y.rows(), y.cols())));
}

class Suite {
 public:
  Suite(const GradCheckOptions& options, const std::function<void(const GradCheckCase&)>& on_case)
      : options_(options), on_case_(on_case) {
    report_.tolerance = options.tolerance;
  }

  void record(const std::string& name, std::uint64_t seed, double error) {
    report_.cases.push_back({name, seed, error});
    if (on_case_) on_case_(report_.cases.back());
  }

  void unary(const std::string& name, std::uint64_t seed, const Tensor& x,
             const std::function<Tensor(const Tensor&)>& fn) {
    record(name, seed, ad::grad_check([&](const Tensor& t) { return probe(fn(t), seed); }, x.clone(), options_.step));
  }

  void leaves(const std::string& name, std::uint64_t seed, const std::vector<Tensor>& xs,
              const std::function<Tensor()>& fn, std::size_t max_coords = 0) {
    record(name, seed, ad::grad_check(fn, xs, options_.step, max_coords));
  }

  void primitives(std::uint64_t seed) {
    auto rng = stream(seed, "gradcheck/primitives");
    const auto a = uniform(rng, 3, 4);
    const auto b = uniform(rng, 3, 4);
    const auto row = uniform(rng, 1, 4);
    const auto col = uniform(rng, 3, 1);
    const auto sq = uniform(rng, 4, 5);
    const auto pos = uniform(rng, 3, 4, 0.5, 2.0);
    const auto kinked = away_from_zero(rng, 3, 4);
    const auto gamma = uniform(rng, 1, 4, 0.5, 1.5);
    const auto beta = uniform(rng, 1, 4);
    const std::vector<std::size_t> idx{2, 0, 2, 1};
    std::vector<std::uint8_t> mask(12, 0);
    mask[1] = mask[6] = 1;

    unary("matmul", seed, a, [&](const Tensor& t) { return ad::matmul(t, sq); });
    unary("matmul-transposed", seed, a, [&](const Tensor& t) { return ad::matmul(ad::transpose(sq), ad::transpose(t)); });
    unary("add", seed, a, [&](const Tensor& t) { return ad::add(t, b); });
    unary("add-broadcast-row", seed, a, [&](const Tensor& t) { return ad::add(b, ad::slice_rows(t, 0, 1)); });
    unary("sub-broadcast-col", seed, a, [&](const Tensor& t) { return ad::sub(b, ad::slice_cols(t, 0, 1)); });
    unary("mul-broadcast-scalar", seed, a,
          [&](const Tensor& t) { return ad::mul(b, ad::slice_rows(ad::slice_cols(t, 1, 2), 2, 3)); });
    unary("mul-row", seed, a, [&](const Tensor& t) { return ad::mul(t, row); });
    unary("mul-col", seed, a, [&](const Tensor& t) { return ad::mul(t, col); });
    unary("scale", seed, a, [&](const Tensor& t) { return ad::scale(t, -2.5); });
    unary("add_scalar", seed, a, [&](const Tensor& t) { return ad::add_scalar(t, 0.7); });
    unary("tanh", seed, a, [&](const Tensor& t) { return ad::tanh(t); });
    unary("relu", seed, a, [&](const Tensor& t) { return ad::relu(ad::add(t, kinked)); });
    unary("exp", seed, a, [&](const Tensor& t) { return ad::exp(t); });
    unary("log", seed, a, [&](const Tensor& t) { return ad::log(ad::add(ad::exp(t), pos)); });
    unary("reciprocal", seed, a, [&](const Tensor& t) { return ad::reciprocal(ad::add(ad::exp(t), pos)); });
    unary("softmax-rows", seed, a, [&](const Tensor& t) { return ad::softmax(t, 1); });
    unary("softmax-cols", seed, a, [&](const Tensor& t) { return ad::softmax(t, 0); });
    unary("softmax-masked", seed, a, [&](const Tensor& t) { return ad::softmax(ad::masked_fill(t, mask, ad::kNegInf), 1); });
    unary("log_softmax", seed, a, [&](const Tensor& t) { return ad::log_softmax(t, 1); });
    unary("log_softmax-masked", seed, a, [&](const Tensor& t) {
      return ad::masked_fill(ad::log_softmax(ad::masked_fill(t, mask, ad::kNegInf), 1), mask, 0.0);
    });
    unary("logsumexp-cols", seed, a, [&](const Tensor& t) { return ad::logsumexp(t, 0); });
    unary("logsumexp-rows", seed, a, [&](const Tensor& t) { return ad::logsumexp(t, 1); });
    unary("sum-cols", seed, a, [&](const Tensor& t) { return ad::sum(t, 0); });
    unary("sum-rows", seed, a, [&](const Tensor& t) { return ad::sum(t, 1); });
    unary("mean-cols", seed, a, [&](const Tensor& t) { return ad::mean(t, 0); });
    unary("mean", seed, a, [&](const Tensor& t) { return ad::mean(t); });
    unary("concat-cols", seed, a, [&](const Tensor& t) { return ad::concat({t, b, t}, 1); });
    unary("concat-rows", seed, a, [&](const Tensor& t) { return ad::concat({b, t}, 0); });
    unary("gather_rows", seed, a, [&](const Tensor& t) { return ad::gather_rows(t, idx); });
    unary("layer_norm", seed, a, [&](const Tensor& t) { return ad::layer_norm(t, gamma, beta); });
    unary("grouped_outer-left", seed, a, [&](const Tensor& t) { return ad::grouped_outer(t, b, 2); });
    unary("grouped_outer-right", seed, a, [&](const Tensor& t) { return ad::grouped_outer(b, t, 1); });
    unary("grouped_outer-square", seed, a, [&](const Tensor& t) { return ad::grouped_outer(t, t, 4); });

    auto g = gamma.clone();
    auto bb = beta.clone();
    g.set_requires_grad(true);
    bb.set_requires_grad(true);
    leaves("layer_norm-affine", seed, {g, bb}, [&] { return probe(ad::layer_norm(a, g, bb), seed); });
  }

  void components(std::uint64_t seed) {
    auto rng = stream(seed, "gradcheck/components");
    const std::size_t l = 7, d = 4, n = 5;

    std::vector<Tensor> mentions = {uniform(rng, 1, d, -1, 1, true), uniform(rng, 1, d, -1, 1, true),
                                    uniform(rng, 1, d, -1, 1, true)};
    leaves("entity_pool", seed, mentions, [&] { return probe(entity_pool(mentions), seed); });

    auto H = uniform(rng, l, d, -1, 1, true);
    auto ah = uniform(rng, 2, l, -2, 2, true);
    auto at = uniform(rng, 2, l, -2, 2, true);
    leaves("context_pool", seed, {H, ah, at},
           [&] { return probe(context_pool(H, ad::softmax(ah, 1), ad::softmax(at, 1)), seed); });

    AdjacencyParams params;
    std::vector<Tensor> adj_leaves;
    for (std::size_t u = 0; u < kEdgeTypes; ++u)
      for (std::size_t h = 0; h < 2; ++h) {
        params.wq[u].push_back(uniform(rng, d, d, -1, 1, true));
        params.wk[u].push_back(uniform(rng, d, d, -1, 1, true));
        adj_leaves.push_back(params.wq[u][h]);
        adj_leaves.push_back(params.wk[u][h]);
      }
    EdgeMatrices edges;
    for (auto& e : edges) e.assign(n * n, 0);
    std::uniform_int_distribution<std::size_t> type(0, kEdgeTypes);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const std::size_t t = type(rng);
        if (t < kEdgeTypes) edges[t][i * n + j] = edges[t][j * n + i] = 1;
      }
    auto hv = uniform(rng, n, d, -1, 1, true);
    adj_leaves.push_back(hv);
    leaves("dynamic_adjacency", seed, adj_leaves, [&] { return probe(dynamic_adjacency(hv, edges, params).weights, seed); });

    auto g = away_from_zero(rng, n, d);
    g.set_requires_grad(true);
    auto adj = ad::softmax(uniform(rng, n, n, -2, 2), 1);
    auto w = uniform(rng, d, d, -0.3, 0.3, true);
    auto b = uniform(rng, 1, d, -0.1, 0.1, true);
    leaves("gcn_layer", seed, {g, w, b}, [&] { return probe(gcn_layer(g, adj, w, b), seed); });

    auto logits = uniform(rng, 3, 5, -2, 2, true);
    const std::vector<std::uint8_t> labels = {1, 0, 1, 0, 0, 0, 0, 0, 0, 1, 1, 1};
    leaves("atl_loss", seed, {logits}, [&] { return atl_loss(logits, labels); });

    auto pl = uniform(rng, 2, 4, -2, 2, true);
    const std::vector<std::vector<double>> gold = {gold_evidence({1}, 4), gold_evidence({0, 3}, 4)};
    leaves("evidence_loss", seed, {pl}, [&] { return evidence_loss(ad::softmax(pl, 1), gold); });
  }

  void encoder(std::uint64_t seed) {
    EncoderConfig cfg;
    cfg.vocab_size = 12;
    cfg.hidden = 8;
    cfg.layers = 2;
    cfg.heads = 2;
    cfg.ff = 8;
    cfg.max_len = 16;
    cfg.dropout = 0.2;
    cfg.k_att = 2;
    cfg.locality = 0.5;
    ParamStore store;
    auto rng = stream(seed, "gradcheck/encoder");
    Encoder enc(cfg, store, rng);
    std::uniform_int_distribution<int> tok(0, 11);
    std::vector<int> ids(6);
    for (auto& i : ids) i = tok(rng);
    leaves("encoder", seed, store.tensors(), [&] {
      const auto out = enc.encode(ids, true, seed);
      return ad::add(probe(out.H, seed), probe(out.A, seed + 1));
    }, 6);
  }

  void end_to_end(std::uint64_t seed) {
    Document a = synthetic::walmart_example();
    a.doc_id = "toy";
    a.facts.push_back({1, 0, 0, {0, 1}});
    Document b = synthetic::relation_corpus({.docs = 1, .relations = 2, .seed = seed + 1}).docs.front();
    ModelConfig cfg;
    cfg.encoder.hidden = 8;
    cfg.encoder.layers = 2;
    cfg.encoder.heads = 2;
    cfg.encoder.ff = 8;
    cfg.encoder.max_len = 256;
    cfg.encoder.dropout = 0.0;
    cfg.encoder.k_att = 2;
    cfg.aa.gcn_layers = 2;
    cfg.aa.iterations = 2;
    cfg.aa.graph_heads = 2;
    cfg.aa.groups = 2;
    cfg.seed = seed;
    Model m(cfg, Vocabulary::build({a, b}), RelationVocab({"R0", "R1"}));
    // Checked at full-scale GCN weights rather than the damped init.
    auto rng = stream(seed, "gradcheck/end-to-end");
    for (auto& p : m.params().all()) {
      if (!p.name.starts_with("aa.gcn") || !p.name.ends_with(".w")) continue;
      const auto fresh = xavier(rng, p.tensor.rows(), p.tensor.cols());
      std::copy(fresh.values().begin(), fresh.values().end(), p.tensor.mutable_values().begin());
    }
    const auto pa = m.prepare(a);
    const auto pb = m.prepare(b);
    leaves("end-to-end-loss", seed, m.params().tensors(), [&] {
      return ad::scale(ad::add(document_loss(m, pa, 0.1).l_total, document_loss(m, pb, 0.1).l_total), 0.5);
    }, 3);
  }

  GradCheckReport run() {
    for (std::uint64_t seed = 0; seed < options_.seeds; ++seed) {
      primitives(seed);
      components(seed);
      encoder(seed);
      end_to_end(seed);
    }
    return std::move(report_);
  }

 private:
  GradCheckOptions options_;
  std::function<void(const GradCheckCase&)> on_case_;
  GradCheckReport report_;
};

}  // namespace

double GradCheckReport::worst() const {
  double w = 0.0;
  for (const auto& c : cases) w = std::max(w, c.error);
  return w;
}

std::size_t GradCheckReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(cases.begin(), cases.end(), [&](const GradCheckCase& c) { return !(c.error < tolerance); }));
}

GradCheckReport run_gradcheck_suite(const GradCheckOptions& options,
                                    const std::function<void(const GradCheckCase&)>& on_case) {
  return Suite(options, on_case).run();
}

}  // namespace aadocre
