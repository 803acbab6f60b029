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

// Helpers shared by the unit and acceptance suites.

#ifndef AADOCRE_TESTS_SUPPORT_HPP_
#define AADOCRE_TESTS_SUPPORT_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "aadocre/model.hpp"
#include "aadocre/synthetic.hpp"
#include "aadocre/tensor.hpp"

namespace aadocre::testing {

inline ad::Tensor random_tensor(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = dist(rng);
  return ad::Tensor::from(rows, cols, std::move(v));
}

// Values bounded away from zero so relu kinks stay outside the difference stencil.
inline ad::Tensor random_nonzero(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> mag(0.1, 1.0);
  std::bernoulli_distribution sign(0.5);
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = sign(rng) ? mag(rng) : -mag(rng);
  return ad::Tensor::from(rows, cols, std::move(v));
}


// Small shapes keep finite-difference sweeps fast.
inline ModelConfig tiny_model_config(bool use_graph = true) {
  ModelConfig c;
  c.encoder.hidden = 8;
  c.encoder.layers = 2;
  c.encoder.heads = 2;
  c.encoder.ff = 8;
  c.encoder.max_len = 64;
  c.encoder.dropout = 0.0;
  c.encoder.k_att = 3;
  c.aa.gcn_layers = 2;
  c.aa.iterations = 2;
  c.aa.graph_heads = 2;
  c.aa.groups = 2;
  c.aa.use_graph = use_graph;
  c.seed = 3;
  return c;
}

// Two sentences, two entities, one fact, a pronoun bridging them.
inline Document toy_document(const std::string& id = "toy") {
  Document d = synthetic::walmart_example();
  d.doc_id = id;
  d.facts.push_back({1, 0, 0, {0, 1}});
  return d;
}

inline Model tiny_model(const std::vector<Document>& docs, bool use_graph = true, std::size_t relations = 2) {
  std::vector<std::string> names;
  for (std::size_t r = 0; r < relations; ++r) names.push_back("R" + std::to_string(r));
  return Model(tiny_model_config(use_graph), Vocabulary::build(docs), RelationVocab(names));
}

}  // namespace aadocre::testing

#endif  // AADOCRE_TESTS_SUPPORT_HPP_
