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

// Encoder plus relational core bound to a token and relation vocabulary,
// per-document preprocessing, and the binary checkpoint container.

#ifndef AADOCRE_MODEL_HPP_
#define AADOCRE_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "aadocre/aa_network.hpp"
#include "aadocre/anaphor_graph.hpp"
#include "aadocre/corpus.hpp"
#include "aadocre/encoder.hpp"
#include "aadocre/params.hpp"

namespace aadocre {

struct ModelConfig {
  EncoderConfig encoder;  // vocab_size is taken from the vocabulary
  AAConfig aa;
  GraphVariant graph_variant = GraphVariant::kFull;
  bool exclude_mention_overlap = true;
  std::uint64_t seed = 1;  // parameter init and random-replace draws

  std::string to_json() const;
  static ModelConfig from_json(const std::string& text);
};

// Everything about a document that does not depend on parameters.
struct PreparedDoc {
  Document doc;
  MarkedDocument marked;
  std::vector<int> ids;
  std::vector<Anaphor> anaphors;
  DocumentGraph graph;
};

class Model {
 public:
  Model(const ModelConfig& config, Vocabulary vocab, RelationVocab relations);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;
  Model(Model&&) = default;
  Model& operator=(Model&&) = default;

  const ModelConfig& config() const { return config_; }
  const Vocabulary& vocab() const { return vocab_; }
  const RelationVocab& relations() const { return relations_; }
  ParamStore& params() { return *store_; }
  const ParamStore& params() const { return *store_; }
  const Encoder& encoder() const { return encoder_; }
  const AANetwork& network() const { return network_; }

  // Documents without a parse get no anaphor nodes.
  PreparedDoc prepare(const Document& doc) const;

  PairForward forward(const PreparedDoc& prepared, bool train = false, std::uint64_t dropout_seed = 0,
                      std::vector<std::pair<int, int>> pairs = {}) const;

  std::vector<std::vector<double>> snapshot() const;
  void restore(const std::vector<std::vector<double>>& values);

 private:
  ModelConfig config_;
  Vocabulary vocab_;
  RelationVocab relations_;
  std::unique_ptr<ParamStore> store_;
  Encoder encoder_;
  AANetwork network_;
};

// Little-endian container: magic, format version, config echo (JSON),
// relation-vocabulary hash, vocabularies, then named f64 tensors in
// registration order.
inline constexpr std::uint32_t kCheckpointVersion = 1;
void save_checkpoint(const std::filesystem::path& path, const Model& model, const std::string& train_config_json = "{}");
Model load_checkpoint(const std::filesystem::path& path, std::string* train_config_json = nullptr);

}  // namespace aadocre

#endif  // AADOCRE_MODEL_HPP_
