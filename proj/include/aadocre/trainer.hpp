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

// Training configuration, per-document losses, AdamW and the training loop.

#ifndef AADOCRE_TRAINER_HPP_
#define AADOCRE_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "aadocre/corpus.hpp"
#include "aadocre/model.hpp"

namespace aadocre {

struct TrainConfig {
  int epochs = 30;
  double lr_encoder = 5e-5;
  double lr_classifier = 1e-4;
  int batch_size = 4;
  double warmup_ratio = 0.06;
  double beta = 0.1;
  std::uint64_t seed = 1;
  double weight_decay = 0.01;
  double max_grad_norm = 1.0;
  // model shape
  int hidden = 64;
  int layers = 2;
  int heads = 2;
  int ff = 128;
  int max_len = 512;
  double dropout = 0.1;
  int k_att = 3;
  double locality = 0.0;
  int gcn_layers = 2;
  int iterations = 2;
  int graph_heads = 2;
  int groups = 2;
  bool shared_bias = true;
  // variants
  bool use_graph = true;
  bool use_evidence = true;
  std::string anaphor_mode = "full";  // full | no-anaphor | random-replace
  bool exclude_mention_overlap = true;
  int min_count = 1;

  void validate() const;
  double effective_beta() const { return use_evidence ? beta : 0.0; }
  ModelConfig model_config() const;

  std::string to_json() const;
  static TrainConfig from_json(const std::string& text);
  // key = value assignment by field name; throws ConfigError on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  static const std::vector<std::string>& keys();
};

struct DocLoss {
  ad::Tensor l_re;     // mean adaptive-threshold loss over pairs
  ad::Tensor l_evi;    // KL summed over pairs with a relation and evidence
  ad::Tensor l_total;  // l_re + beta * l_evi
  std::size_t pairs = 0;
  std::size_t evidence_pairs = 0;
};

DocLoss document_loss(const Model& model, const PreparedDoc& doc, double beta, bool train = false,
                      std::uint64_t dropout_seed = 0);

class AdamW {
 public:
  explicit AdamW(ParamStore& store, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  // One update with per-group learning rates; returns the pre-clip gradient norm.
  double step(double lr_encoder, double lr_classifier, double weight_decay, double max_grad_norm);
  std::size_t steps() const { return t_; }

 private:
  ParamStore& store_;
  double b1_, b2_, eps_;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

// Linear warmup over the first warmup_steps, then linear decay to zero.
double lr_factor(std::size_t step, std::size_t total_steps, std::size_t warmup_steps);

struct EpochLog {
  int epoch = 0;
  std::size_t step = 0;
  double l_re = 0, l_evi = 0, l_total = 0, lr = 0;
  double dev_f1 = std::numeric_limits<double>::quiet_NaN();

  std::string to_json() const;
};

struct FitSummary {
  std::vector<EpochLog> log;
  double best_dev_f1 = std::numeric_limits<double>::quiet_NaN();
  int best_epoch = 0;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// Optimizes `model` in place. With `dev`, the parameters of the best dev-F1
// epoch are restored at the end; otherwise the final ones are kept. A
// non-finite loss aborts with NumericError.
FitSummary fit(Model& model, const std::vector<Document>& docs, const std::vector<Document>* dev,
               const TrainConfig& config, const EpochCallback& on_epoch = {});

struct TrainResult {
  Model model;
  FitSummary summary;
};

// Builds the vocabulary and a fresh model from the training documents, then fits.
TrainResult train(const Corpus& corpus, const std::vector<Document>* dev, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

}  // namespace aadocre

#endif  // AADOCRE_TRAINER_HPP_
