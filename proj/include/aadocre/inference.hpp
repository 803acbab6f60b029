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

// Threshold prediction, evidence selection, pseudo documents, score fusion
// and DocRED-style metrics.

#ifndef AADOCRE_INFERENCE_HPP_
#define AADOCRE_INFERENCE_HPP_

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "aadocre/corpus.hpp"
#include "aadocre/model.hpp"

namespace aadocre {

// Raw scores of one document: one entry per scored ordered pair.
struct DocScores {
  std::string doc_id;
  std::vector<std::pair<int, int>> pairs;
  std::vector<std::vector<double>> logits;         // |R| + 1 per pair, TH last
  std::vector<std::vector<double>> sentence_dist;  // p per pair
};

struct Triple {
  std::string doc_id;
  int head = 0;
  int tail = 0;
  int relation = 0;
  double score = 0.0;
  std::vector<int> evidence;

  auto key() const { return std::tie(doc_id, head, tail, relation); }
  bool operator<(const Triple& o) const { return key() < o.key(); }
};

// Scores every ordered pair of every document. Runs documents on up to
// `threads` workers; results are in document order.
std::vector<DocScores> score_documents(const Model& model, const std::vector<Document>& docs, std::size_t threads = 1);
DocScores score_document(const Model& model, const Document& doc, std::vector<std::pair<int, int>> pairs = {});

// sigmoid(o_r - o_TH)
double relation_probability(const std::vector<double>& logits, std::size_t relation);
// Fusion score: relation_probability - 1/2, positive exactly when o_r > o_TH.
double fusion_score(const std::vector<double>& logits, std::size_t relation);

// r is emitted iff o_r > o_TH.
std::vector<Triple> predict(const std::vector<DocScores>& scores, double evidence_threshold = 0.2);

// {i : p_i >= threshold}, or the argmax when empty.
std::vector<int> select_evidence(const std::vector<double>& p, double threshold);

struct PseudoDocument {
  Document doc;
  std::vector<int> entity_map;  // original entity -> pseudo entity, -1 when dropped
};

PseudoDocument pseudo_document(const Document& doc, const std::vector<int>& sentence_ids);

double fuse(double p_orig, double p_pseudo, double tau);

enum class FusionMode { kNone, kISF, kISCF };
FusionMode parse_fusion_mode(const std::string& name);
const char* to_string(FusionMode mode);

// Per (doc, head, tail, relation): original and pseudo fusion scores.
struct FusionCandidate {
  std::string doc_id;
  int head = 0, tail = 0, relation = 0;
  double orig = 0.0;
  double pseudo = 0.0;
  std::vector<int> evidence;
};

// Pseudo scores come from `pseudo_model` on per-pair pseudo documents built
// from the primary model's evidence; `pseudo_model` null means an empty
// pseudo pass (all zeros).
std::vector<FusionCandidate> fusion_candidates(const std::vector<Document>& docs, const std::vector<DocScores>& orig,
                                               const Model* pseudo_model, double evidence_threshold,
                                               std::size_t threads = 1);

std::vector<Triple> fused_predictions(const std::vector<FusionCandidate>& candidates, double tau);

struct Metrics {
  double f1 = 0, ign_f1 = 0, intra_f1 = 0, inter_f1 = 0, precision = 0, recall = 0;
  std::size_t n_pred = 0, n_gold = 0;

  std::string to_json() const;
};

// (head mention name, tail mention name, relation name) over every mention pair.
using FactKeys = std::set<std::tuple<std::string, std::string, std::string>>;
FactKeys train_fact_keys(const std::vector<Document>& docs, const RelationVocab& relations);

Metrics evaluate(const std::vector<Triple>& preds, const std::vector<Document>& gold, const RelationVocab& relations,
                 const FactKeys& train_facts = {});

std::vector<double> default_tau_grid();
// Grid value with the best F1; ties resolve to the smallest value.
double tune_tau(const std::vector<FusionCandidate>& candidates, const std::vector<Document>& gold,
                const RelationVocab& relations, const std::vector<double>& grid);

// Line-delimited {title, h_idx, t_idx, r, score, evidence}.
std::string predictions_jsonl(const std::vector<Triple>& triples, const RelationVocab& relations);
std::vector<Triple> parse_predictions(const std::string& text, const RelationVocab& relations);

}  // namespace aadocre

#endif  // AADOCRE_INFERENCE_HPP_
