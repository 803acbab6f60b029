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

#include "aadocre/inference.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "aadocre/errors.hpp"
#include "aadocre/objectives.hpp"

namespace aadocre {

using nlohmann::json;

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      (void)t;
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::vector<std::vector<double>> rows_of(const ad::Tensor& t) {
  std::vector<std::vector<double>> out(t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r) out[r].assign(t.values().begin() + static_cast<std::ptrdiff_t>(r * t.cols()),
                                                          t.values().begin() + static_cast<std::ptrdiff_t>((r + 1) * t.cols()));
  return out;
}

double f1_of(std::size_t correct, std::size_t pred, std::size_t gold, double* p = nullptr, double* r = nullptr) {
  const double prec = pred ? static_cast<double>(correct) / static_cast<double>(pred) : 0.0;
  const double rec = gold ? static_cast<double>(correct) / static_cast<double>(gold) : 0.0;
  if (p) *p = prec;
  if (r) *r = rec;
  return prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
}

}  // namespace

DocScores score_document(const Model& model, const Document& doc, std::vector<std::pair<int, int>> pairs) {
  ad::NoGradGuard no_grad;
  const PreparedDoc prep = model.prepare(doc);
  const PairForward fw = model.forward(prep, false, 0, std::move(pairs));
  DocScores s;
  s.doc_id = doc.doc_id;
  s.pairs = fw.pairs;
  if (fw.pairs.empty()) return s;
  s.logits = rows_of(fw.logits);
  s.sentence_dist = rows_of(ad::matmul(fw.q, sentence_matrix(prep.marked.sentence_spans, prep.marked.size())));
  return s;
}

std::vector<DocScores> score_documents(const Model& model, const std::vector<Document>& docs, std::size_t threads) {
  std::vector<DocScores> out(docs.size());
  parallel_for(docs.size(), threads, [&](std::size_t i) { out[i] = score_document(model, docs[i]); });
  return out;
}

double relation_probability(const std::vector<double>& logits, std::size_t relation) {
  return 1.0 / (1.0 + std::exp(-(logits[relation] - logits.back())));
}

double fusion_score(const std::vector<double>& logits, std::size_t relation) {
  return relation_probability(logits, relation) - 0.5;
}

std::vector<int> select_evidence(const std::vector<double>& p, double threshold) {
  std::vector<int> out;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] >= threshold) out.push_back(static_cast<int>(i));
  if (out.empty() && !p.empty())
    out.push_back(static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin()));
  return out;
}

std::vector<Triple> predict(const std::vector<DocScores>& scores, double evidence_threshold) {
  std::vector<Triple> out;
  for (const auto& d : scores)
    for (std::size_t k = 0; k < d.pairs.size(); ++k) {
      const auto& o = d.logits[k];
      const std::size_t th = o.size() - 1;
      std::vector<int> ev;
      for (std::size_t r = 0; r < th; ++r) {
        if (!(o[r] > o[th])) continue;
        if (ev.empty()) ev = select_evidence(d.sentence_dist[k], evidence_threshold);
        out.push_back({d.doc_id, d.pairs[k].first, d.pairs[k].second, static_cast<int>(r),
                       relation_probability(o, r), ev});
      }
    }
  std::sort(out.begin(), out.end());
  return out;
}

PseudoDocument pseudo_document(const Document& doc, const std::vector<int>& sentence_ids) {
  std::vector<int> keep(doc.sentences.size(), -1);
  for (int s : sentence_ids) {
    if (s < 0 || static_cast<std::size_t>(s) >= doc.sentences.size())
      throw ValidationError("pseudo_document: sentence " + std::to_string(s) + " out of range");
    keep[static_cast<std::size_t>(s)] = 0;
  }
  PseudoDocument out;
  out.doc.doc_id = doc.doc_id;
  int next = 0;
  for (std::size_t s = 0; s < doc.sentences.size(); ++s)
    if (keep[s] == 0) {
      keep[s] = next++;
      out.doc.sentences.push_back(doc.sentences[s]);
    }
  if (next == 0) throw ValidationError("pseudo_document: no sentences selected");

  if (!doc.parse.empty()) {
    const auto offsets = doc.sentence_offsets();
    std::vector<int> flat_map(doc.token_count(), -1);
    int pos = 0;
    for (std::size_t s = 0; s < doc.sentences.size(); ++s)
      if (keep[s] >= 0)
        for (std::size_t i = offsets[s]; i < offsets[s + 1]; ++i) flat_map[i] = pos++;
    for (std::size_t i = 0; i < flat_map.size(); ++i) {
      if (flat_map[i] < 0) continue;
      ParseToken t = doc.parse.tokens[i];
      const int h = flat_map[static_cast<std::size_t>(t.head)];
      t.head = h >= 0 ? h : flat_map[i];
      out.doc.parse.tokens.push_back(t);
    }
  }

  out.entity_map.assign(doc.entities.size(), -1);
  for (std::size_t e = 0; e < doc.entities.size(); ++e) {
    Entity ne;
    ne.type = doc.entities[e].type;
    for (Mention m : doc.entities[e].mentions) {
      if (keep[static_cast<std::size_t>(m.sent_id)] < 0) continue;
      m.sent_id = keep[static_cast<std::size_t>(m.sent_id)];
      ne.mentions.push_back(m);
    }
    if (ne.mentions.empty()) continue;
    ne.entity_id = static_cast<int>(out.doc.entities.size());
    out.entity_map[e] = ne.entity_id;
    out.doc.entities.push_back(std::move(ne));
  }
  for (const auto& f : doc.facts) {
    const int h = out.entity_map[static_cast<std::size_t>(f.head)];
    const int t = out.entity_map[static_cast<std::size_t>(f.tail)];
    if (h < 0 || t < 0) continue;
    RelationFact nf{h, t, f.relation, {}};
    for (int s : f.evidence)
      if (keep[static_cast<std::size_t>(s)] >= 0) nf.evidence.push_back(keep[static_cast<std::size_t>(s)]);
    out.doc.facts.push_back(std::move(nf));
  }
  return out;
}

double fuse(double p_orig, double p_pseudo, double tau) { return p_orig + p_pseudo - tau; }

FusionMode parse_fusion_mode(const std::string& name) {
  if (name == "none") return FusionMode::kNone;
  if (name == "isf" || name == "ISF") return FusionMode::kISF;
  if (name == "iscf" || name == "ISCF") return FusionMode::kISCF;
  throw ConfigError("unknown fusion mode '" + name + "' (expected none, isf, iscf)");
}

const char* to_string(FusionMode mode) {
  switch (mode) {
    case FusionMode::kNone: return "none";
    case FusionMode::kISF: return "isf";
    case FusionMode::kISCF: return "iscf";
  }
  return "none";
}

std::vector<FusionCandidate> fusion_candidates(const std::vector<Document>& docs, const std::vector<DocScores>& orig,
                                               const Model* pseudo_model, double evidence_threshold,
                                               std::size_t threads) {
  if (docs.size() != orig.size()) throw ValidationError("fusion: score list does not match documents");
  std::vector<std::vector<FusionCandidate>> per_doc(docs.size());
  parallel_for(docs.size(), threads, [&](std::size_t di) {
    const Document& doc = docs[di];
    const DocScores& s = orig[di];
    if (s.doc_id != doc.doc_id) throw ValidationError("fusion: score order does not match documents");
    std::vector<std::vector<int>> evidence(s.pairs.size());
    std::map<std::vector<int>, std::vector<std::size_t>> groups;
    for (std::size_t k = 0; k < s.pairs.size(); ++k) {
      evidence[k] = select_evidence(s.sentence_dist[k], evidence_threshold);
      groups[evidence[k]].push_back(k);
    }
    std::vector<std::vector<double>> pseudo(s.pairs.size());
    if (pseudo_model) {
      for (const auto& [ids, members] : groups) {
        const PseudoDocument pd = pseudo_document(doc, ids);
        std::vector<std::pair<int, int>> pairs;
        std::vector<std::size_t> which;
        for (std::size_t k : members) {
          const int h = pd.entity_map[static_cast<std::size_t>(s.pairs[k].first)];
          const int t = pd.entity_map[static_cast<std::size_t>(s.pairs[k].second)];
          if (h < 0 || t < 0) continue;
          pairs.emplace_back(h, t);
          which.push_back(k);
        }
        if (pairs.empty()) continue;
        const DocScores ps = score_document(*pseudo_model, pd.doc, pairs);
        for (std::size_t j = 0; j < which.size(); ++j) pseudo[which[j]] = ps.logits[j];
      }
    }
    auto& out = per_doc[di];
    for (std::size_t k = 0; k < s.pairs.size(); ++k) {
      const std::size_t th = s.logits[k].size() - 1;
      for (std::size_t r = 0; r < th; ++r)
        out.push_back({doc.doc_id, s.pairs[k].first, s.pairs[k].second, static_cast<int>(r),
                       fusion_score(s.logits[k], r), pseudo[k].empty() ? 0.0 : fusion_score(pseudo[k], r),
                       evidence[k]});
    }
  });
  std::vector<FusionCandidate> all;
  for (auto& v : per_doc) all.insert(all.end(), v.begin(), v.end());
  return all;
}

std::vector<Triple> fused_predictions(const std::vector<FusionCandidate>& candidates, double tau) {
  std::vector<Triple> out;
  for (const auto& c : candidates) {
    const double f = fuse(c.orig, c.pseudo, tau);
    if (f > 0.0) out.push_back({c.doc_id, c.head, c.tail, c.relation, f, c.evidence});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string Metrics::to_json() const {
  return json{{"F1", f1},         {"Ign_F1", ign_f1}, {"Intra_F1", intra_f1}, {"Inter_F1", inter_f1},
              {"P", precision},   {"R", recall},      {"n_pred", n_pred},     {"n_gold", n_gold}}
      .dump();
}

FactKeys train_fact_keys(const std::vector<Document>& docs, const RelationVocab& relations) {
  FactKeys keys;
  for (const auto& d : docs)
    for (const auto& f : d.facts)
      for (const auto& mh : d.entities[static_cast<std::size_t>(f.head)].mentions)
        for (const auto& mt : d.entities[static_cast<std::size_t>(f.tail)].mentions)
          keys.insert({mh.name, mt.name, relations.name(f.relation)});
  return keys;
}

Metrics evaluate(const std::vector<Triple>& preds, const std::vector<Document>& gold, const RelationVocab& relations,
                 const FactKeys& train_facts) {
  std::map<std::string, const Document*> by_id;
  for (const auto& d : gold) by_id[d.doc_id] = &d;

  using Key = std::tuple<std::string, int, int, int>;
  std::set<Key> gold_set, pred_set;
  for (const auto& d : gold)
    for (const auto& f : d.facts) gold_set.insert({d.doc_id, f.head, f.tail, f.relation});
  for (const auto& t : preds) {
    const auto it = by_id.find(t.doc_id);
    if (it == by_id.end()) throw ValidationError("evaluate: prediction for unknown document '" + t.doc_id + "'");
    const auto E = static_cast<int>(it->second->entities.size());
    if (t.head < 0 || t.head >= E || t.tail < 0 || t.tail >= E || t.relation < 0 ||
        static_cast<std::size_t>(t.relation) >= relations.size())
      throw ValidationError("evaluate: prediction indices out of range in '" + t.doc_id + "'");
    pred_set.insert({t.doc_id, t.head, t.tail, t.relation});
  }

  auto intra = [&](const Key& k) {
    const Document& d = *by_id.at(std::get<0>(k));
    for (const auto& mh : d.entities[static_cast<std::size_t>(std::get<1>(k))].mentions)
      for (const auto& mt : d.entities[static_cast<std::size_t>(std::get<2>(k))].mentions)
        if (mh.sent_id == mt.sent_id) return true;
    return false;
  };
  auto in_train = [&](const Key& k) {
    if (train_facts.empty()) return false;
    const Document& d = *by_id.at(std::get<0>(k));
    const std::string& rel = relations.name(std::get<3>(k));
    for (const auto& mh : d.entities[static_cast<std::size_t>(std::get<1>(k))].mentions)
      for (const auto& mt : d.entities[static_cast<std::size_t>(std::get<2>(k))].mentions)
        if (train_facts.count({mh.name, mt.name, rel})) return true;
    return false;
  };

  std::size_t correct = 0, ci = 0, ce = 0, pi = 0, pe = 0, gi = 0, ge = 0;
  std::size_t ign_correct = 0, ign_pred = 0, ign_gold = 0;
  for (const auto& k : pred_set) {
    const bool hit = gold_set.count(k) > 0;
    const bool is_intra = intra(k);
    const bool seen = in_train(k);
    correct += hit;
    (is_intra ? pi : pe) += 1;
    if (hit) (is_intra ? ci : ce) += 1;
    if (!seen) {
      ++ign_pred;
      ign_correct += hit;
    }
  }
  for (const auto& k : gold_set) {
    (intra(k) ? gi : ge) += 1;
    if (!in_train(k)) ++ign_gold;
  }
  Metrics m;
  m.n_pred = pred_set.size();
  m.n_gold = gold_set.size();
  m.f1 = f1_of(correct, pred_set.size(), gold_set.size(), &m.precision, &m.recall);
  m.ign_f1 = f1_of(ign_correct, ign_pred, ign_gold);
  m.intra_f1 = f1_of(ci, pi, gi);
  m.inter_f1 = f1_of(ce, pe, ge);
  return m;
}

std::vector<double> default_tau_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 40; ++i) g.push_back(0.05 * i);
  return g;
}

double tune_tau(const std::vector<FusionCandidate>& candidates, const std::vector<Document>& gold,
                const RelationVocab& relations, const std::vector<double>& grid) {
  if (grid.empty()) throw ConfigError("tune_tau: empty grid");
  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  double best_tau = sorted[0], best_f1 = -1.0;
  for (double tau : sorted) {
    const double f1 = evaluate(fused_predictions(candidates, tau), gold, relations).f1;
    if (f1 > best_f1) {
      best_f1 = f1;
      best_tau = tau;
    }
  }
  return best_tau;
}

std::string predictions_jsonl(const std::vector<Triple>& triples, const RelationVocab& relations) {
  std::vector<Triple> sorted = triples;
  std::sort(sorted.begin(), sorted.end());
  std::string out;
  for (const auto& t : sorted) {
    json j = {{"title", t.doc_id},   {"h_idx", t.head},   {"t_idx", t.tail},
              {"r", relations.name(t.relation)}, {"score", t.score}, {"evidence", t.evidence}};
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<Triple> parse_predictions(const std::string& text, const RelationVocab& relations) {
  std::vector<Triple> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      Triple t;
      t.doc_id = j.at("title").get<std::string>();
      t.head = j.at("h_idx").get<int>();
      t.tail = j.at("t_idx").get<int>();
      const std::string r = j.at("r").get<std::string>();
      t.relation = relations.id(r);
      if (t.relation < 0) throw ValidationError("predictions line " + std::to_string(lineno) + ": unknown relation '" + r + "'");
      t.score = j.value("score", 1.0);
      if (j.contains("evidence")) t.evidence = j["evidence"].get<std::vector<int>>();
      out.push_back(std::move(t));
    } catch (const json::exception& ex) {
      throw ParseError("predictions line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return out;
}

}  // namespace aadocre
