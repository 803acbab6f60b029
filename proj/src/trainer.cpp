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

#include "aadocre/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "aadocre/errors.hpp"
#include "aadocre/inference.hpp"
#include "aadocre/objectives.hpp"
#include "aadocre/seeds.hpp"

namespace aadocre {

using nlohmann::json;

namespace {

long long parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  return x;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

using Setter = void (*)(TrainConfig&, const std::string&, const std::string&);

#define INT_FIELD(name) {#name, [](TrainConfig& c, const std::string& k, const std::string& v) { c.name = static_cast<decltype(c.name)>(parse_int(k, v)); }}
#define DBL_FIELD(name) {#name, [](TrainConfig& c, const std::string& k, const std::string& v) { c.name = parse_double(k, v); }}
#define BOOL_FIELD(name) {#name, [](TrainConfig& c, const std::string& k, const std::string& v) { c.name = parse_bool(k, v); }}

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      INT_FIELD(epochs),      DBL_FIELD(lr_encoder),  DBL_FIELD(lr_classifier), INT_FIELD(batch_size),
      DBL_FIELD(warmup_ratio), DBL_FIELD(beta),       INT_FIELD(seed),          DBL_FIELD(weight_decay),
      DBL_FIELD(max_grad_norm), INT_FIELD(hidden),    INT_FIELD(layers),        INT_FIELD(heads),
      INT_FIELD(ff),          INT_FIELD(max_len),     DBL_FIELD(dropout),       INT_FIELD(k_att),
      DBL_FIELD(locality),
      INT_FIELD(gcn_layers),  INT_FIELD(iterations),  INT_FIELD(graph_heads),   INT_FIELD(groups),
      BOOL_FIELD(shared_bias), BOOL_FIELD(use_graph), BOOL_FIELD(use_evidence),
      {"anaphor_mode", [](TrainConfig& c, const std::string&, const std::string& v) {
         parse_graph_variant(v);
         c.anaphor_mode = v;
       }},
      BOOL_FIELD(exclude_mention_overlap), INT_FIELD(min_count)};
  return table;
}

#undef INT_FIELD
#undef DBL_FIELD
#undef BOOL_FIELD

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (!(lr_encoder >= 0.0) || !(lr_classifier >= 0.0)) throw ConfigError("learning rates must be non-negative");
  if (batch_size <= 0) throw ConfigError("batch_size must be positive");
  if (!(warmup_ratio >= 0.0 && warmup_ratio < 1.0)) throw ConfigError("warmup_ratio must lie in [0, 1)");
  if (!(beta >= 0.0)) throw ConfigError("beta must be non-negative");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be non-negative");
  if (!(max_grad_norm > 0.0)) throw ConfigError("max_grad_norm must be positive");
  if (hidden <= 0 || layers <= 0 || heads <= 0 || ff <= 0 || max_len <= 0 || k_att <= 0)
    throw ConfigError("hidden, layers, heads, ff, max_len and k_att must be positive");
  if (gcn_layers < 0 || iterations <= 0 || graph_heads <= 0 || groups <= 0)
    throw ConfigError("gcn_layers must be non-negative; iterations, graph_heads and groups positive");
  if (min_count <= 0) throw ConfigError("min_count must be positive");
  parse_graph_variant(anaphor_mode);
  ModelConfig m = model_config();
  m.encoder.vocab_size = 1;
  m.encoder.validate();
  m.aa.validate(m.encoder.hidden);
}

ModelConfig TrainConfig::model_config() const {
  ModelConfig m;
  m.encoder.hidden = static_cast<std::size_t>(hidden);
  m.encoder.layers = static_cast<std::size_t>(layers);
  m.encoder.heads = static_cast<std::size_t>(heads);
  m.encoder.ff = static_cast<std::size_t>(ff);
  m.encoder.max_len = static_cast<std::size_t>(max_len);
  m.encoder.dropout = dropout;
  m.encoder.k_att = static_cast<std::size_t>(k_att);
  m.encoder.locality = locality;
  m.aa.gcn_layers = static_cast<std::size_t>(gcn_layers);
  m.aa.iterations = static_cast<std::size_t>(iterations);
  m.aa.graph_heads = static_cast<std::size_t>(graph_heads);
  m.aa.groups = static_cast<std::size_t>(groups);
  m.aa.use_graph = use_graph;
  m.aa.shared_bias = shared_bias;
  m.graph_variant = parse_graph_variant(anaphor_mode);
  m.exclude_mention_overlap = exclude_mention_overlap;
  m.seed = seed;
  return m;
}

std::string TrainConfig::to_json() const {
  json j = {{"epochs", epochs},       {"lr_encoder", lr_encoder},     {"lr_classifier", lr_classifier},
            {"batch_size", batch_size}, {"warmup_ratio", warmup_ratio}, {"beta", beta},
            {"seed", seed},           {"weight_decay", weight_decay}, {"max_grad_norm", max_grad_norm},
            {"hidden", hidden},       {"layers", layers},             {"heads", heads},
            {"ff", ff},               {"max_len", max_len},           {"dropout", dropout},
            {"k_att", k_att},         {"locality", locality},         {"gcn_layers", gcn_layers},     {"iterations", iterations},
            {"graph_heads", graph_heads}, {"groups", groups},         {"shared_bias", shared_bias},
            {"use_graph", use_graph}, {"use_evidence", use_evidence}, {"anaphor_mode", anaphor_mode},
            {"exclude_mention_overlap", exclude_mention_overlap},     {"min_count", min_count}};
  return j.dump();
}

TrainConfig TrainConfig::from_json(const std::string& text) {
  TrainConfig c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw ParseError(std::string("train config: ") + ex.what());
  }
  if (!j.is_object()) throw ParseError("train config: expected an object");
  for (const auto& [k, v] : j.items()) c.set(k, v.is_string() ? v.get<std::string>() : v.dump());
  return c;
}

void TrainConfig::set(const std::string& key, const std::string& value) {
  for (const auto& [name, fn] : setters())
    if (name == key) return fn(*this, key, value);
  throw ConfigError("unknown config key '" + key + "'");
}

const std::vector<std::string>& TrainConfig::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : setters()) out.push_back(name);
    return out;
  }();
  return k;
}

DocLoss document_loss(const Model& model, const PreparedDoc& doc, double beta, bool train,
                      std::uint64_t dropout_seed) {
  DocLoss out;
  const PairForward fw = model.forward(doc, train, dropout_seed);
  out.pairs = fw.pairs.size();
  if (fw.pairs.empty()) {
    out.l_re = out.l_evi = out.l_total = ad::Tensor::scalar(0.0);
    return out;
  }
  const std::size_t R = model.relations().size();
  const std::size_t E = doc.doc.entities.size();
  std::vector<std::uint8_t> labels(fw.pairs.size() * R, 0);
  std::vector<int> pair_index(E * E, -1);
  for (std::size_t k = 0; k < fw.pairs.size(); ++k)
    pair_index[static_cast<std::size_t>(fw.pairs[k].first) * E + static_cast<std::size_t>(fw.pairs[k].second)] =
        static_cast<int>(k);
  std::map<int, std::vector<int>> evidence;  // pair row -> union of evidence
  for (const auto& f : doc.doc.facts) {
    const int k = pair_index[static_cast<std::size_t>(f.head) * E + static_cast<std::size_t>(f.tail)];
    if (k < 0) continue;
    labels[static_cast<std::size_t>(k) * R + static_cast<std::size_t>(f.relation)] = 1;
    auto& ev = evidence[k];
    ev.insert(ev.end(), f.evidence.begin(), f.evidence.end());
  }
  out.l_re = ad::scale(atl_loss(fw.logits, labels), 1.0 / static_cast<double>(fw.pairs.size()));

  std::vector<std::size_t> rows;
  std::vector<std::vector<double>> gold;
  const std::size_t S = doc.doc.sentences.size();
  for (auto& [k, ev] : evidence) {
    std::sort(ev.begin(), ev.end());
    ev.erase(std::unique(ev.begin(), ev.end()), ev.end());
    if (ev.empty()) continue;
    rows.push_back(static_cast<std::size_t>(k));
    gold.push_back(gold_evidence(ev, S));
  }
  out.evidence_pairs = rows.size();
  if (rows.empty() || beta == 0.0) {
    out.l_evi = ad::Tensor::scalar(0.0);
  } else {
    const ad::Tensor q = ad::gather_rows(fw.q, rows);
    const ad::Tensor p = ad::matmul(q, sentence_matrix(doc.marked.sentence_spans, doc.marked.size()));
    out.l_evi = evidence_loss(p, gold);
  }
  out.l_total = total_loss(out.l_re, out.l_evi, beta);
  return out;
}

AdamW::AdamW(ParamStore& store, double beta1, double beta2, double eps)
    : store_(store), b1_(beta1), b2_(beta2), eps_(eps) {
  for (const auto& p : store_.all()) {
    m_.emplace_back(p.tensor.size(), 0.0);
    v_.emplace_back(p.tensor.size(), 0.0);
  }
}

double AdamW::step(double lr_encoder, double lr_classifier, double weight_decay, double max_grad_norm) {
  const double norm = store_.grad_norm();
  const double clip = norm > max_grad_norm ? max_grad_norm / (norm + 1e-12) : 1.0;
  ++t_;
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  auto& ps = store_.all();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto& p = ps[i];
    const double lr = p.group == ParamGroup::kEncoder ? lr_encoder : lr_classifier;
    auto w = p.tensor.mutable_values();
    const auto g = p.tensor.grad();
    const bool has = !g.empty();
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double gj = has ? g[j] * clip : 0.0;
      m_[i][j] = b1_ * m_[i][j] + (1.0 - b1_) * gj;
      v_[i][j] = b2_ * v_[i][j] + (1.0 - b2_) * gj * gj;
      const double update = (m_[i][j] / c1) / (std::sqrt(v_[i][j] / c2) + eps_);
      w[j] -= lr * update + (p.decay ? lr * weight_decay * w[j] : 0.0);
    }
  }
  return norm;
}

double lr_factor(std::size_t step, std::size_t total_steps, std::size_t warmup_steps) {
  if (step < warmup_steps) return static_cast<double>(step + 1) / static_cast<double>(warmup_steps);
  if (total_steps <= warmup_steps) return 1.0;
  return std::max(0.0, static_cast<double>(total_steps - step) / static_cast<double>(total_steps - warmup_steps));
}

std::string EpochLog::to_json() const {
  json j = {{"epoch", epoch}, {"step", step}, {"L_re", l_re}, {"L_evi", l_evi}, {"L_total", l_total}, {"lr", lr}};
  j["dev_F1"] = std::isnan(dev_f1) ? json(nullptr) : json(dev_f1);
  return j.dump();
}

FitSummary fit(Model& model, const std::vector<Document>& docs, const std::vector<Document>* dev,
               const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  FitSummary summary;
  if (docs.empty()) throw ValidationError("training corpus is empty");
  std::vector<PreparedDoc> prepared;
  prepared.reserve(docs.size());
  for (const auto& d : docs) prepared.push_back(model.prepare(d));

  const std::size_t B = static_cast<std::size_t>(config.batch_size);
  const std::size_t per_epoch = (docs.size() + B - 1) / B;
  const std::size_t total = per_epoch * static_cast<std::size_t>(config.epochs);
  const auto warmup = static_cast<std::size_t>(std::llround(config.warmup_ratio * static_cast<double>(total)));
  const double beta = config.effective_beta();
  AdamW opt(model.params());
  std::vector<std::vector<double>> best;
  std::size_t step = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::vector<std::size_t> order(docs.size());
    std::iota(order.begin(), order.end(), 0);
    auto shuffle_rng = stream(config.seed, "shuffle/epoch-" + std::to_string(epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double sum_re = 0, sum_evi = 0, sum_total = 0, lr_now = 0;
    for (std::size_t b0 = 0; b0 < order.size(); b0 += B) {
      const std::size_t b1 = std::min(order.size(), b0 + B);
      model.params().zero_grad();
      for (std::size_t k = b0; k < b1; ++k) {
        const PreparedDoc& pd = prepared[order[k]];
        const std::uint64_t dseed = stream_seed(config.seed, "dropout/" + pd.doc.doc_id + "/" + std::to_string(step));
        DocLoss loss = document_loss(model, pd, beta, true, dseed);
        const double lt = loss.l_total.item();
        if (!std::isfinite(lt))
          throw NumericError("non-finite loss " + std::to_string(lt) + " at epoch " + std::to_string(epoch) +
                             ", step " + std::to_string(step) + ", document '" + pd.doc.doc_id +
                             "' (L_re=" + std::to_string(loss.l_re.item()) +
                             ", L_evi=" + std::to_string(loss.l_evi.item()) + ")");
        sum_re += loss.l_re.item();
        sum_evi += loss.l_evi.item();
        sum_total += lt;
        ad::scale(loss.l_total, 1.0 / static_cast<double>(b1 - b0)).backward();
      }
      const double f = lr_factor(step, total, warmup);
      lr_now = config.lr_classifier * f;
      const double norm = opt.step(config.lr_encoder * f, lr_now, config.weight_decay, config.max_grad_norm);
      if (!std::isfinite(norm))
        throw NumericError("non-finite gradient norm at epoch " + std::to_string(epoch) + ", step " + std::to_string(step));
      ++step;
    }
    EpochLog log;
    log.epoch = epoch;
    log.step = step;
    const double n = static_cast<double>(docs.size());
    log.l_re = sum_re / n;
    log.l_evi = sum_evi / n;
    log.l_total = sum_total / n;
    log.lr = lr_now;
    if (dev && !dev->empty()) {
      log.dev_f1 = evaluate(predict(score_documents(model, *dev)), *dev, model.relations()).f1;
      if (std::isnan(summary.best_dev_f1) || log.dev_f1 > summary.best_dev_f1) {
        summary.best_dev_f1 = log.dev_f1;
        summary.best_epoch = epoch;
        best = model.snapshot();
      }
    } else {
      summary.best_epoch = epoch;
    }
    summary.log.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  if (!best.empty()) model.restore(best);
  return summary;
}

TrainResult train(const Corpus& corpus, const std::vector<Document>* dev, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (corpus.docs.empty()) throw ValidationError("training corpus is empty");
  Model model(config.model_config(), Vocabulary::build(corpus.docs, static_cast<std::size_t>(config.min_count)),
              corpus.relations);
  FitSummary s = fit(model, corpus.docs, dev, config, on_epoch);
  return {std::move(model), std::move(s)};
}

}  // namespace aadocre
