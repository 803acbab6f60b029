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

#include "aadocre/encoder.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "aadocre/errors.hpp"
#include "aadocre/seeds.hpp"

namespace aadocre {
namespace {

// Fixed-frequency sin/cos table; the encoder keeps training it.
ad::Tensor sinusoids(std::size_t rows, std::size_t d, double scale) {
  std::vector<double> v(rows * d);
  for (std::size_t p = 0; p < rows; ++p)
    for (std::size_t i = 0; i < d; ++i) {
      const double freq = std::pow(10000.0, -static_cast<double>(i / 2 * 2) / static_cast<double>(d));
      const double a = static_cast<double>(p) * freq;
      v[p * d + i] = scale * (i % 2 == 0 ? std::sin(a) : std::cos(a));
    }
  return ad::Tensor::from(rows, d, std::move(v));
}

ad::Tensor dropout(const ad::Tensor& x, double rate, std::mt19937_64* rng) {
  if (!rng || rate <= 0.0) return x;
  std::bernoulli_distribution keep(1.0 - rate);
  std::vector<double> m(x.size());
  for (auto& v : m) v = keep(*rng) ? 1.0 / (1.0 - rate) : 0.0;
  return ad::mul(x, ad::Tensor::from(x.rows(), x.cols(), std::move(m)));
}

ad::Tensor linear(const ad::Tensor& x, const ad::Tensor& w, const ad::Tensor& b) {
  return ad::add(ad::matmul(x, w), b);
}

}  // namespace

void EncoderConfig::validate() const {
  if (vocab_size == 0) throw ConfigError("encoder: vocab_size must be positive");
  if (!(locality >= 0.0)) throw ConfigError("encoder: locality must be non-negative");
  if (hidden == 0 || layers == 0 || heads == 0 || ff == 0 || max_len == 0 || k_att == 0)
    throw ConfigError("encoder: hidden, layers, heads, ff, max_len and k_att must be positive");
  if (hidden % heads != 0)
    throw ConfigError("encoder: hidden " + std::to_string(hidden) + " not divisible by heads " +
                      std::to_string(heads));
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("encoder: dropout must lie in [0, 1)");
}

Encoder::Encoder(const EncoderConfig& config, ParamStore& store, std::mt19937_64& rng) : config_(config) {
  config_.validate();
  const std::size_t d = config_.hidden;
  const auto enc = ParamGroup::kEncoder;
  auto ones = [d] { return ad::Tensor::full(1, d, 1.0); };
  auto zeros = [](std::size_t n) { return ad::Tensor::zeros(1, n); };
  tok_ = store.add("encoder.tok", enc, normal(rng, config_.vocab_size, d, 0.1));
  pos_ = store.add("encoder.pos", enc, sinusoids(config_.max_len, d, 0.1));
  for (std::size_t l = 0; l < config_.layers; ++l) {
    const std::string p = "encoder.layer" + std::to_string(l) + ".";
    Layer L;
    L.ln1_g = store.add(p + "ln1.g", enc, ones(), false);
    L.ln1_b = store.add(p + "ln1.b", enc, zeros(d), false);
    L.wq = store.add(p + "wq", enc, xavier(rng, d, d));
    L.wk = store.add(p + "wk", enc, xavier(rng, d, d));
    L.wv = store.add(p + "wv", enc, xavier(rng, d, d));
    L.wo = store.add(p + "wo", enc, xavier(rng, d, d));
    L.bo = store.add(p + "bo", enc, zeros(d), false);
    L.ln2_g = store.add(p + "ln2.g", enc, ones(), false);
    L.ln2_b = store.add(p + "ln2.b", enc, zeros(d), false);
    L.w1 = store.add(p + "w1", enc, xavier(rng, d, config_.ff));
    L.b1 = store.add(p + "b1", enc, zeros(config_.ff), false);
    L.w2 = store.add(p + "w2", enc, xavier(rng, config_.ff, d));
    L.b2 = store.add(p + "b2", enc, zeros(d), false);
    layers_.push_back(L);
  }
  lnf_g_ = store.add("encoder.lnf.g", enc, ones(), false);
  lnf_b_ = store.add("encoder.lnf.b", enc, zeros(d), false);
}

EncoderOutput Encoder::encode(const std::vector<int>& ids, bool train, std::uint64_t dropout_seed) const {
  const std::size_t l = ids.size();
  if (l == 0) throw ValidationError("encoder: empty token sequence");
  if (l > config_.max_len)
    throw ValidationError("encoder: document of " + std::to_string(l) + " marked tokens exceeds max_len " +
                          std::to_string(config_.max_len));
  std::vector<std::size_t> tok_idx(l), pos_idx(l);
  for (std::size_t i = 0; i < l; ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= config_.vocab_size)
      throw ValidationError("encoder: token id " + std::to_string(ids[i]) + " outside vocabulary of " +
                            std::to_string(config_.vocab_size));
    tok_idx[i] = static_cast<std::size_t>(ids[i]);
    pos_idx[i] = i;
  }
  std::mt19937_64 drng = stream(dropout_seed, "dropout");
  std::mt19937_64* rng = train ? &drng : nullptr;

  const std::size_t d = config_.hidden;
  const std::size_t dh = d / config_.heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  const std::size_t keep = config_.aggregated_layers();

  std::vector<ad::Tensor> distance_bias;
  if (config_.locality > 0.0)
    for (std::size_t hd = 0; hd < config_.heads; ++hd) {
      const double slope = config_.locality / std::pow(2.0, static_cast<double>(hd));
      std::vector<double> b(l * l);
      for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < l; ++j)
          b[i * l + j] = -slope * std::abs(static_cast<double>(i) - static_cast<double>(j));
      distance_bias.push_back(ad::Tensor::from(l, l, std::move(b)));
    }

  ad::Tensor x = dropout(ad::add(ad::gather_rows(tok_, tok_idx), ad::gather_rows(pos_, pos_idx)),
                         config_.dropout, rng);
  std::vector<ad::Tensor> hidden, attn;
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    const Layer& L = layers_[li];
    const ad::Tensor h = ad::layer_norm(x, L.ln1_g, L.ln1_b);
    const ad::Tensor q = ad::matmul(h, L.wq), k = ad::matmul(h, L.wk), v = ad::matmul(h, L.wv);
    std::vector<ad::Tensor> ctx;
    ad::Tensor a_sum;
    for (std::size_t hd = 0; hd < config_.heads; ++hd) {
      const std::size_t c0 = hd * dh, c1 = c0 + dh;
      ad::Tensor s = ad::scale(ad::matmul(ad::slice_cols(q, c0, c1), ad::transpose(ad::slice_cols(k, c0, c1))),
                               inv_sqrt);
      if (!distance_bias.empty()) s = ad::add(s, distance_bias[hd]);
      const ad::Tensor p = ad::softmax(s, 1);
      ctx.push_back(ad::matmul(p, ad::slice_cols(v, c0, c1)));
      a_sum = a_sum.defined() ? ad::add(a_sum, p) : p;
    }
    const ad::Tensor att = ctx.size() == 1 ? ctx[0] : ad::concat(ctx, 1);
    x = ad::add(x, dropout(linear(att, L.wo, L.bo), config_.dropout, rng));
    const ad::Tensor h2 = ad::layer_norm(x, L.ln2_g, L.ln2_b);
    const ad::Tensor f = linear(ad::relu(linear(h2, L.w1, L.b1)), L.w2, L.b2);
    x = ad::add(x, dropout(f, config_.dropout, rng));
    if (li + keep >= layers_.size()) {
      hidden.push_back(x);
      attn.push_back(ad::scale(a_sum, 1.0 / static_cast<double>(config_.heads)));
    }
  }
  ad::Tensor hs = hidden[0], as = attn[0];
  for (std::size_t i = 1; i < hidden.size(); ++i) {
    hs = ad::add(hs, hidden[i]);
    as = ad::add(as, attn[i]);
  }
  const double inv = 1.0 / static_cast<double>(hidden.size());
  return {ad::layer_norm(ad::scale(hs, inv), lnf_g_, lnf_b_), ad::scale(as, inv)};
}

ad::Tensor mention_embedding(const EncoderOutput& out, const MarkedDocument& marked, std::size_t entity,
                             std::size_t mention) {
  if (entity >= marked.mention_start.size() || mention >= marked.mention_start[entity].size())
    throw ValidationError("mention_embedding: unknown mention " + std::to_string(entity) + "/" +
                          std::to_string(mention));
  return ad::slice_rows(out.H, marked.mention_start[entity][mention], marked.mention_start[entity][mention] + 1);
}

std::vector<std::size_t> anaphor_positions(const Document& doc, const MarkedDocument& marked, int sent_id,
                                           int start, int end) {
  const auto offsets = doc.sentence_offsets();
  if (sent_id < 0 || static_cast<std::size_t>(sent_id) >= doc.sentences.size() || start < 0 || end <= start ||
      static_cast<std::size_t>(end) > doc.sentences[static_cast<std::size_t>(sent_id)].size())
    throw ValidationError("anaphor span (" + std::to_string(sent_id) + ", " + std::to_string(start) + ", " +
                          std::to_string(end) + ") is empty or outside the document");
  std::vector<std::size_t> pos;
  for (int i = start; i < end; ++i)
    pos.push_back(marked.original_to_marked[offsets[static_cast<std::size_t>(sent_id)] + static_cast<std::size_t>(i)]);
  return pos;
}

ad::Tensor anaphor_embedding(const EncoderOutput& out, const Document& doc, const MarkedDocument& marked,
                             const Anaphor& anaphor) {
  const auto pos = anaphor_positions(doc, marked, anaphor.sent_id, anaphor.start, anaphor.end);
  return ad::mean(ad::gather_rows(out.H, pos), 0);
}

}  // namespace aadocre
