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

#include "aadocre/objectives.hpp"

#include <cmath>
#include <string>

#include "aadocre/aa_network.hpp"
#include "aadocre/errors.hpp"

namespace aadocre {

ad::Tensor atl_loss(const ad::Tensor& logits, const std::vector<std::uint8_t>& positive) {
  const std::size_t rows = logits.rows(), classes = logits.cols();
  if (classes < 1 || positive.size() != rows * (classes - 1))
    throw ShapeError("atl_loss: label mask of " + std::to_string(positive.size()) + " entries for logits " +
                     logits.shape().str());
  const std::size_t th = classes - 1;
  // Positive part: softmax over P and TH, summed over P.
  std::vector<std::uint8_t> not_pos_or_th(rows * classes, 0), not_pos(rows * classes, 0), pos(rows * classes, 0);
  bool any_pos = false;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < th; ++c) {
      const bool p = positive[r * th + c] != 0;
      pos[r * classes + c] = p;
      not_pos_or_th[r * classes + c] = !p;
      not_pos[r * classes + c] = !p;
      any_pos = any_pos || p;
    }
  for (std::size_t r = 0; r < rows; ++r) not_pos[r * classes + th] = 1;

  ad::Tensor loss;
  if (any_pos) {
    const ad::Tensor lp = ad::log_softmax(ad::masked_fill(logits, not_pos_or_th, ad::kNegInf), 1);
    loss = ad::scale(ad::sum(ad::masked_fill(lp, not_pos, 0.0)), -1.0);
  }
  // Threshold part: softmax over N and TH, taken at TH.
  const ad::Tensor ln = ad::log_softmax(ad::masked_fill(logits, pos, ad::kNegInf), 1);
  const ad::Tensor th_term = ad::scale(ad::sum(ad::slice_cols(ln, th, classes)), -1.0);
  return loss.defined() ? ad::add(loss, th_term) : th_term;
}

ad::Tensor atl_loss(const ad::Tensor& logits, const std::vector<int>& positives) {
  if (logits.rows() != 1) throw ShapeError("atl_loss: expected a single logit row, got " + logits.shape().str());
  const std::size_t th = logits.cols() - 1;
  std::vector<std::uint8_t> mask(th, 0);
  for (int r : positives) {
    if (r < 0 || static_cast<std::size_t>(r) > th) throw ValidationError("atl_loss: relation id out of range");
    if (static_cast<std::size_t>(r) == th) throw ValidationError("atl_loss: the threshold class cannot be positive");
    mask[static_cast<std::size_t>(r)] = 1;
  }
  return atl_loss(logits, mask);
}

ad::Tensor sentence_matrix(const std::vector<std::pair<std::size_t, std::size_t>>& spans, std::size_t length) {
  std::size_t expect = 0;
  for (const auto& [b, e] : spans) {
    if (b != expect || e < b) throw ValidationError("sentence spans do not partition the token range");
    expect = e;
  }
  if (expect != length)
    throw ValidationError("sentence spans cover " + std::to_string(expect) + " of " + std::to_string(length) +
                          " tokens");
  std::vector<double> m(length * spans.size(), 0.0);
  for (std::size_t s = 0; s < spans.size(); ++s)
    for (std::size_t i = spans[s].first; i < spans[s].second; ++i) m[i * spans.size() + s] = 1.0;
  return ad::Tensor::from(length, spans.size(), std::move(m));
}

EvidenceDistributions evidence_distribution(const ad::Tensor& a_head, const ad::Tensor& a_tail,
                                            const std::vector<std::pair<std::size_t, std::size_t>>& spans,
                                            double eps) {
  EvidenceDistributions out;
  out.q = context_weights(a_head, a_tail, eps);
  out.p = ad::matmul(out.q, sentence_matrix(spans, a_head.cols()));
  return out;
}

std::vector<double> gold_evidence(const std::vector<int>& evidence, std::size_t sentences) {
  std::vector<double> v(sentences, 0.0);
  if (evidence.empty()) return v;
  for (int s : evidence) {
    if (s < 0 || static_cast<std::size_t>(s) >= sentences) throw ValidationError("evidence sentence out of range");
    v[static_cast<std::size_t>(s)] = 1.0;
  }
  double n = 0.0;
  for (double x : v) n += x;
  for (double& x : v) x /= n;
  return v;
}

ad::Tensor evidence_loss(const ad::Tensor& p, const std::vector<std::vector<double>>& v, double eps) {
  const std::size_t rows = p.rows(), S = p.cols();
  if (v.size() != rows) throw ShapeError("evidence_loss: " + std::to_string(v.size()) + " gold rows for " + p.shape().str());
  ad::Tensor total;
  for (std::size_t r = 0; r < rows; ++r) {
    if (v[r].size() != S) throw ShapeError("evidence_loss: gold vector length mismatch");
    const ad::Tensor pr = rows == 1 ? p : ad::slice_rows(p, r, r + 1);
    bool smooth = false;
    for (std::size_t i = 0; i < S; ++i) smooth = smooth || (v[r][i] > 0.0 && pr.values()[i] < eps);
    std::vector<double> w(S), entropy_terms(S, 0.0);
    ad::Tensor logp;
    double neg_entropy = 0.0;
    if (smooth) {
      const double z = 1.0 + static_cast<double>(S) * eps;
      for (std::size_t i = 0; i < S; ++i) {
        w[i] = (v[r][i] + eps) / z;
        neg_entropy += w[i] * std::log(w[i]);
      }
      logp = ad::log(ad::scale(ad::add_scalar(pr, eps), 1.0 / z));
    } else {
      std::vector<std::uint8_t> off(S, 0);
      for (std::size_t i = 0; i < S; ++i) {
        w[i] = v[r][i];
        off[i] = v[r][i] > 0.0 ? 0 : 1;
        if (w[i] > 0.0) neg_entropy += w[i] * std::log(w[i]);
      }
      logp = ad::log(ad::masked_fill(pr, off, 1.0));
    }
    const ad::Tensor cross = ad::sum(ad::mul(logp, ad::Tensor::from(1, S, std::move(w))));
    const ad::Tensor kl = ad::add_scalar(ad::scale(cross, -1.0), neg_entropy);
    total = total.defined() ? ad::add(total, kl) : kl;
  }
  return total.defined() ? total : ad::Tensor::scalar(0.0);
}

ad::Tensor total_loss(const ad::Tensor& l_re, const ad::Tensor& l_evi, double beta) {
  if (beta < 0.0) throw ConfigError("beta must be non-negative");
  if (beta == 0.0) return l_re;
  return ad::add(l_re, ad::scale(l_evi, beta));
}

}  // namespace aadocre
