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

// Small pre-norm transformer producing token states H and aggregated
// attention A for one marked document.

#ifndef AADOCRE_ENCODER_HPP_
#define AADOCRE_ENCODER_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "aadocre/anaphor_graph.hpp"
#include "aadocre/corpus.hpp"
#include "aadocre/params.hpp"
#include "aadocre/tensor.hpp"

namespace aadocre {

struct EncoderConfig {
  std::size_t vocab_size = 0;
  std::size_t hidden = 64;
  std::size_t layers = 2;
  std::size_t heads = 2;
  std::size_t max_len = 512;
  std::size_t ff = 128;
  double dropout = 0.1;
  std::size_t k_att = 3;
  // Attention bias -slope_h * |i - j| with slope_h = locality / 2^h; 0 disables it.
  double locality = 0.0;

  // Layers actually aggregated: min(k_att, layers).
  std::size_t aggregated_layers() const { return k_att < layers ? k_att : layers; }
  void validate() const;
};

struct EncoderOutput {
  ad::Tensor H;  // l x d
  ad::Tensor A;  // l x l, rows sum to one
};

class Encoder {
 public:
  Encoder() = default;
  Encoder(const EncoderConfig& config, ParamStore& store, std::mt19937_64& rng);

  const EncoderConfig& config() const { return config_; }

  // With train set, dropout masks come from stream(dropout_seed, "dropout").
  EncoderOutput encode(const std::vector<int>& ids, bool train = false, std::uint64_t dropout_seed = 0) const;

 private:
  struct Layer {
    ad::Tensor ln1_g, ln1_b, wq, wk, wv, wo, bo, ln2_g, ln2_b, w1, b1, w2, b2;
  };
  EncoderConfig config_;
  ad::Tensor tok_, pos_, lnf_g_, lnf_b_;
  std::vector<Layer> layers_;
};

// Row of H at the mention's opening marker.
ad::Tensor mention_embedding(const EncoderOutput& out, const MarkedDocument& marked, std::size_t entity,
                             std::size_t mention);

// Marked-coordinate token positions of an anaphor span (markers skipped).
std::vector<std::size_t> anaphor_positions(const Document& doc, const MarkedDocument& marked, int sent_id,
                                           int start, int end);

// Mean of H rows over the anaphor span.
ad::Tensor anaphor_embedding(const EncoderOutput& out, const Document& doc, const MarkedDocument& marked,
                             const Anaphor& anaphor);

}  // namespace aadocre

#endif  // AADOCRE_ENCODER_HPP_
