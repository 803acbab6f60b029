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

// Adaptive-threshold relation loss and evidence supervision.

#ifndef AADOCRE_OBJECTIVES_HPP_
#define AADOCRE_OBJECTIVES_HPP_

#include <cstddef>
#include <utility>
#include <vector>

#include "aadocre/tensor.hpp"

namespace aadocre {

// Sum over rows of the two-part adaptive-threshold loss. `positive` is
// row-major rows x (classes - 1); the last logit column is the threshold class.
ad::Tensor atl_loss(const ad::Tensor& logits, const std::vector<std::uint8_t>& positive);

// Single pair; throws when `positives` names the threshold index.
ad::Tensor atl_loss(const ad::Tensor& logits, const std::vector<int>& positives);

// Constant l x |S| membership matrix; spans must partition [0, l).
ad::Tensor sentence_matrix(const std::vector<std::pair<std::size_t, std::size_t>>& spans, std::size_t length);

struct EvidenceDistributions {
  ad::Tensor q;  // rows x l
  ad::Tensor p;  // rows x |S|
};

EvidenceDistributions evidence_distribution(const ad::Tensor& a_head, const ad::Tensor& a_tail,
                                            const std::vector<std::pair<std::size_t, std::size_t>>& spans,
                                            double eps = 1e-10);

// Uniform over the evidence ids, zero elsewhere.
std::vector<double> gold_evidence(const std::vector<int>& evidence, std::size_t sentences);

inline constexpr double kEvidenceSmoothing = 1e-8;

// Sum over rows of KL(v || p). Terms with v_i = 0 contribute nothing. A row
// whose gold sentences include one with p_i < eps is compared after both
// vectors are eps-smoothed and renormalized.
ad::Tensor evidence_loss(const ad::Tensor& p, const std::vector<std::vector<double>>& v,
                         double eps = kEvidenceSmoothing);

ad::Tensor total_loss(const ad::Tensor& l_re, const ad::Tensor& l_evi, double beta);

}  // namespace aadocre

#endif  // AADOCRE_OBJECTIVES_HPP_
