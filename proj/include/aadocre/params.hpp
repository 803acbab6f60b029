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

// Named learnable tensors in registration order, split into optimizer groups.

#ifndef AADOCRE_PARAMS_HPP_
#define AADOCRE_PARAMS_HPP_

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "aadocre/tensor.hpp"

namespace aadocre {

enum class ParamGroup { kEncoder, kClassifier };

struct Parameter {
  std::string name;
  ParamGroup group = ParamGroup::kClassifier;
  bool decay = true;  // false for biases and norm gains
  ad::Tensor tensor;
};

class ParamStore {
 public:
  // Registers a leaf and returns a handle sharing its storage.
  ad::Tensor add(std::string name, ParamGroup group, ad::Tensor value, bool decay = true);

  std::vector<Parameter>& all() { return params_; }
  const std::vector<Parameter>& all() const { return params_; }
  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;
  const Parameter* find(const std::string& name) const;
  std::vector<ad::Tensor> tensors() const;

  void zero_grad();
  double grad_norm() const;

 private:
  std::vector<Parameter> params_;
};

// Uniform in [-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))].
ad::Tensor xavier(std::mt19937_64& rng, std::size_t rows, std::size_t cols);
ad::Tensor normal(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double stddev);

}  // namespace aadocre

#endif  // AADOCRE_PARAMS_HPP_
