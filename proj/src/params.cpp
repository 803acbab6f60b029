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

#include "aadocre/params.hpp"

#include <cmath>

#include "aadocre/errors.hpp"

namespace aadocre {

ad::Tensor ParamStore::add(std::string name, ParamGroup group, ad::Tensor value, bool decay) {
  if (find(name)) throw ConfigError("duplicate parameter name '" + name + "'");
  value.set_requires_grad(true);
  params_.push_back({std::move(name), group, decay, value});
  return value;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.tensor.size();
  return n;
}

const Parameter* ParamStore::find(const std::string& name) const {
  for (const auto& p : params_)
    if (p.name == name) return &p;
  return nullptr;
}

std::vector<ad::Tensor> ParamStore::tensors() const {
  std::vector<ad::Tensor> out;
  for (const auto& p : params_) out.push_back(p.tensor);
  return out;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p.tensor.zero_grad();
}

double ParamStore::grad_norm() const {
  double s = 0.0;
  for (const auto& p : params_)
    for (double g : p.tensor.grad()) s += g * g;
  return std::sqrt(s);
}

ad::Tensor xavier(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> d(-bound, bound);
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = d(rng);
  return ad::Tensor::from(rows, cols, std::move(v));
}

ad::Tensor normal(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double stddev) {
  std::normal_distribution<double> d(0.0, stddev);
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = d(rng);
  return ad::Tensor::from(rows, cols, std::move(v));
}

}  // namespace aadocre
