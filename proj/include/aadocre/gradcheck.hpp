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

// Finite-difference verification of every differentiable component.

#ifndef AADOCRE_GRADCHECK_HPP_
#define AADOCRE_GRADCHECK_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace aadocre {

struct GradCheckCase {
  std::string name;
  std::uint64_t seed = 0;
  double error = 0.0;  // max relative error over probed coordinates
};

struct GradCheckOptions {
  std::size_t seeds = 20;
  double step = 1e-5;
  double tolerance = 1e-4;
};

struct GradCheckReport {
  std::vector<GradCheckCase> cases;
  double tolerance = 1e-4;

  double worst() const;
  std::size_t failures() const;
  bool passed() const { return failures() == 0; }
};

// Primitive operations, network components and the end-to-end loss on a
// two-document batch, once per seed 0..seeds-1.
GradCheckReport run_gradcheck_suite(const GradCheckOptions& options = {},
                                    const std::function<void(const GradCheckCase&)>& on_case = {});

}  // namespace aadocre

#endif  // AADOCRE_GRADCHECK_HPP_
