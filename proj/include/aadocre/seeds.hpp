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

// Named random streams derived from one root seed.
//
// stream_seed(root, name) = splitmix64(root ^ fnv1a64(name)). Every consumer of
// randomness asks for its own named stream ("init", "shuffle/epoch-3",
// "dropout/<doc>/<step>", "random-replace/<doc>"), so adding a consumer never
// shifts the draws seen by another.

#ifndef AADOCRE_SEEDS_HPP_
#define AADOCRE_SEEDS_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace aadocre {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t root, std::string_view name) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return splitmix64(root ^ h);
}

inline std::mt19937_64 stream(std::uint64_t root, std::string_view name) {
  return std::mt19937_64(stream_seed(root, name));
}

}  // namespace aadocre

#endif  // AADOCRE_SEEDS_HPP_
