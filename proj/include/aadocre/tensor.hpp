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

// Dense double-precision matrices with tape-based reverse-mode autodiff.
//
// Every tensor is two-dimensional (rows x cols); vectors are 1 x n and
// scalars are 1 x 1. Operations record their inputs and a local gradient
// rule when any input requires a gradient and grad mode is enabled on the
// calling thread. Calling backward() on a scalar replays the recorded
// operations in reverse insertion order, accumulating into every reachable
// tensor that requires a gradient.

#ifndef AADOCRE_TENSOR_HPP_
#define AADOCRE_TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace aadocre::ad {

struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const { return rows * cols; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Node {
  Shape shape;
  std::vector<double> values;
  std::vector<double> grad;  // empty until a backward pass reaches the node
  bool requires_grad = false;
  std::uint64_t seq = 0;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into the parents' grads.
  std::function<void(Node&)> backward_fn;

  void ensure_grad();
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Tensor zeros(std::size_t rows, std::size_t cols, bool requires_grad = false);
  static Tensor full(std::size_t rows, std::size_t cols, double value, bool requires_grad = false);
  static Tensor from(std::size_t rows, std::size_t cols, std::vector<double> values,
                     bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor row(std::vector<double> values, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rows() const { return node_->shape.rows; }
  std::size_t cols() const { return node_->shape.cols; }
  std::size_t size() const { return node_->values.size(); }

  std::span<const double> values() const { return node_->values; }
  // Direct write access, for parameter initialization and optimizer updates.
  std::span<double> mutable_values() { return node_->values; }
  double at(std::size_t r, std::size_t c) const { return node_->values[r * cols() + c]; }
  double item() const;

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool on) { node_->requires_grad = on; }
  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const double> grad() const { return node_->grad; }
  std::span<double> mutable_grad();
  void zero_grad();

  // Reverse pass from a 1x1 tensor; throws ShapeError otherwise.
  void backward() const;

  // Same values, no history.
  Tensor detach() const;
  Tensor clone() const;

  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// Nodes reachable from a root in reverse insertion order. Each node appears
// exactly once, so replaying runs every gradient rule once.
class Tape {
 public:
  static Tape from_root(const Tensor& root);

  std::size_t size() const { return records_.size(); }
  const std::vector<Node*>& records() const { return records_; }
  void replay() const;

 private:
  std::vector<Node*> records_;
  std::shared_ptr<Node> root_;
};

// Disables graph recording on the current thread while in scope.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

// ---- operations ----

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& x);

// Elementwise with broadcasting of `b` over `a`: b may match a, be 1 x cols,
// rows x 1, or 1 x 1.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double s);
Tensor add_scalar(const Tensor& x, double s);

Tensor tanh(const Tensor& x);
Tensor relu(const Tensor& x);
Tensor exp(const Tensor& x);
Tensor log(const Tensor& x);
Tensor reciprocal(const Tensor& x);

// axis 0 reduces over rows (per column), axis 1 over columns (per row);
// negative axes count from the end.
Tensor softmax(const Tensor& x, int axis);
Tensor log_softmax(const Tensor& x, int axis);
Tensor logsumexp(const Tensor& x, int axis);
Tensor sum(const Tensor& x, int axis);
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x, int axis);
Tensor mean(const Tensor& x);

Tensor concat(const std::vector<Tensor>& parts, int axis);
Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end);
Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end);
// Row gather; used as the embedding lookup.
Tensor gather_rows(const Tensor& x, std::span<const std::size_t> indices);

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps = 1e-5);

// Entries where mask != 0 are replaced by `value` and receive no gradient.
Tensor masked_fill(const Tensor& x, std::span<const std::uint8_t> mask, double value);

// Per-row block outer products: for each row p and group g of width w = cols/groups,
// out[p, g*w*w + i*w + j] = a[p, g*w + i] * b[p, g*w + j].
Tensor grouped_outer(const Tensor& a, const Tensor& b, std::size_t groups);

// ---- finite-difference verification ----

// max over coordinates of |analytic - numeric| / max(1e-8, |analytic| + |numeric|)
// with central differences of width `step`. `f` must rebuild its graph from x
// on each call.
double grad_check(const std::function<Tensor(const Tensor&)>& f, Tensor x, double step = 1e-5);

// Same measure over a set of leaf tensors that `f` reads implicitly. When
// max_coords > 0, at most that many coordinates per tensor are probed
// (evenly strided).
double grad_check(const std::function<Tensor()>& f, std::vector<Tensor> leaves,
                  double step = 1e-5, std::size_t max_coords = 0);

}  // namespace aadocre::ad

#endif  // AADOCRE_TENSOR_HPP_
