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

#include "aadocre/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "aadocre/errors.hpp"

namespace aadocre::ad {
namespace {

std::atomic<std::uint64_t> g_next_seq{1};
thread_local bool t_grad_enabled = true;

using NodePtr = std::shared_ptr<Node>;

NodePtr make_node(Shape shape, std::vector<double> values) {
  auto node = std::make_shared<Node>();
  node->shape = shape;
  node->values = std::move(values);
  node->seq = g_next_seq.fetch_add(1, std::memory_order_relaxed);
  return node;
}

NodePtr make_node(Shape shape) { return make_node(shape, std::vector<double>(shape.size(), 0.0)); }

Tensor record(NodePtr out, std::vector<NodePtr> parents, const char* op,
              std::function<void(Node&)> rule) {
  out->op = op;
  if (t_grad_enabled) {
    const bool any = std::any_of(parents.begin(), parents.end(),
                                 [](const NodePtr& p) { return p->requires_grad; });
    if (any) {
      out->requires_grad = true;
      out->parents = std::move(parents);
      out->backward_fn = std::move(rule);
    }
  }
  return Tensor(std::move(out));
}

// Parent gradient buffer, or nullptr when that parent takes no gradient.
double* grad_of(Node& self, std::size_t i) {
  Node& p = *self.parents[i];
  if (!p.requires_grad) return nullptr;
  p.ensure_grad();
  return p.grad.data();
}

std::size_t normalize_axis(int axis, const char* op) {
  const int a = axis < 0 ? axis + 2 : axis;
  if (a != 0 && a != 1) {
    throw ShapeError(std::string(op) + ": axis " + std::to_string(axis) +
                     " out of range for a rank-2 tensor");
  }
  return static_cast<std::size_t>(a);
}

// Describes the slices along `axis`: slice k starts at offset(k), has `len`
// elements spaced by `stride`.
struct Slices {
  std::size_t count;
  std::size_t len;
  std::size_t stride;
  std::size_t step;  // offset(k) = k * step

  Slices(const Shape& s, std::size_t axis) {
    if (axis == 1) {
      count = s.rows, len = s.cols, stride = 1, step = s.cols;
    } else {
      count = s.cols, len = s.rows, stride = s.cols, step = 1;
    }
  }
  Shape reduced(std::size_t axis) const {
    return axis == 1 ? Shape{count, 1} : Shape{1, count};
  }
};

enum class Bcast { kSame, kRow, kCol, kScalar };

Bcast broadcast_kind(const Shape& a, const Shape& b, const char* op) {
  if (a == b) return Bcast::kSame;
  if (b.rows == 1 && b.cols == 1) return Bcast::kScalar;
  if (b.rows == 1 && b.cols == a.cols) return Bcast::kRow;
  if (b.cols == 1 && b.rows == a.rows) return Bcast::kCol;
  throw ShapeError(std::string(op) + ": cannot broadcast " + b.str() + " onto " + a.str());
}

inline std::size_t bindex(Bcast k, std::size_t i, std::size_t j, std::size_t cols) {
  switch (k) {
    case Bcast::kSame: return i * cols + j;
    case Bcast::kRow: return j;
    case Bcast::kCol: return i;
    case Bcast::kScalar: return 0;
  }
  return 0;
}

template <typename Fwd, typename DA, typename DB>
Tensor binary(const Tensor& a, const Tensor& b, const char* op, Fwd fwd, DA da, DB db) {
  const Bcast kind = broadcast_kind(a.shape(), b.shape(), op);
  const Shape s = a.shape();
  auto out = make_node(s);
  const auto& av = a.node()->values;
  const auto& bv = b.node()->values;
  for (std::size_t i = 0; i < s.rows; ++i) {
    for (std::size_t j = 0; j < s.cols; ++j) {
      out->values[i * s.cols + j] = fwd(av[i * s.cols + j], bv[bindex(kind, i, j, s.cols)]);
    }
  }
  return record(out, {a.node(), b.node()}, op, [kind, s, da, db](Node& self) {
    const auto& av = self.parents[0]->values;
    const auto& bv = self.parents[1]->values;
    double* ga = grad_of(self, 0);
    double* gb = grad_of(self, 1);
    for (std::size_t i = 0; i < s.rows; ++i) {
      for (std::size_t j = 0; j < s.cols; ++j) {
        const std::size_t ai = i * s.cols + j;
        const std::size_t bi = bindex(kind, i, j, s.cols);
        const double g = self.grad[ai];
        if (ga) ga[ai] += g * da(av[ai], bv[bi]);
        if (gb) gb[bi] += g * db(av[ai], bv[bi]);
      }
    }
  });
}

template <typename Fwd, typename Deriv>
Tensor unary(const Tensor& x, const char* op, Fwd fwd, Deriv deriv) {
  auto out = make_node(x.shape());
  const auto& xv = x.node()->values;
  for (std::size_t i = 0; i < xv.size(); ++i) out->values[i] = fwd(xv[i]);
  // deriv(x, y) gives dy/dx from the input and output values.
  return record(out, {x.node()}, op, [deriv](Node& self) {
    double* gx = grad_of(self, 0);
    if (!gx) return;
    const auto& xv = self.parents[0]->values;
    for (std::size_t i = 0; i < xv.size(); ++i) {
      gx[i] += self.grad[i] * deriv(xv[i], self.values[i]);
    }
  });
}

// C += A * B, A: m x k, B: k x n
void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    const double* ai = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ai[p];
      if (av == 0.0) continue;
      const double* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

// C += A * B^T, A: m x n, B: k x n, C: m x k
void gemm_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t n,
             std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double* bp = b + p * n;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += ai[j] * bp[j];
      c[i * k + p] += acc;
    }
  }
}

// C += A^T * B, A: m x k, B: m x n, C: k x n
void gemm_tn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    const double* bi = b + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ai[p];
      if (av == 0.0) continue;
      double* cp = c + p * n;
      for (std::size_t j = 0; j < n; ++j) cp[j] += av * bi[j];
    }
  }
}

}  // namespace

std::string Shape::str() const {
  std::ostringstream os;
  os << "[" << rows << "x" << cols << "]";
  return os.str();
}

void Node::ensure_grad() {
  if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
}

Tensor Tensor::zeros(std::size_t rows, std::size_t cols, bool requires_grad) {
  return full(rows, cols, 0.0, requires_grad);
}

Tensor Tensor::full(std::size_t rows, std::size_t cols, double value, bool requires_grad) {
  auto node = make_node({rows, cols}, std::vector<double>(rows * cols, value));
  node->requires_grad = requires_grad;
  return Tensor(node);
}

Tensor Tensor::from(std::size_t rows, std::size_t cols, std::vector<double> values,
                    bool requires_grad) {
  if (values.size() != rows * cols) {
    throw ShapeError("tensor of shape " + Shape{rows, cols}.str() + " given " +
                     std::to_string(values.size()) + " values");
  }
  auto node = make_node({rows, cols}, std::move(values));
  node->requires_grad = requires_grad;
  return Tensor(node);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return from(1, 1, {value}, requires_grad);
}

Tensor Tensor::row(std::vector<double> values, bool requires_grad) {
  const std::size_t n = values.size();
  return from(1, n, std::move(values), requires_grad);
}

double Tensor::item() const {
  if (size() != 1) throw ShapeError("item() on tensor of shape " + shape().str());
  return node_->values[0];
}

std::span<double> Tensor::mutable_grad() {
  node_->ensure_grad();
  return node_->grad;
}

void Tensor::zero_grad() {
  if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

void Tensor::backward() const {
  if (rows() != 1 || cols() != 1) {
    throw ShapeError("backward requires a scalar, got rank-2 tensor " + shape().str());
  }
  if (!node_->requires_grad) {
    throw Error("backward on a tensor with no recorded gradient history");
  }
  Tape::from_root(*this).replay();
}

Tensor Tensor::detach() const {
  auto node = make_node(shape(), node_->values);
  return Tensor(node);
}

Tensor Tensor::clone() const {
  auto node = make_node(shape(), node_->values);
  node->requires_grad = node_->requires_grad;
  return Tensor(node);
}

Tape Tape::from_root(const Tensor& root) {
  Tape tape;
  tape.root_ = root.node();
  std::vector<Node*> stack{root.node().get()};
  std::unordered_set<Node*> seen;
  std::vector<Node*> order;
  while (!stack.empty()) {
    Node* n = stack.back();
    stack.pop_back();
    if (!n->requires_grad) continue;
    if (!seen.insert(n).second) continue;
    order.push_back(n);
    for (const auto& p : n->parents) stack.push_back(p.get());
  }
  std::sort(order.begin(), order.end(), [](const Node* a, const Node* b) { return a->seq > b->seq; });
  tape.records_ = std::move(order);
  return tape;
}

void Tape::replay() const {
  // Interior nodes start fresh each pass; leaves accumulate across passes.
  for (Node* n : records_) {
    if (n->backward_fn) {
      n->grad.assign(n->values.size(), 0.0);
    } else {
      n->ensure_grad();
    }
  }
  if (records_.empty()) return;
  root_->grad[0] += 1.0;
  for (Node* n : records_) {
    if (n->backward_fn) n->backward_fn(*n);
  }
}

NoGradGuard::NoGradGuard() : previous_(t_grad_enabled) { t_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { t_grad_enabled = previous_; }

bool grad_enabled() { return t_grad_enabled; }

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions disagree for " + a.shape().str() + " x " +
                     b.shape().str());
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  auto out = make_node({m, n});
  gemm_nn(a.values().data(), b.values().data(), out->values.data(), m, k, n);
  return record(out, {a.node(), b.node()}, "matmul", [m, k, n](Node& self) {
    const double* av = self.parents[0]->values.data();
    const double* bv = self.parents[1]->values.data();
    if (double* ga = grad_of(self, 0)) gemm_nt(self.grad.data(), bv, ga, m, n, k);
    if (double* gb = grad_of(self, 1)) gemm_tn(av, self.grad.data(), gb, m, k, n);
  });
}

Tensor transpose(const Tensor& x) {
  const std::size_t r = x.rows(), c = x.cols();
  auto out = make_node({c, r});
  const auto& xv = x.node()->values;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out->values[j * r + i] = xv[i * c + j];
  return record(out, {x.node()}, "transpose", [r, c](Node& self) {
    double* gx = grad_of(self, 0);
    if (!gx) return;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) gx[i * c + j] += self.grad[j * r + i];
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; });
}

Tensor scale(const Tensor& x, double s) {
  return unary(
      x, "scale", [s](double v) { return v * s; }, [s](double, double) { return s; });
}

Tensor add_scalar(const Tensor& x, double s) {
  return unary(
      x, "add_scalar", [s](double v) { return v + s; }, [](double, double) { return 1.0; });
}

Tensor tanh(const Tensor& x) {
  return unary(
      x, "tanh", [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor relu(const Tensor& x) {
  return unary(
      x, "relu", [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor exp(const Tensor& x) {
  return unary(
      x, "exp", [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& x) {
  return unary(
      x, "log", [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

Tensor reciprocal(const Tensor& x) {
  return unary(
      x, "reciprocal", [](double v) { return 1.0 / v; },
      [](double, double y) { return -y * y; });
}

Tensor softmax(const Tensor& x, int axis) {
  const std::size_t ax = normalize_axis(axis, "softmax");
  const Slices sl(x.shape(), ax);
  auto out = make_node(x.shape());
  const auto& xv = x.node()->values;
  for (std::size_t k = 0; k < sl.count; ++k) {
    const std::size_t off = k * sl.step;
    double mx = kNegInf;
    for (std::size_t t = 0; t < sl.len; ++t) mx = std::max(mx, xv[off + t * sl.stride]);
    if (mx == kNegInf) throw NumericError("softmax: slice is entirely -inf (degenerate slice)");
    double z = 0.0;
    for (std::size_t t = 0; t < sl.len; ++t) {
      const double e = std::exp(xv[off + t * sl.stride] - mx);
      out->values[off + t * sl.stride] = e;
      z += e;
    }
    for (std::size_t t = 0; t < sl.len; ++t) out->values[off + t * sl.stride] /= z;
  }
  return record(out, {x.node()}, "softmax", [sl](Node& self) {
    double* gx = grad_of(self, 0);
    if (!gx) return;
    for (std::size_t k = 0; k < sl.count; ++k) {
      const std::size_t off = k * sl.step;
      double dot = 0.0;
      for (std::size_t t = 0; t < sl.len; ++t) {
        const std::size_t i = off + t * sl.stride;
        dot += self.grad[i] * self.values[i];
      }
      for (std::size_t t = 0; t < sl.len; ++t) {
        const std::size_t i = off + t * sl.stride;
        gx[i] += self.values[i] * (self.grad[i] - dot);
      }
    }
  });
}

Tensor log_softmax(const Tensor& x, int axis) {
  const std::size_t ax = normalize_axis(axis, "log_softmax");
  const Slices sl(x.shape(), ax);
  auto out = make_node(x.shape());
  const auto& xv = x.node()->values;
  for (std::size_t k = 0; k < sl.count; ++k) {
    const std::size_t off = k * sl.step;
    double mx = kNegInf;
    for (std::size_t t = 0; t < sl.len; ++t) mx = std::max(mx, xv[off + t * sl.stride]);
    if (mx == kNegInf) throw NumericError("log_softmax: slice is entirely -inf (degenerate slice)");
    double z = 0.0;
    for (std::size_t t = 0; t < sl.len; ++t) z += std::exp(xv[off + t * sl.stride] - mx);
    const double lse = mx + std::log(z);
    for (std::size_t t = 0; t < sl.len; ++t) {
      out->values[off + t * sl.stride] = xv[off + t * sl.stride] - lse;
    }
  }
  return record(out, {x.node()}, "log_softmax", [sl](Node& self) {
    double* gx = grad_of(self, 0);
    if (!gx) return;
    for (std::size_t k = 0; k < sl.count; ++k) {
      const std::size_t off = k * sl.step;
      double gsum = 0.0;
      for (std::size_t t = 0; t < sl.len; ++t) gsum += self.grad[off + t * sl.stride];
      for (std::size_t t = 0; t < sl.len; ++t) {
        const std::size_t i = off + t * sl.stride;
        gx[i] += self.grad[i] - std::exp(self.values[i]) * gsum;
      }
    }
  });
}

Tensor logsumexp(const Tensor& x, int axis) {
  const std::size_t ax = normalize_axis(axis, "logsumexp");
  const Slices sl(x.shape(), ax);
  if (sl.len == 0) throw NumericError("logsumexp: empty reduction axis");
  auto out = make_node(sl.reduced(ax));
  const auto& xv = x.node()->values;
  for (std::size_t k = 0; k < sl.count; ++k) {
    const std::size_t off = k * sl.step;
    double mx = kNegInf;
    for (std::size_t t = 0; t < sl.len; ++t) mx = std::max(mx, xv[off + t * sl.stride]);
    if (mx == kNegInf) {
      out->values[k] = kNegInf;
      continue;
    }
    double z = 0.0;
    for (std::size_t t = 0; t < sl.len; ++t) z += std::exp(xv[off + t * sl.stride] - mx);
    out->values[k] = mx + std::log(z);
  }
  return record(out, {x.node()}, "logsumexp", [sl](Node& self) {
    double* gx = grad_of(self, 0);
    if (!gx) return;
    const auto& xv = self.parents[0]->values;
    for (std::size_t k = 0; k < sl.count; ++k) {
      const std::size_t off = k * sl.step;
      if (self.values[k] == kNegInf) continue;
      for (std::size_t t = 0; t < sl.len; ++t) {
        const std::size_t i = off + t * sl.stride;
        gx[i] += self.grad[k] * std::exp(xv[i] - self.values[k]);
      }
    }
  });
}

Tensor sum(const Tensor& x, int axis) {
  const std::size_t ax = normalize_axis(axis, "sum");
  const Slices sl(x.shape(), ax);
  auto out = make_node(sl.reduced(ax));
  const auto& xv = x.node()->values;
  for (std::size_t k = 0; k < sl.count; ++k) {
    double acc = 0.0;
    for (std::size_t t = 0; t < sl.len; ++t) acc += xv[k * sl.step + t * sl.stride];
    out->values[k] = acc;
  }
  return record(out, {x.node()}, "sum_axis", [sl](Node& self) {
    double* gx = grad_of(self, 0);
    if (!gx) return;
    for (std::size_t k = 0; k < sl.count; ++k)
      for (std::size_t t = 0; t < sl.len; ++t) gx[k * sl.step + t * sl.stride] += self.grad[k];
  });
}

Tensor sum(const Tensor& x) {
  auto out = make_node({1, 1});
  double acc = 0.0;
  for (double v : x.values()) acc += v;
  out->values[0] = acc;
  return record(out, {x.node()}, "sum", [](Node& self) {
    double* gx = grad_of(self, 0);
    if (!gx) return;
    const std::size_t n = self.parents[0]->values.size();
    for (std::size_t i = 0; i < n; ++i) gx[i] += self.grad[0];
  });
}

Tensor mean(const Tensor& x, int axis) {
  const std::size_t ax = normalize_axis(axis, "mean");
  const std::size_t len = ax == 1 ? x.cols() : x.rows();
  if (len == 0) throw NumericError("mean: empty reduction axis");
  return scale(sum(x, axis), 1.0 / static_cast<double>(len));
}

Tensor mean(const Tensor& x) {
  if (x.size() == 0) throw NumericError("mean: empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(x.size()));
}

Tensor concat(const std::vector<Tensor>& parts, int axis) {
  const std::size_t ax = normalize_axis(axis, "concat");
  if (parts.empty()) throw ShapeError("concat: no inputs");
  std::vector<NodePtr> parents;
  std::vector<std::size_t> widths;
  Shape s = parts[0].shape();
  if (ax == 1) s.cols = 0; else s.rows = 0;
  for (const auto& p : parts) {
    if (ax == 1 && p.rows() != parts[0].rows()) {
      throw ShapeError("concat: row mismatch " + p.shape().str() + " vs " + parts[0].shape().str());
    }
    if (ax == 0 && p.cols() != parts[0].cols()) {
      throw ShapeError("concat: column mismatch " + p.shape().str() + " vs " +
                       parts[0].shape().str());
    }
    widths.push_back(ax == 1 ? p.cols() : p.rows());
    if (ax == 1) s.cols += p.cols(); else s.rows += p.rows();
    parents.push_back(p.node());
  }
  auto out = make_node(s);
  std::size_t offset = 0;
  for (std::size_t q = 0; q < parts.size(); ++q) {
    const auto& pv = parts[q].node()->values;
    if (ax == 1) {
      for (std::size_t i = 0; i < s.rows; ++i)
        std::copy_n(pv.begin() + i * widths[q], widths[q], out->values.begin() + i * s.cols + offset);
    } else {
      std::copy(pv.begin(), pv.end(), out->values.begin() + offset * s.cols);
    }
    offset += widths[q];
  }
  return record(out, std::move(parents), "concat", [ax, s, widths](Node& self) {
    std::size_t offset = 0;
    for (std::size_t q = 0; q < widths.size(); ++q) {
      if (double* g = grad_of(self, q)) {
        if (ax == 1) {
          for (std::size_t i = 0; i < s.rows; ++i)
            for (std::size_t j = 0; j < widths[q]; ++j)
              g[i * widths[q] + j] += self.grad[i * s.cols + offset + j];
        } else {
          const std::size_t n = widths[q] * s.cols;
          for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[offset * s.cols + i];
        }
      }
      offset += widths[q];
    }
  });
}

Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end) {
  if (begin > end || end > x.rows()) {
    throw ShapeError("slice_rows: range [" + std::to_string(begin) + "," + std::to_string(end) +
                     ") out of bounds for " + x.shape().str());
  }
  const std::size_t c = x.cols();
  auto out = make_node({end - begin, c});
  std::copy(x.values().begin() + begin * c, x.values().begin() + end * c, out->values.begin());
  return record(out, {x.node()}, "slice_rows", [begin, c](Node& self) {
    double* gx = grad_of(self, 0);
    if (!gx) return;
    for (std::size_t i = 0; i < self.grad.size(); ++i) gx[begin * c + i] += self.grad[i];
  });
}

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end) {
  if (begin > end || end > x.cols()) {
    throw ShapeError("slice_cols: range [" + std::to_string(begin) + "," + std::to_string(end) +
                     ") out of bounds for " + x.shape().str());
  }
  const std::size_t r = x.rows(), c = x.cols(), w = end - begin;
  auto out = make_node({r, w});
  for (std::size_t i = 0; i < r; ++i)
    std::copy_n(x.values().begin() + i * c + begin, w, out->values.begin() + i * w);
  return record(out, {x.node()}, "slice_cols", [r, c, w, begin](Node& self) {
    double* gx = grad_of(self, 0);
    if (!gx) return;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < w; ++j) gx[i * c + begin + j] += self.grad[i * w + j];
  });
}

Tensor gather_rows(const Tensor& x, std::span<const std::size_t> indices) {
  const std::size_t c = x.cols();
  for (std::size_t idx : indices) {
    if (idx >= x.rows()) {
      throw ShapeError("gather_rows: index " + std::to_string(idx) + " out of range for " +
                       x.shape().str());
    }
  }
  auto out = make_node({indices.size(), c});
  for (std::size_t i = 0; i < indices.size(); ++i)
    std::copy_n(x.values().begin() + indices[i] * c, c, out->values.begin() + i * c);
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  return record(out, {x.node()}, "gather_rows", [idx = std::move(idx), c](Node& self) {
    double* gx = grad_of(self, 0);
    if (!gx) return;
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < c; ++j) gx[idx[i] * c + j] += self.grad[i * c + j];
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  const std::size_t r = x.rows(), c = x.cols();
  if (gamma.shape() != Shape{1, c} || beta.shape() != Shape{1, c}) {
    throw ShapeError("layer_norm: gain/bias must be [1x" + std::to_string(c) + "], got " +
                     gamma.shape().str() + " and " + beta.shape().str());
  }
  auto out = make_node({r, c});
  std::vector<double> xhat(r * c), inv_std(r);
  const auto& xv = x.node()->values;
  const auto& gv = gamma.node()->values;
  const auto& bv = beta.node()->values;
  for (std::size_t i = 0; i < r; ++i) {
    double mu = 0.0;
    for (std::size_t j = 0; j < c; ++j) mu += xv[i * c + j];
    mu /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t j = 0; j < c; ++j) var += (xv[i * c + j] - mu) * (xv[i * c + j] - mu);
    var /= static_cast<double>(c);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < c; ++j) {
      xhat[i * c + j] = (xv[i * c + j] - mu) * inv_std[i];
      out->values[i * c + j] = gv[j] * xhat[i * c + j] + bv[j];
    }
  }
  return record(out, {x.node(), gamma.node(), beta.node()}, "layer_norm",
                [r, c, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& self) {
                  const auto& gv = self.parents[1]->values;
                  double* gx = grad_of(self, 0);
                  double* gg = grad_of(self, 1);
                  double* gb = grad_of(self, 2);
                  const double n = static_cast<double>(c);
                  for (std::size_t i = 0; i < r; ++i) {
                    double m1 = 0.0, m2 = 0.0;
                    for (std::size_t j = 0; j < c; ++j) {
                      const double dy = self.grad[i * c + j];
                      if (gg) gg[j] += dy * xhat[i * c + j];
                      if (gb) gb[j] += dy;
                      const double dxh = dy * gv[j];
                      m1 += dxh;
                      m2 += dxh * xhat[i * c + j];
                    }
                    if (!gx) continue;
                    m1 /= n;
                    m2 /= n;
                    for (std::size_t j = 0; j < c; ++j) {
                      const double dxh = self.grad[i * c + j] * gv[j];
                      gx[i * c + j] += inv_std[i] * (dxh - m1 - xhat[i * c + j] * m2);
                    }
                  }
                });
}

Tensor masked_fill(const Tensor& x, std::span<const std::uint8_t> mask, double value) {
  if (mask.size() != x.size()) {
    throw ShapeError("masked_fill: mask has " + std::to_string(mask.size()) +
                     " entries for tensor " + x.shape().str());
  }
  auto out = make_node(x.shape(), x.node()->values);
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out->values[i] = value;
  std::vector<std::uint8_t> m(mask.begin(), mask.end());
  return record(out, {x.node()}, "masked_fill", [m = std::move(m)](Node& self) {
    double* gx = grad_of(self, 0);
    if (!gx) return;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (!m[i]) gx[i] += self.grad[i];
  });
}

Tensor grouped_outer(const Tensor& a, const Tensor& b, std::size_t groups) {
  if (a.shape() != b.shape()) {
    throw ShapeError("grouped_outer: operand shapes differ: " + a.shape().str() + " vs " +
                     b.shape().str());
  }
  if (groups == 0 || a.cols() % groups != 0) {
    throw ShapeError("grouped_outer: width " + std::to_string(a.cols()) +
                     " not divisible into " + std::to_string(groups) + " groups");
  }
  const std::size_t p = a.rows(), d = a.cols(), w = d / groups, width = groups * w * w;
  auto out = make_node({p, width});
  const auto& av = a.node()->values;
  const auto& bv = b.node()->values;
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t g = 0; g < groups; ++g)
      for (std::size_t i = 0; i < w; ++i) {
        const double ai = av[r * d + g * w + i];
        double* o = out->values.data() + r * width + g * w * w + i * w;
        const double* bj = bv.data() + r * d + g * w;
        for (std::size_t j = 0; j < w; ++j) o[j] = ai * bj[j];
      }
  return record(out, {a.node(), b.node()}, "grouped_outer", [p, d, w, groups, width](Node& self) {
    const auto& av = self.parents[0]->values;
    const auto& bv = self.parents[1]->values;
    double* ga = grad_of(self, 0);
    double* gb = grad_of(self, 1);
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t g = 0; g < groups; ++g)
        for (std::size_t i = 0; i < w; ++i) {
          const double* go = self.grad.data() + r * width + g * w * w + i * w;
          const double ai = av[r * d + g * w + i];
          double acc = 0.0;
          for (std::size_t j = 0; j < w; ++j) {
            acc += go[j] * bv[r * d + g * w + j];
            if (gb) gb[r * d + g * w + j] += go[j] * ai;
          }
          if (ga) ga[r * d + g * w + i] += acc;
        }
  });
}

namespace {

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
}

}  // namespace

double grad_check(const std::function<Tensor(const Tensor&)>& f, Tensor x, double step) {
  x.set_requires_grad(true);
  x.zero_grad();
  f(x).backward();
  const std::vector<double> analytic(x.grad().begin(), x.grad().end());
  NoGradGuard no_grad;
  auto v = x.mutable_values();
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double saved = v[i];
    v[i] = saved + step;
    const double fp = f(x).item();
    v[i] = saved - step;
    const double fm = f(x).item();
    v[i] = saved;
    worst = std::max(worst, relative_error(analytic[i], (fp - fm) / (2.0 * step)));
  }
  return worst;
}

double grad_check(const std::function<Tensor()>& f, std::vector<Tensor> leaves, double step,
                  std::size_t max_coords) {
  for (auto& leaf : leaves) leaf.zero_grad();
  f().backward();
  double worst = 0.0;
  for (auto& leaf : leaves) {
    if (!leaf.has_grad()) leaf.mutable_grad();
    const std::vector<double> analytic(leaf.grad().begin(), leaf.grad().end());
    auto v = leaf.mutable_values();
    const std::size_t stride =
        (max_coords == 0 || v.size() <= max_coords) ? 1 : (v.size() + max_coords - 1) / max_coords;
    NoGradGuard no_grad;
    for (std::size_t i = 0; i < v.size(); i += stride) {
      const double saved = v[i];
      v[i] = saved + step;
      const double fp = f().item();
      v[i] = saved - step;
      const double fm = f().item();
      v[i] = saved;
      worst = std::max(worst, relative_error(analytic[i], (fp - fm) / (2.0 * step)));
    }
  }
  return worst;
}

}  // namespace aadocre::ad
