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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "aadocre/errors.hpp"
#include "aadocre/objectives.hpp"
#include "aadocre/synthetic.hpp"
#include "aadocre/trainer.hpp"
#include "support.hpp"

using namespace aadocre;

namespace {

double log_sum_exp(const std::vector<double>& xs) {
  const double m = *std::max_element(xs.begin(), xs.end());
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

// Direct two-softmax evaluation of the adaptive-threshold loss for one pair.
double atl_oracle(const std::vector<double>& o, const std::vector<int>& pos) {
  const std::size_t th = o.size() - 1;
  std::vector<double> p_side = {o[th]}, n_side = {o[th]};
  std::vector<bool> is_pos(th, false);
  for (int r : pos) is_pos[static_cast<std::size_t>(r)] = true;
  for (std::size_t r = 0; r < th; ++r) (is_pos[r] ? p_side : n_side).push_back(o[r]);
  double loss = 0.0;
  const double zp = log_sum_exp(p_side);
  for (int r : pos) loss -= o[static_cast<std::size_t>(r)] - zp;
  return loss - (o[th] - log_sum_exp(n_side));
}

double kl(const std::vector<double>& v, const std::vector<double>& p) {
  return evidence_loss(ad::Tensor::from(1, p.size(), p), {v}).item();
}

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n, double zero_prob = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(n);
  double s = 0.0;
  for (auto& v : x) s += v = (u(rng) < zero_prob ? 0.0 : u(rng) + 1e-3);
  if (s == 0.0) {
    x[0] = 1.0;
    s = 1.0;
  }
  for (auto& v : x) v /= s;
  return x;
}

}  // namespace

TEST_CASE("adaptive threshold loss closed forms") {
  const auto equal = ad::Tensor::row({0.3, 0.3, 0.3, 0.3, 0.3});
  CHECK(atl_loss(equal, std::vector<int>{1}).item() == doctest::Approx(std::log(2.0) + std::log(4.0)).epsilon(1e-12));
  CHECK(atl_loss(ad::Tensor::row({40, 0, 0, 20}), std::vector<int>{0}).item() < 1e-8);
  CHECK(atl_loss(ad::Tensor::row({0, 0, 0, 40}), std::vector<int>{}).item() < 1e-15);
  CHECK_THROWS_AS(atl_loss(equal, std::vector<int>{4}), ValidationError);
  CHECK_THROWS_AS(atl_loss(equal, std::vector<int>{7}), ValidationError);
}

TEST_CASE("adaptive threshold loss matches a direct log-softmax evaluation") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  std::bernoulli_distribution coin(0.3);
  for (int k = 0; k < 200; ++k) {
    const std::size_t classes = 2 + static_cast<std::size_t>(k % 7);
    std::vector<double> o(classes);
    for (auto& x : o) x = u(rng);
    std::vector<int> pos;
    for (std::size_t r = 0; r + 1 < classes; ++r)
      if (coin(rng)) pos.push_back(static_cast<int>(r));
    const double got = atl_loss(ad::Tensor::row(o), pos).item();
    CHECK(std::abs(got - atl_oracle(o, pos)) < 1e-10);
    CHECK(got >= 0.0);
  }
}

TEST_CASE("adaptive threshold loss sums rows") {
  std::mt19937_64 rng(12);
  const auto logits = testing::random_tensor(rng, 3, 4, -3, 3);
  const std::vector<std::uint8_t> mask = {1, 0, 0, 0, 0, 0, 0, 1, 1};
  const std::vector<std::vector<int>> pos = {{0}, {}, {1, 2}};
  double want = 0.0;
  for (std::size_t r = 0; r < 3; ++r) {
    std::vector<double> row(logits.values().begin() + r * 4, logits.values().begin() + r * 4 + 4);
    want += atl_oracle(row, pos[r]);
  }
  CHECK(std::abs(atl_loss(logits, mask).item() - want) < 1e-10);
  CHECK_THROWS_AS(atl_loss(logits, std::vector<std::uint8_t>(4, 0)), ShapeError);
}

TEST_CASE("adaptive threshold loss monotonicity") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> o(6);
    for (auto& x : o) x = u(rng);
    const int positive = k % 5;
    const double base = atl_oracle(o, {positive});
    for (int r = 0; r < 5; ++r) {
      auto up = o;
      up[static_cast<std::size_t>(r)] += 0.5;
      const double moved = atl_loss(ad::Tensor::row(up), std::vector<int>{positive}).item();
      if (r == positive) CHECK(moved < base);
      else CHECK(moved > base);
    }
  }
}

TEST_CASE("adaptive threshold loss slope with several positives") {
  // d/do_r = |P| s_r - 1 for r in P, where s is the softmax over P and TH;
  // d/do_n = softmax over N and TH at n for negatives.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const std::vector<int> pos = {1, 3};
  for (int k = 0; k < 50; ++k) {
    std::vector<double> o(6);
    for (auto& x : o) x = u(rng);
    auto x = ad::Tensor::row(o, true);
    atl_loss(x, pos).backward();
    const double zp = log_sum_exp({o[1], o[3], o[5]});
    const double zn = log_sum_exp({o[0], o[2], o[4], o[5]});
    for (int r : pos) CHECK(x.grad()[r] == doctest::Approx(2.0 * std::exp(o[r] - zp) - 1.0).epsilon(1e-12));
    for (int n : {0, 2, 4}) {
      CHECK(x.grad()[n] > 0.0);
      CHECK(x.grad()[n] == doctest::Approx(std::exp(o[n] - zn)).epsilon(1e-12));
    }
  }
}

TEST_CASE("adaptive threshold loss gradient") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    const auto x = testing::random_tensor(rng, 3, 5, -2, 2);
    const std::vector<std::uint8_t> mask = {1, 0, 1, 0, 0, 0, 0, 0, 0, 1, 1, 1};
    CHECK(ad::grad_check([&](const ad::Tensor& t) { return atl_loss(t, mask); }, x) < 1e-6);
  }
}

TEST_CASE("sentence importance") {
  const std::vector<std::pair<std::size_t, std::size_t>> spans = {{0, 2}, {2, 5}, {5, 6}};
  const auto uniform = ad::Tensor::full(1, 6, 1.0);
  const auto ed = evidence_distribution(uniform, uniform, spans);
  CHECK(ed.p.at(0, 0) == doctest::Approx(2.0 / 6));
  CHECK(ed.p.at(0, 1) == doctest::Approx(3.0 / 6));
  CHECK(ed.p.at(0, 2) == doctest::Approx(1.0 / 6));

  std::vector<double> hot(6, 0.0);
  hot[5] = 1.0;
  const auto h = ad::Tensor::from(1, 6, hot);
  const auto one = evidence_distribution(h, h, spans);
  CHECK(one.p.at(0, 2) == doctest::Approx(1.0));
  CHECK(one.p.at(0, 0) == doctest::Approx(0.0));

  std::mt19937_64 rng(14);
  for (int k = 0; k < 50; ++k) {
    const auto a = ad::softmax(testing::random_tensor(rng, 2, 6, -3, 3), 1);
    const auto b = ad::softmax(testing::random_tensor(rng, 2, 6, -3, 3), 1);
    const auto d = evidence_distribution(a, b, spans);
    for (std::size_t r = 0; r < 2; ++r) {
      double sq = 0.0, sp = 0.0;
      for (std::size_t j = 0; j < 6; ++j) {
        CHECK(d.q.at(r, j) >= 0.0);
        sq += d.q.at(r, j);
      }
      for (std::size_t s = 0; s < 3; ++s) sp += d.p.at(r, s);
      CHECK(std::abs(sq - 1.0) < 1e-6);
      CHECK(std::abs(sp - 1.0) < 1e-6);
    }
  }
  CHECK_THROWS_AS(sentence_matrix({{0, 2}, {3, 6}}, 6), ValidationError);
  CHECK_THROWS_AS(sentence_matrix({{0, 2}, {2, 5}}, 6), ValidationError);
  CHECK_THROWS_AS(sentence_matrix({{0, 4}, {2, 6}}, 6), ValidationError);
}

TEST_CASE("gold evidence distribution") {
  const auto v = gold_evidence({0, 2, 2}, 4);
  CHECK(v == std::vector<double>{0.5, 0.0, 0.5, 0.0});
  CHECK(gold_evidence({}, 3) == std::vector<double>(3, 0.0));
  CHECK_THROWS_AS(gold_evidence({3}, 3), ValidationError);
}

TEST_CASE("evidence loss closed forms") {
  CHECK(kl({1, 0}, {0.5, 0.5}) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(kl({0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}) == 0.0);
  CHECK(kl({0.5, 0.5}, {1.0, 0.0}) > 5.0);
  CHECK(std::isfinite(kl({0.5, 0.5}, {1.0, 0.0})));

  std::mt19937_64 rng(15);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k % 6);
    const auto v = random_simplex(rng, n, 0.4);
    const auto p = random_simplex(rng, n, 0.2);
    double want = 0.0;
    bool smooth = false;
    for (std::size_t i = 0; i < n; ++i) smooth = smooth || (v[i] > 0 && p[i] < 1e-8);
    const double z = 1.0 + n * 1e-8;
    for (std::size_t i = 0; i < n; ++i) {
      const double vi = smooth ? (v[i] + 1e-8) / z : v[i];
      const double pi = smooth ? (p[i] + 1e-8) / z : p[i];
      if (vi > 0) want += vi * std::log(vi / pi);
    }
    const double got = kl(v, p);
    CHECK(got >= -1e-12);
    CHECK(std::abs(got - want) < 1e-9);
    CHECK(std::abs(kl(v, v)) < 1e-9);
    // Zero only when the distributions agree.
    double gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) gap = std::max(gap, std::abs(v[i] - p[i]));
    if (gap > 1e-3) CHECK(got > 1e-9);
  }
}

TEST_CASE("evidence loss sums rows and differentiates") {
  std::mt19937_64 rng(16);
  const auto p = ad::softmax(testing::random_tensor(rng, 2, 4, -2, 2), 1);
  const std::vector<std::vector<double>> v = {gold_evidence({1}, 4), gold_evidence({0, 3}, 4)};
  const std::vector<double> r0(p.values().begin(), p.values().begin() + 4);
  const std::vector<double> r1(p.values().begin() + 4, p.values().end());
  CHECK(evidence_loss(p, v).item() == doctest::Approx(kl(v[0], r0) + kl(v[1], r1)).epsilon(1e-13));
  CHECK(evidence_loss(ad::Tensor::zeros(0, 4), {}).item() == 0.0);
  CHECK_THROWS_AS(evidence_loss(p, {v[0]}), ShapeError);

  const auto logits = testing::random_tensor(rng, 2, 4, -2, 2);
  CHECK(ad::grad_check([&](const ad::Tensor& x) { return evidence_loss(ad::softmax(x, 1), v); }, logits) < 1e-6);
}

TEST_CASE("combined objective") {
  const auto re = ad::Tensor::scalar(1.25), evi = ad::Tensor::scalar(0.5);
  CHECK(total_loss(re, evi, 0.0).item() == 1.25);
  CHECK(total_loss(re, evi, 0.1).item() == 1.25 + 0.1 * 0.5);
  CHECK(total_loss(re, ad::Tensor::scalar(0.0), 0.7).item() == 1.25);
  CHECK_THROWS_AS(total_loss(re, evi, -0.1), ConfigError);
}

TEST_CASE("document loss terms") {
  const Document doc = testing::toy_document();
  Model m = testing::tiny_model({doc});
  const auto prep = m.prepare(doc);
  const auto l = document_loss(m, prep, 0.1);
  CHECK(l.pairs == 2);
  CHECK(l.evidence_pairs == 1);
  CHECK(l.l_re.item() >= 0.0);
  CHECK(l.l_evi.item() >= 0.0);
  CHECK(l.l_total.item() == l.l_re.item() + 0.1 * l.l_evi.item());
  CHECK(document_loss(m, prep, 0.0).l_total.item() == l.l_re.item());
}

TEST_CASE("two-document batch gradient check") {
  Document a = testing::toy_document("a");
  Document b = synthetic::relation_corpus({.docs = 1, .relations = 2, .seed = 5}).docs.front();
  Model m = testing::tiny_model({a, b});
  const auto pa = m.prepare(a), pb = m.prepare(b);
  auto loss = [&] {
    return ad::scale(ad::add(document_loss(m, pa, 0.1).l_total, document_loss(m, pb, 0.1).l_total), 0.5);
  };
  CHECK(ad::grad_check(loss, m.params().tensors(), 1e-5, 6) < 1e-4);
}
