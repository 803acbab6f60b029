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

// Acceptance run: one PASS/FAIL/SKIP line per criterion. `--only 1,4,9`
// restricts the run; DocRED checks need AADOCRE_DOCRED_DIR or --docred.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aadocre/aa_network.hpp"
#include "aadocre/anaphor_graph.hpp"
#include "aadocre/encoder.hpp"
#include "aadocre/gradcheck.hpp"
#include "aadocre/inference.hpp"
#include "aadocre/objectives.hpp"
#include "aadocre/synthetic.hpp"
#include "aadocre/trainer.hpp"
#include "cli.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace aadocre;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum Status { kPass, kFail, kSkip } status;
  std::string detail;
};

Outcome verdict(bool ok, const std::string& detail) { return {ok ? Outcome::kPass : Outcome::kFail, detail}; }

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

using SpanSet = std::set<testing::Span>;

SpanSet spans(const std::vector<Anaphor>& as) {
  SpanSet out;
  for (const auto& a : as) out.insert({a.sent_id, a.start, a.end});
  return out;
}

// 1. Finite-difference agreement over 20 seeds.
Outcome gradient_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  const GradCheckReport r = run_gradcheck_suite({});
  const double secs = seconds_since(t0);
  return verdict(r.passed() && secs < 120.0,
                 std::to_string(r.cases.size()) + " cases, worst rel. error " + fmt(r.worst()) + ", " +
                     std::to_string(r.failures()) + " failures, " + fmt(secs, 3) + " s");
}

// 2. The worked example plus random single-sentence documents against the rule oracle.
Outcome anaphor_fidelity() {
  std::vector<std::string> surfaces;
  for (const auto& a : extract_anaphors(synthetic::walmart_example())) surfaces.push_back(a.surface);
  const bool fixture = surfaces == std::vector<std::string>{"He", "the market"};
  std::mt19937_64 rng(2024);
  synthetic::RandomDocLimits one;
  one.max_sentences = 1;
  int agree = 0;
  for (int k = 0; k < 50; ++k) {
    const Document d = synthetic::random_document(rng, one);
    agree += spans(extract_anaphors(d)) == testing::rule_oracle(d) ? 1 : 0;
  }
  return verdict(fixture && agree == 50,
                 std::string("fixture ") + (fixture ? "exact" : "mismatch") + ", oracle agreement " +
                     std::to_string(agree) + "/50");
}

// 3. Edge sets and closed-form counts on random documents.
Outcome graph_oracle() {
  std::mt19937_64 rng(77);
  int sets = 0, counts = 0;
  for (int k = 0; k < 100; ++k) {
    const Document d = synthetic::random_document(rng);
    const auto as = extract_anaphors(d);
    const auto g = build_graph(d, as);
    const auto got = testing::edges_of(g);
    const auto want = testing::edge_oracle(g);
    bool same = testing::graph_well_formed(g);
    for (std::size_t t = 0; t < kEdgeTypes; ++t) same = same && got.edges[t] == want.edges[t];
    sets += same ? 1 : 0;
    const auto c = testing::expected_edge_counts(d, as.size());
    bool exact = true;
    for (std::size_t t = 0; t < kEdgeTypes; ++t) exact = exact && g.edge_count(t) == c[t];
    counts += exact ? 1 : 0;
  }
  return verdict(sets == 100 && counts == 100,
                 "edge sets " + std::to_string(sets) + "/100, counts " + std::to_string(counts) + "/100");
}

// 4. Loss and fusion closed forms.
Outcome closed_forms() {
  const double atl =
      atl_loss(ad::Tensor::from(1, 5, std::vector<double>(5, 0.0)), std::vector<int>{0}).item();
  const double atl_err = std::abs(atl - (std::log(2.0) + std::log(4.0)));
  const auto half = ad::Tensor::from(1, 2, {0.5, 0.5});
  const double self = evidence_loss(half, {{0.5, 0.5}}).item();
  const double ln2 = evidence_loss(half, {{1.0, 0.0}}).item();
  const double kl_err = std::max(std::abs(self), std::abs(ln2 - std::log(2.0)));
  const double fused = fuse(0.7, 0.6, 0.5);
  const bool ok = atl_err <= 1e-9 && kl_err <= 1e-9 && fused == 0.7 + 0.6 - 0.5 && std::abs(fused - 0.8) < 1e-15;
  return verdict(ok, "atl err " + fmt(atl_err) + ", kl err " + fmt(kl_err) + ", fuse " + fmt(fused, 17));
}

// 5. Row-stochastic attention, normalized adjacency, sentence distributions.
Outcome normalizations() {
  std::mt19937_64 rng(5);
  double worst = 0.0;
  bool support_ok = true;

  EncoderConfig ec;
  ec.vocab_size = 20;
  ec.hidden = 8;
  ec.layers = 2;
  ec.heads = 2;
  ec.ff = 16;
  ec.max_len = 32;
  ec.dropout = 0.0;
  ParamStore store;
  Encoder enc(ec, store, rng);
  std::uniform_int_distribution<std::size_t> len(1, 32);
  std::uniform_int_distribution<int> tok(0, 19);
  for (int k = 0; k < 50; ++k) {
    std::vector<int> ids(len(rng));
    for (auto& x : ids) x = tok(rng);
    const auto A = enc.encode(ids).A;
    for (std::size_t i = 0; i < A.rows(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < A.cols(); ++j) {
        support_ok = support_ok && A.at(i, j) >= 0.0;
        s += A.at(i, j);
      }
      worst = std::max(worst, std::abs(s - 1.0));
    }
  }

  std::uniform_int_distribution<std::size_t> nodes(2, 10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = nodes(rng), d = 4;
    AdjacencyParams p;
    for (std::size_t t = 0; t < kEdgeTypes; ++t)
      for (int h = 0; h < 2; ++h) {
        p.wq[t].push_back(testing::random_tensor(rng, d, d));
        p.wk[t].push_back(testing::random_tensor(rng, d, d));
      }
    EdgeMatrices e;
    for (auto& a : e) a.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (u(rng) < 0.4) {
          auto& a = e[static_cast<std::size_t>(u(rng) * kEdgeTypes) % kEdgeTypes];
          a[i * n + j] = a[j * n + i] = 1;
        }
    const auto adj = dynamic_adjacency(testing::random_tensor(rng, n, d, -2, 2), e, p);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      bool any = false;
      for (std::size_t j = 0; j < n; ++j) {
        const bool edge = e[0][i * n + j] || e[1][i * n + j] || e[2][i * n + j];
        const double w = adj.weights.at(i, j);
        support_ok = support_ok && w >= 0.0 && (edge || w == 0.0);
        any = any || edge;
        s += w;
      }
      worst = std::max(worst, any ? std::abs(s - 1.0) : std::abs(s));
    }
  }

  std::uniform_int_distribution<std::size_t> sents(1, 6), width(1, 5);
  for (int k = 0; k < 50; ++k) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t at = 0;
    for (std::size_t s = sents(rng); s > 0; --s) {
      const std::size_t w = width(rng);
      spans.emplace_back(at, at + w);
      at += w;
    }
    auto softmax_rows = [&](std::size_t rows) {
      auto t = testing::random_tensor(rng, rows, at, -3, 3);
      return ad::softmax(t, 1);
    };
    const auto ev = evidence_distribution(softmax_rows(3), softmax_rows(3), spans);
    for (std::size_t i = 0; i < ev.p.rows(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < ev.p.cols(); ++j) s += ev.p.at(i, j);
      worst = std::max(worst, std::abs(s - 1.0));
    }
  }
  return verdict(worst <= 1e-6 && support_ok,
                 "150 inputs, worst row-sum deviation " + fmt(worst) + (support_ok ? "" : ", support violated"));
}

TrainConfig overfit_config() {
  TrainConfig c;
  c.epochs = 60;
  c.batch_size = 4;
  c.warmup_ratio = 0.06;
  c.beta = 0.1;
  c.lr_encoder = 1e-3;
  c.lr_classifier = 1e-3;
  c.dropout = 0.0;
  return c;
}

// 6. Fitting a small relation corpus.
Outcome overfit() {
  const Corpus c = synthetic::relation_corpus({.docs = 32, .relations = 5, .seed = 7});
  const auto t0 = std::chrono::steady_clock::now();
  const TrainConfig cfg = overfit_config();
  const auto r = train(c, nullptr, cfg);
  const Metrics m = evaluate(predict(score_documents(r.model, c.docs)), c.docs, c.relations);
  const double secs = seconds_since(t0);
  return verdict(cfg.epochs <= 200 && m.f1 >= 0.95 && secs < 600.0,
                 "train F1 " + fmt(m.f1) + " after " + std::to_string(cfg.epochs) + " epochs, vocab " +
                     std::to_string(r.model.vocab().size()) + ", " + fmt(secs, 3) + " s");
}

// 7. Graph ablation on pronoun-bridged facts.
Outcome graph_ablation() {
  const Corpus tr = synthetic::bridge_corpus({.docs = 1024, .relations = 5, .seed = 11, .prefix = "train"});
  const Corpus dev = synthetic::bridge_corpus({.docs = 64, .relations = 5, .seed = 13, .prefix = "dev"});
  const Corpus te = synthetic::bridge_corpus({.docs = 64, .relations = 5, .seed = 12, .prefix = "held"});
  double sum[2] = {0.0, 0.0};
  for (int variant = 0; variant < 2; ++variant) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      TrainConfig cfg;
      cfg.epochs = 15;
      cfg.lr_encoder = 3e-3;
      cfg.lr_classifier = 3e-3;
      cfg.layers = 1;
      cfg.hidden = 32;
      cfg.ff = 64;
      cfg.dropout = 0.0;
      cfg.locality = 1.0;
      cfg.seed = seed;
      cfg.use_graph = variant == 0;
      const auto r = train(tr, &dev.docs, cfg);
      sum[variant] += evaluate(predict(score_documents(r.model, te.docs)), te.docs, te.relations).inter_f1;
    }
  }
  const double full = 100.0 * sum[0] / 3.0, bare = 100.0 * sum[1] / 3.0;
  return verdict(full - bare >= 5.0,
                 "held-out Inter-F1 full " + fmt(full) + " vs w/o graph " + fmt(bare) + " (gap " + fmt(full - bare) +
                     ", need >= 5)");
}

// 8. Corpus statistics on DocRED when available.
Outcome docred_fidelity(const std::string& dir) {
  if (dir.empty()) return {Outcome::kSkip, "no DocRED directory given"};
  const fs::path root = dir;
  const fs::path train_file = root / "train_annotated.json";
  if (!fs::exists(train_file)) return {Outcome::kSkip, "missing " + train_file.string()};
  Corpus c = load_corpus(train_file);
  const fs::path parses = root / "train_annotated.parses.jsonl";
  std::vector<std::size_t> counts;
  if (fs::exists(parses)) {
    attach_parses(c.docs, load_parses(parses));
    for (const auto& d : c.docs) counts.push_back(d.parse.empty() ? 0 : extract_anaphors(d).size());
  }
  const CorpusStats s = corpus_stats(c.docs, counts);
  bool ok = s.docs == 3053 && std::abs(s.mentions - 21.2) <= 0.1 && std::abs(s.entities - 19.5) <= 0.1 &&
            std::abs(s.sentences - 7.9) <= 0.1;
  std::string detail = std::to_string(s.docs) + " docs, mentions " + fmt(s.mentions) + ", entities " +
                       fmt(s.entities) + ", sentences " + fmt(s.sentences);
  if (!counts.empty()) {
    ok = ok && std::abs(s.anaphors - 12.1) <= 0.15 * 12.1;
    detail += ", anaphors " + fmt(s.anaphors);
  } else {
    detail += ", anaphor average not checked (no parses)";
  }
  return verdict(ok, detail);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// 9. Two train + infer runs through the command line give identical files.
Outcome reproducibility() {
  const fs::path dir = fs::temp_directory_path() / "aadocre_acceptance_repro";
  fs::remove_all(dir);
  std::ostringstream sink;
  auto run = [&](std::vector<std::string> args) {
    args.insert(args.begin(), "aadocre");
    return cli::run(args, sink, sink);
  };
  if (run({"generate", "--kind", "relation", "--docs", "8", "--seed", "9", "--out", (dir / "data").string()}) != 0)
    return verdict(false, "generate failed");
  const std::string corpus = (dir / "data" / "corpus.json").string();
  const std::string parses = (dir / "data" / "parses.jsonl").string();
  std::vector<std::string> files;
  for (const char* name : {"a", "b"}) {
    const std::string out = (dir / name).string();
    if (run({"train", "--train", corpus, "--train-parses", parses, "--out", out, "--epochs", "120", "--hidden", "32",
             "--ff", "64", "--lr-encoder", "3e-3", "--lr-classifier", "3e-3", "--seed", "5"}) != 0 ||
        run({"infer", "--checkpoint", out + "/model.ckpt", "--corpus", corpus, "--parses", parses, "--out", out}) != 0)
      return verdict(false, "pipeline failed: " + sink.str());
    files.push_back(slurp(fs::path(out) / "predictions.jsonl"));
  }
  const bool same = files[0] == files[1];
  const std::size_t lines = static_cast<std::size_t>(std::count(files[0].begin(), files[0].end(), '\n'));
  fs::remove_all(dir);
  return verdict(same && !files[0].empty(),
                 std::string(same ? "byte-identical" : "different") + " prediction files (" + std::to_string(lines) +
                     " lines)");
}

// 10. Zero offset with no pseudo pass reproduces plain prediction.
Outcome fusion_consistency() {
  int agree = 0;
  std::size_t triples = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Corpus c = synthetic::relation_corpus({.docs = 2, .relations = 4, .seed = 100 + seed});
    auto cfg = testing::tiny_model_config(seed % 2 == 0);
    cfg.encoder.max_len = 256;
    cfg.seed = seed;
    Model m(cfg, Vocabulary::build(c.docs), c.relations);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> shift(-0.05, 0.05);
    for (auto& p : m.params().all())
      if (p.name == "aa.bilinear.b") p.tensor.mutable_values()[c.relations.size()] = shift(rng);
    const auto scores = score_documents(m, c.docs);
    const auto pred = predict(scores);
    const auto fused = fused_predictions(fusion_candidates(c.docs, scores, nullptr, 0.2), 0.0);
    bool same = pred.size() == fused.size();
    for (std::size_t i = 0; same && i < pred.size(); ++i)
      same = pred[i].key() == fused[i].key() && pred[i].evidence == fused[i].evidence;
    agree += same ? 1 : 0;
    triples += pred.size();
  }
  return verdict(agree == 20, std::to_string(agree) + "/20 fixtures identical (" + std::to_string(triples) +
                                  " predicted triples)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> only;
  std::string docred;
  if (const char* env = std::getenv("AADOCRE_DOCRED_DIR")) docred = env;
  app.add_option("--only", only, "criteria to run")->delimiter(',')->check(CLI::Range(1, 10));
  app.add_option("--docred", docred, "directory with DocRED json files and parse sidecars");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient suite", gradient_suite},
      {"anaphor fidelity", anaphor_fidelity},
      {"graph oracle", graph_oracle},
      {"loss closed forms", closed_forms},
      {"normalization invariants", normalizations},
      {"overfit", overfit},
      {"graph ablation", graph_ablation},
      {"corpus fidelity", [&] { return docred_fidelity(docred); }},
      {"reproducibility", reproducibility},
      {"fusion consistency", fusion_consistency},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {Outcome::kFail, std::string("exception: ") + e.what()};
    }
    static const char* tags[] = {"PASS", "FAIL", "SKIP"};
    std::cout << "[" << tags[o.status] << "] " << id << ". " << criteria[i].first << ": " << o.detail << std::endl;
    failures += o.status == Outcome::kFail ? 1 : 0;
  }
  return failures == 0 ? 0 : 1;
}
