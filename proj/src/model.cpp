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

#include "aadocre/model.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "aadocre/errors.hpp"
#include "aadocre/seeds.hpp"

namespace aadocre {

using nlohmann::json;

std::string ModelConfig::to_json() const {
  const auto& e = encoder;
  json j = {{"encoder",
             {{"vocab_size", e.vocab_size}, {"hidden", e.hidden}, {"layers", e.layers}, {"heads", e.heads},
              {"max_len", e.max_len}, {"ff", e.ff}, {"dropout", e.dropout}, {"k_att", e.k_att},
              {"locality", e.locality}}},
            {"aa",
             {{"gcn_layers", aa.gcn_layers}, {"iterations", aa.iterations}, {"graph_heads", aa.graph_heads},
              {"groups", aa.groups}, {"use_graph", aa.use_graph}, {"shared_bias", aa.shared_bias},
              {"context_eps", aa.context_eps}}},
            {"graph_variant", to_string(graph_variant)},
            {"exclude_mention_overlap", exclude_mention_overlap},
            {"seed", seed}};
  return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    ModelConfig c;
    const auto& e = j.at("encoder");
    c.encoder.vocab_size = e.at("vocab_size");
    c.encoder.hidden = e.at("hidden");
    c.encoder.layers = e.at("layers");
    c.encoder.heads = e.at("heads");
    c.encoder.max_len = e.at("max_len");
    c.encoder.ff = e.at("ff");
    c.encoder.dropout = e.at("dropout");
    c.encoder.k_att = e.at("k_att");
    c.encoder.locality = e.value("locality", 0.0);
    const auto& a = j.at("aa");
    c.aa.gcn_layers = a.at("gcn_layers");
    c.aa.iterations = a.at("iterations");
    c.aa.graph_heads = a.at("graph_heads");
    c.aa.groups = a.at("groups");
    c.aa.use_graph = a.at("use_graph");
    c.aa.shared_bias = a.at("shared_bias");
    c.aa.context_eps = a.at("context_eps");
    c.graph_variant = parse_graph_variant(j.at("graph_variant"));
    c.exclude_mention_overlap = j.at("exclude_mention_overlap");
    c.seed = j.at("seed");
    return c;
  } catch (const json::exception& ex) {
    throw ParseError(std::string("model config: ") + ex.what());
  }
}

Model::Model(const ModelConfig& config, Vocabulary vocab, RelationVocab relations)
    : config_(config), vocab_(std::move(vocab)), relations_(std::move(relations)),
      store_(std::make_unique<ParamStore>()) {
  config_.encoder.vocab_size = vocab_.size();
  auto rng = stream(config_.seed, "init");
  encoder_ = Encoder(config_.encoder, *store_, rng);
  network_ = AANetwork(config_.aa, config_.encoder.hidden, relations_.size(), *store_, rng);
}

PreparedDoc Model::prepare(const Document& doc) const {
  PreparedDoc p;
  p.doc = doc;
  p.marked = mark_entities(doc);
  p.ids = vocab_.encode(p.marked);
  if (p.ids.size() > config_.encoder.max_len)
    throw ValidationError("document '" + doc.doc_id + "' has " + std::to_string(p.ids.size()) +
                          " marked tokens, above max_len " + std::to_string(config_.encoder.max_len));
  if (!doc.parse.empty()) p.anaphors = extract_anaphors(doc, {config_.exclude_mention_overlap});
  p.graph = build_graph(doc, p.anaphors, config_.graph_variant, config_.seed);
  return p;
}

PairForward Model::forward(const PreparedDoc& prepared, bool train, std::uint64_t dropout_seed,
                           std::vector<std::pair<int, int>> pairs) const {
  const EncoderOutput out = encoder_.encode(prepared.ids, train, dropout_seed);
  return network_.forward(prepared.doc, prepared.graph, prepared.marked, out, std::move(pairs));
}

std::vector<std::vector<double>> Model::snapshot() const {
  std::vector<std::vector<double>> out;
  for (const auto& p : store_->all()) out.emplace_back(p.tensor.values().begin(), p.tensor.values().end());
  return out;
}

void Model::restore(const std::vector<std::vector<double>>& values) {
  auto& ps = store_->all();
  if (values.size() != ps.size()) throw ValidationError("restore: parameter count mismatch");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto dst = ps[i].tensor.mutable_values();
    if (dst.size() != values[i].size()) throw ValidationError("restore: size mismatch for " + ps[i].name);
    std::copy(values[i].begin(), values[i].end(), dst.begin());
  }
}

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");
constexpr char kMagic[8] = {'A', 'A', 'D', 'O', 'C', 'R', 'E', '\0'};

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_string(std::ostream& os, const std::string& s) {
  put<std::uint64_t>(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T get(std::istream& is, const std::string& what) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw ParseError("checkpoint truncated while reading " + what);
  return v;
}

std::string get_string(std::istream& is, const std::string& what) {
  const auto n = get<std::uint64_t>(is, what);
  if (n > (1ULL << 32)) throw ParseError("checkpoint: implausible length for " + what);
  std::string s(n, '\0');
  if (!is.read(s.data(), static_cast<std::streamsize>(n))) throw ParseError("checkpoint truncated while reading " + what);
  return s;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Model& model, const std::string& train_config_json) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open checkpoint '" + path.string() + "' for writing");
  os.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(os, kCheckpointVersion);
  put_string(os, model.config().to_json());
  put_string(os, train_config_json);
  put<std::uint64_t>(os, model.relations().hash());
  put_string(os, json(model.vocab().tokens()).dump());
  put_string(os, json(model.relations().names()).dump());
  const auto& ps = model.params().all();
  put<std::uint64_t>(os, ps.size());
  for (const auto& p : ps) {
    put_string(os, p.name);
    put<std::uint64_t>(os, p.tensor.rows());
    put<std::uint64_t>(os, p.tensor.cols());
    os.write(reinterpret_cast<const char*>(p.tensor.values().data()),
             static_cast<std::streamsize>(p.tensor.size() * sizeof(double)));
  }
  if (!os) throw Error("failed writing checkpoint '" + path.string() + "'");
}

Model load_checkpoint(const std::filesystem::path& path, std::string* train_config_json) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("checkpoint '" + path.string() + "' not found");
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw ParseError("'" + path.string() + "' is not an aadocre checkpoint");
  const auto version = get<std::uint32_t>(is, "version");
  if (version != kCheckpointVersion)
    throw ParseError("checkpoint version " + std::to_string(version) + " unsupported (expected " +
                     std::to_string(kCheckpointVersion) + ")");
  const ModelConfig config = ModelConfig::from_json(get_string(is, "model config"));
  std::string train_json = get_string(is, "train config");
  if (train_config_json) *train_config_json = train_json;
  const auto hash = get<std::uint64_t>(is, "relation hash");
  std::vector<std::string> tokens, names;
  try {
    tokens = json::parse(get_string(is, "vocabulary")).get<std::vector<std::string>>();
    names = json::parse(get_string(is, "relations")).get<std::vector<std::string>>();
  } catch (const json::exception& ex) {
    throw ParseError(std::string("checkpoint vocabularies: ") + ex.what());
  }
  RelationVocab relations(names);
  if (relations.hash() != hash) throw ParseError("checkpoint relation vocabulary hash mismatch");
  Model model(config, Vocabulary::from_tokens(tokens), relations);
  const auto count = get<std::uint64_t>(is, "parameter count");
  auto& ps = model.params().all();
  if (count != ps.size())
    throw ParseError("checkpoint holds " + std::to_string(count) + " tensors, model expects " + std::to_string(ps.size()));
  for (auto& p : ps) {
    const std::string name = get_string(is, "parameter name");
    const auto rows = get<std::uint64_t>(is, name + " rows");
    const auto cols = get<std::uint64_t>(is, name + " cols");
    if (name != p.name || rows != p.tensor.rows() || cols != p.tensor.cols())
      throw ParseError("checkpoint tensor '" + name + "' does not match expected '" + p.name + "' " +
                       p.tensor.shape().str());
    auto dst = p.tensor.mutable_values();
    if (!is.read(reinterpret_cast<char*>(dst.data()), static_cast<std::streamsize>(dst.size() * sizeof(double))))
      throw ParseError("checkpoint truncated in tensor '" + name + "'");
  }
  if (is.peek() != std::char_traits<char>::eof()) throw ParseError("checkpoint has trailing bytes after the last tensor");
  return model;
}

}  // namespace aadocre
