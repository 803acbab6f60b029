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

#include "aadocre/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "aadocre/errors.hpp"

namespace aadocre {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string join(const std::vector<std::string>& tokens, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out += ' ';
    out += tokens[i];
  }
  return out;
}

class Reader {
 public:
  explicit Reader(std::string doc) : doc_(std::move(doc)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw ParseError("document '" + doc_ + "': " + path + ": " + what);
  }

  const json& field(const json& obj, const char* key, const std::string& path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing field");
    return *it;
  }

  int integer(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
  }

  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  const json& array(const json& v, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected an array");
    return v;
  }

  void set_doc(std::string doc) { doc_ = std::move(doc); }

 private:
  std::string doc_;
};

Document parse_document(const json& j, std::size_t index, RelationVocab& vocab, bool extend) {
  Reader rd("#" + std::to_string(index));
  Document doc;
  if (!j.is_object()) rd.fail("$", "expected an object");
  if (auto it = j.find("title"); it != j.end()) {
    doc.doc_id = rd.string(*it, "title");
  } else {
    doc.doc_id = "doc" + std::to_string(index);
  }
  rd.set_doc(doc.doc_id);

  const json& sents = rd.array(rd.field(j, "sents", "$"), "sents");
  for (std::size_t s = 0; s < sents.size(); ++s) {
    const std::string sp = "sents[" + std::to_string(s) + "]";
    std::vector<std::string> toks;
    for (std::size_t t = 0; t < rd.array(sents[s], sp).size(); ++t) {
      toks.push_back(rd.string(sents[s][t], sp + "[" + std::to_string(t) + "]"));
    }
    doc.sentences.push_back(std::move(toks));
  }

  const json& vs = rd.array(rd.field(j, "vertexSet", "$"), "vertexSet");
  for (std::size_t e = 0; e < vs.size(); ++e) {
    const std::string ep = "vertexSet[" + std::to_string(e) + "]";
    Entity ent;
    ent.entity_id = static_cast<int>(e);
    for (std::size_t m = 0; m < rd.array(vs[e], ep).size(); ++m) {
      const std::string mp = ep + "[" + std::to_string(m) + "]";
      const json& mj = vs[e][m];
      Mention men;
      men.sent_id = rd.integer(rd.field(mj, "sent_id", mp), mp + ".sent_id");
      const json& pos = rd.array(rd.field(mj, "pos", mp), mp + ".pos");
      if (pos.size() != 2) rd.fail(mp + ".pos", "expected [start, end]");
      men.start = rd.integer(pos[0], mp + ".pos[0]");
      men.end = rd.integer(pos[1], mp + ".pos[1]");
      if (auto it = mj.find("name"); it != mj.end()) men.name = rd.string(*it, mp + ".name");
      if (auto it = mj.find("type"); it != mj.end()) men.type = rd.string(*it, mp + ".type");
      if (men.sent_id >= 0 && static_cast<std::size_t>(men.sent_id) < doc.sentences.size()) {
        const auto& sent = doc.sentences[static_cast<std::size_t>(men.sent_id)];
        if (men.start >= 0 && men.start < men.end && static_cast<std::size_t>(men.end) <= sent.size()) {
          men.surface = join(sent, static_cast<std::size_t>(men.start), static_cast<std::size_t>(men.end));
        }
      }
      if (men.name.empty()) men.name = men.surface;
      ent.mentions.push_back(std::move(men));
    }
    std::stable_sort(ent.mentions.begin(), ent.mentions.end(), [](const Mention& a, const Mention& b) {
      return std::tie(a.sent_id, a.start) < std::tie(b.sent_id, b.start);
    });
    if (!ent.mentions.empty()) ent.type = ent.mentions.front().type;
    doc.entities.push_back(std::move(ent));
  }

  if (auto it = j.find("labels"); it != j.end()) {
    const json& labels = rd.array(*it, "labels");
    for (std::size_t k = 0; k < labels.size(); ++k) {
      const std::string lp = "labels[" + std::to_string(k) + "]";
      const json& lj = labels[k];
      RelationFact f;
      f.head = rd.integer(rd.field(lj, "h", lp), lp + ".h");
      f.tail = rd.integer(rd.field(lj, "t", lp), lp + ".t");
      const std::string rel = rd.string(rd.field(lj, "r", lp), lp + ".r");
      int id = vocab.id(rel);
      if (id < 0) {
        if (!extend) {
          throw ValidationError("document '" + doc.doc_id + "': " + lp + ".r: relation '" + rel +
                                "' is not in the relation vocabulary");
        }
        id = vocab.add(rel);
      }
      f.relation = id;
      if (auto ev = lj.find("evidence"); ev != lj.end()) {
        const json& arr = rd.array(*ev, lp + ".evidence");
        for (std::size_t q = 0; q < arr.size(); ++q) {
          f.evidence.push_back(rd.integer(arr[q], lp + ".evidence[" + std::to_string(q) + "]"));
        }
        std::sort(f.evidence.begin(), f.evidence.end());
        f.evidence.erase(std::unique(f.evidence.begin(), f.evidence.end()), f.evidence.end());
      }
      doc.facts.push_back(std::move(f));
    }
  }
  return doc;
}

std::uint64_t fnv1a(std::uint64_t h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::size_t Document::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

std::vector<std::size_t> Document::sentence_offsets() const {
  std::vector<std::size_t> off{0};
  for (const auto& s : sentences) off.push_back(off.back() + s.size());
  return off;
}

std::size_t Document::mention_count() const {
  std::size_t n = 0;
  for (const auto& e : entities) n += e.mentions.size();
  return n;
}

std::vector<std::string> Document::flat_tokens() const {
  std::vector<std::string> out;
  for (const auto& s : sentences) out.insert(out.end(), s.begin(), s.end());
  return out;
}

RelationVocab::RelationVocab(std::vector<std::string> names) {
  for (auto& n : names) add(n);
}

int RelationVocab::id(const std::string& name) const {
  auto it = ids_.find(name);
  return it == ids_.end() ? -1 : it->second;
}

int RelationVocab::add(const std::string& name) {
  if (int existing = id(name); existing >= 0) return existing;
  const int id = static_cast<int>(names_.size());
  names_.push_back(name);
  ids_.emplace(name, id);
  return id;
}

std::uint64_t RelationVocab::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& n : names_) h = fnv1a(fnv1a(h, n), std::string(1, '\0'));
  return h;
}

void RelationVocab::save(const std::filesystem::path& path) const {
  json j = json::object();
  for (std::size_t i = 0; i < names_.size(); ++i) j[names_[i]] = i;
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

RelationVocab RelationVocab::load(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(path.string() + ": expected an object of name -> id");
  std::vector<std::pair<int, std::string>> items;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number_integer()) throw ParseError(path.string() + ": id of '" + it.key() + "'");
    items.emplace_back(it.value().get<int>(), it.key());
  }
  std::sort(items.begin(), items.end());
  RelationVocab v;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].first != static_cast<int>(i)) throw ParseError(path.string() + ": ids are not dense");
    v.add(items[i].second);
  }
  return v;
}

Corpus parse_corpus(const std::string& json_text, const RelationVocab* fixed) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("corpus is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw ParseError("corpus: top level must be an array of documents");

  Corpus corpus;
  if (fixed) {
    corpus.relations = *fixed;
  } else {
    // Sorted names make the derived vocabulary independent of document order.
    std::set<std::string> names;
    for (const auto& d : j) {
      if (!d.is_object()) continue;
      auto it = d.find("labels");
      if (it == d.end() || !it->is_array()) continue;
      for (const auto& l : *it) {
        if (l.is_object() && l.contains("r") && l["r"].is_string()) names.insert(l["r"].get<std::string>());
      }
    }
    corpus.relations = RelationVocab(std::vector<std::string>(names.begin(), names.end()));
  }
  for (std::size_t i = 0; i < j.size(); ++i) {
    corpus.docs.push_back(parse_document(j[i], i, corpus.relations, fixed == nullptr));
    validate_document(corpus.docs.back(), corpus.relations.size());
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, const RelationVocab* fixed) {
  return parse_corpus(read_file(path), fixed);
}

std::string serialize_corpus(const std::vector<Document>& docs, const RelationVocab& relations) {
  json arr = json::array();
  for (const auto& d : docs) {
    json dj;
    dj["title"] = d.doc_id;
    dj["sents"] = d.sentences;
    json vs = json::array();
    for (const auto& e : d.entities) {
      json ms = json::array();
      for (const auto& m : e.mentions) {
        ms.push_back({{"name", m.name}, {"sent_id", m.sent_id}, {"pos", {m.start, m.end}}, {"type", m.type}});
      }
      vs.push_back(std::move(ms));
    }
    dj["vertexSet"] = std::move(vs);
    json labels = json::array();
    for (const auto& f : d.facts) {
      labels.push_back({{"h", f.head}, {"t", f.tail}, {"r", relations.name(f.relation)}, {"evidence", f.evidence}});
    }
    dj["labels"] = std::move(labels);
    arr.push_back(std::move(dj));
  }
  return arr.dump();
}

void save_corpus(const std::filesystem::path& path, const std::vector<Document>& docs,
                 const RelationVocab& relations) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << serialize_corpus(docs, relations) << "\n";
}

void validate_document(const Document& doc, std::size_t relation_count) {
  auto fail = [&doc](const std::string& what) {
    throw ValidationError("document '" + doc.doc_id + "': " + what);
  };
  for (std::size_t e = 0; e < doc.entities.size(); ++e) {
    const auto& ent = doc.entities[e];
    const std::string ep = "entity " + std::to_string(e);
    if (ent.mentions.empty()) fail(ep + " has no mentions");
    for (std::size_t m = 0; m < ent.mentions.size(); ++m) {
      const auto& men = ent.mentions[m];
      const std::string mp = ep + " mention " + std::to_string(m);
      if (men.sent_id < 0 || static_cast<std::size_t>(men.sent_id) >= doc.sentences.size()) {
        fail(mp + ": sent_id " + std::to_string(men.sent_id) + " out of range");
      }
      const auto len = doc.sentences[static_cast<std::size_t>(men.sent_id)].size();
      if (men.start < 0 || men.start >= men.end) {
        fail(mp + ": span [" + std::to_string(men.start) + "," + std::to_string(men.end) + ") is empty or negative");
      }
      if (static_cast<std::size_t>(men.end) > len) {
        fail(mp + ": end " + std::to_string(men.end) + " exceeds sentence length " + std::to_string(len));
      }
    }
  }
  for (std::size_t k = 0; k < doc.facts.size(); ++k) {
    const auto& f = doc.facts[k];
    const std::string fp = "fact " + std::to_string(k);
    const int n = static_cast<int>(doc.entities.size());
    if (f.head < 0 || f.head >= n || f.tail < 0 || f.tail >= n) fail(fp + ": entity index out of range");
    if (f.head == f.tail) fail(fp + ": head equals tail");
    if (f.relation < 0 || static_cast<std::size_t>(f.relation) >= relation_count) fail(fp + ": unknown relation id");
    for (int s : f.evidence) {
      if (s < 0 || static_cast<std::size_t>(s) >= doc.sentences.size()) {
        fail(fp + ": evidence sentence " + std::to_string(s) + " out of range");
      }
    }
  }
}

std::map<std::string, ParseAnnotation> parse_parses(const std::string& text) {
  std::map<std::string, ParseAnnotation> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "parse sidecar line " + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("doc_id") || !j["doc_id"].is_string() || !j.contains("tokens") ||
        !j["tokens"].is_array()) {
      throw ParseError(where + ": expected {doc_id: string, tokens: array}");
    }
    ParseAnnotation ann;
    const auto& toks = j["tokens"];
    for (std::size_t i = 0; i < toks.size(); ++i) {
      const auto& t = toks[i];
      const std::string tp = where + ": tokens[" + std::to_string(i) + "]";
      if (!t.is_object()) throw ParseError(tp + ": expected an object");
      ParseToken pt;
      try {
        pt.pos = t.at("pos").get<std::string>();
        pt.dep = t.at("dep").get<std::string>();
        pt.head = t.at("head").get<int>();
        pt.lower = t.at("lower").get<std::string>();
      } catch (const json::exception& e) {
        throw ParseError(tp + ": " + e.what());
      }
      ann.tokens.push_back(std::move(pt));
    }
    out[j["doc_id"].get<std::string>()] = std::move(ann);
  }
  return out;
}

std::map<std::string, ParseAnnotation> load_parses(const std::filesystem::path& path) {
  return parse_parses(read_file(path));
}

std::string serialize_parses(const std::vector<Document>& docs) {
  std::string out;
  for (const auto& d : docs) {
    json toks = json::array();
    for (const auto& t : d.parse.tokens) {
      toks.push_back({{"pos", t.pos}, {"dep", t.dep}, {"head", t.head}, {"lower", t.lower}});
    }
    out += json{{"doc_id", d.doc_id}, {"tokens", std::move(toks)}}.dump();
    out += '\n';
  }
  return out;
}

void attach_parses(std::vector<Document>& docs, const std::map<std::string, ParseAnnotation>& parses) {
  for (auto& d : docs) {
    auto it = parses.find(d.doc_id);
    if (it == parses.end()) continue;
    const std::size_t n = d.token_count();
    if (it->second.tokens.size() != n) {
      throw ValidationError("document '" + d.doc_id + "': parse has " +
                            std::to_string(it->second.tokens.size()) + " tokens, document has " +
                            std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int h = it->second.tokens[i].head;
      if (h < 0 || static_cast<std::size_t>(h) >= n) {
        throw ValidationError("document '" + d.doc_id + "': parse token " + std::to_string(i) +
                              " has head " + std::to_string(h) + " out of range");
      }
    }
    d.parse = it->second;
  }
}

CorpusStats corpus_stats(const std::vector<Document>& docs, const std::vector<std::size_t>& anaphor_counts) {
  if (docs.empty()) throw ValidationError("corpus_stats: empty corpus");
  if (!anaphor_counts.empty() && anaphor_counts.size() != docs.size()) {
    throw ValidationError("corpus_stats: " + std::to_string(anaphor_counts.size()) +
                          " anaphor counts for " + std::to_string(docs.size()) + " documents");
  }
  CorpusStats s;
  s.docs = docs.size();
  for (std::size_t i = 0; i < docs.size(); ++i) {
    s.mentions += static_cast<double>(docs[i].mention_count());
    s.entities += static_cast<double>(docs[i].entities.size());
    s.triples += static_cast<double>(docs[i].facts.size());
    s.sentences += static_cast<double>(docs[i].sentences.size());
    if (!anaphor_counts.empty()) s.anaphors += static_cast<double>(anaphor_counts[i]);
  }
  const double n = static_cast<double>(s.docs);
  s.anaphors /= n;
  s.mentions /= n;
  s.entities /= n;
  s.triples /= n;
  s.sentences /= n;
  return s;
}

std::string format_stats_table(const std::vector<std::pair<std::string, CorpusStats>>& columns) {
  std::ostringstream os;
  os << std::left << std::setw(18) << "Split";
  for (const auto& [name, _] : columns) os << std::right << std::setw(12) << name;
  os << "\n";
  auto row = [&](const char* label, auto get, bool integral) {
    os << std::left << std::setw(18) << label;
    for (const auto& [_, st] : columns) {
      os << std::right << std::setw(12);
      if (integral) {
        os << static_cast<std::size_t>(get(st));
      } else {
        os << std::fixed << std::setprecision(1) << get(st);
      }
    }
    os << "\n";
  };
  row("#Docs", [](const CorpusStats& s) { return static_cast<double>(s.docs); }, true);
  row("Avg. #Anaphors", [](const CorpusStats& s) { return s.anaphors; }, false);
  row("Avg. #Mentions", [](const CorpusStats& s) { return s.mentions; }, false);
  row("Avg. #Entities", [](const CorpusStats& s) { return s.entities; }, false);
  row("Avg. #Triples", [](const CorpusStats& s) { return s.triples; }, false);
  row("Avg. #Sentences", [](const CorpusStats& s) { return s.sentences; }, false);
  return os.str();
}

std::size_t MarkedDocument::marker_count() const {
  return static_cast<std::size_t>(std::count(is_marker.begin(), is_marker.end(), true));
}

MarkedDocument mark_entities(const Document& doc) {
  struct Event {
    std::size_t pos;  // flattened token position the marker precedes
    bool opening;
    int start, width;
    std::size_t entity, mention;
  };
  const auto offsets = doc.sentence_offsets();
  std::vector<Event> events;
  for (std::size_t e = 0; e < doc.entities.size(); ++e) {
    for (std::size_t m = 0; m < doc.entities[e].mentions.size(); ++m) {
      const auto& men = doc.entities[e].mentions[m];
      const std::size_t base = offsets[static_cast<std::size_t>(men.sent_id)];
      const int s = static_cast<int>(base) + men.start;
      events.push_back({base + static_cast<std::size_t>(men.start), true, s, men.width(), e, m});
      events.push_back({base + static_cast<std::size_t>(men.end), false, s, men.width(), e, m});
    }
  }
  // At a boundary closers precede openers. Openers go outer-first (longer span
  // first); closers mirror that, so the innermost span closes first.
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.pos != b.pos) return a.pos < b.pos;
    if (a.opening != b.opening) return !a.opening;
    if (a.opening) {
      return std::tie(b.width, a.entity, a.mention) < std::tie(a.width, b.entity, b.mention);
    }
    return std::tie(b.start, a.width, b.entity, b.mention) < std::tie(a.start, b.width, a.entity, a.mention);
  });

  MarkedDocument out;
  out.mention_start.resize(doc.entities.size());
  out.mention_end.resize(doc.entities.size());
  for (std::size_t e = 0; e < doc.entities.size(); ++e) {
    out.mention_start[e].assign(doc.entities[e].mentions.size(), 0);
    out.mention_end[e].assign(doc.entities[e].mentions.size(), 0);
  }
  const auto flat = doc.flat_tokens();
  out.original_to_marked.assign(flat.size(), 0);
  std::vector<std::size_t> owner_sentence;  // sentence of each marked position
  std::vector<std::size_t> sent_of_token(flat.size());
  for (std::size_t s = 0; s + 1 < offsets.size(); ++s)
    for (std::size_t t = offsets[s]; t < offsets[s + 1]; ++t) sent_of_token[t] = s;

  std::size_t ev = 0;
  for (std::size_t t = 0; t <= flat.size(); ++t) {
    while (ev < events.size() && events[ev].pos == t) {
      const Event& x = events[ev++];
      const std::size_t idx = out.tokens.size();
      (x.opening ? out.mention_start : out.mention_end)[x.entity][x.mention] = idx;
      out.tokens.emplace_back();
      out.is_marker.push_back(true);
      out.marked_to_original.push_back(-1);
      owner_sentence.push_back(static_cast<std::size_t>(doc.entities[x.entity].mentions[x.mention].sent_id));
    }
    if (t == flat.size()) break;
    out.original_to_marked[t] = out.tokens.size();
    out.tokens.push_back(flat[t]);
    out.is_marker.push_back(false);
    out.marked_to_original.push_back(static_cast<std::ptrdiff_t>(t));
    owner_sentence.push_back(sent_of_token[t]);
  }

  out.sentence_spans.assign(doc.sentences.size(), {0, 0});
  std::size_t pos = 0;
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const std::size_t begin = pos;
    while (pos < owner_sentence.size() && owner_sentence[pos] == s) ++pos;
    out.sentence_spans[s] = {begin, pos};
  }
  return out;
}

Vocabulary::Vocabulary() : tokens_{"<pad>", "<unk>", "<mark>"} {}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  Vocabulary v;
  for (auto& t : tokens) {
    if (v.ids_.count(t) || t == "<pad>" || t == "<unk>" || t == "<mark>") continue;
    v.tokens_.push_back(std::move(t));
  }
  for (std::size_t i = 3; i < v.tokens_.size(); ++i) v.ids_.emplace(v.tokens_[i], static_cast<int>(i));
  return v;
}

Vocabulary Vocabulary::build(const std::vector<Document>& docs, std::size_t min_count) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& d : docs)
    for (const auto& s : d.sentences)
      for (const auto& t : s) ++counts[t];
  std::vector<std::pair<std::string, std::size_t>> items(counts.begin(), counts.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> kept;
  for (auto& [tok, c] : items)
    if (c >= min_count) kept.push_back(tok);
  return from_tokens(std::move(kept));
}

int Vocabulary::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::encode(const MarkedDocument& marked) const {
  std::vector<int> ids(marked.size());
  for (std::size_t i = 0; i < marked.size(); ++i) ids[i] = marked.is_marker[i] ? kMarker : id(marked.tokens[i]);
  return ids;
}

}  // namespace aadocre
