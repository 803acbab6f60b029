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

#include "aadocre/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <string_view>
#include <tuple>

#include "aadocre/seeds.hpp"

namespace aadocre::synthetic {
namespace {

constexpr std::array<std::string_view, 20> kMale = {
    "Adam", "Boris", "Carl", "Dmitri", "Edgar", "Felix", "Gustav", "Henrik", "Igor", "Jonas",
    "Karl", "Lucas", "Marco", "Nils", "Oscar", "Pavel", "Quentin", "Rafael", "Stefan", "Tobias"};
constexpr std::array<std::string_view, 20> kFemale = {
    "Alice", "Beatrix", "Clara", "Diana", "Elena", "Fiona", "Greta", "Helga", "Irene", "Julia",
    "Karen", "Laura", "Maria", "Nina", "Olga", "Paula", "Rosa", "Sofia", "Tanja", "Ursula"};
constexpr std::array<std::string_view, 20> kOrg = {
    "Acme", "Borealis", "Cygnus", "Dynacorp", "Equinox", "Fulcrum", "Globex", "Helix", "Initech", "Juniper",
    "Kestrel", "Lumina", "Meridian", "Nimbus", "Orion", "Pinnacle", "Quasar", "Redwood", "Solstice", "Tundra"};
constexpr std::array<std::string_view, 20> kPlace = {
    "Arden", "Bristow", "Calder", "Dunmore", "Elmira", "Fenwick", "Galway", "Harlow", "Ivesdale", "Jarrow",
    "Kilmore", "Lindell", "Marlow", "Norwich", "Oakham", "Penrith", "Quarry", "Rosslyn", "Selby", "Thirsk"};
constexpr std::array<std::string_view, 40> kNouns = {
    "market", "river", "book", "garden", "bridge", "letter", "station", "harbor", "tower", "village",
    "museum", "school", "factory", "forest", "island", "castle", "theater", "library", "bakery", "chapel",
    "meadow", "valley", "canal", "engine", "ledger", "painting", "festival", "journal", "quarry", "mill",
    "orchard", "estate", "archive", "gallery", "studio", "vessel", "courtyard", "pavilion", "workshop", "lantern"};
constexpr std::array<std::string_view, 30> kVerbs = {
    "saw", "painted", "praised", "left", "crossed", "studied", "cleaned", "sold", "described", "repaired",
    "photographed", "measured", "mapped", "ignored", "admired", "opened", "closed", "guarded", "rebuilt", "inspected",
    "explored", "reviewed", "watched", "found", "sketched", "mentioned", "rented", "borrowed", "carried", "noticed"};
constexpr std::array<std::string_view, 20> kAdjectives = {
    "old", "quiet", "large", "narrow", "bright", "famous", "ancient", "modern", "small", "green",
    "busy", "remote", "grand", "humble", "windy", "stone", "wooden", "crowded", "hidden", "northern"};
// Two surface cues per relation.
constexpr std::array<std::array<std::string_view, 2>, 8> kCues = {{
    {"founded", "established"},
    {"married", "wed"},
    {"visited", "toured"},
    {"leads", "manages"},
    {"owns", "bought"},
    {"advises", "counsels"},
    {"funds", "sponsors"},
    {"joined", "entered"},
}};

enum class Gender { kMale, kFemale, kNeuter };

std::string pronoun(Gender g, bool capital) {
  std::string p = g == Gender::kMale ? "he" : g == Gender::kFemale ? "she" : "it";
  if (capital) p[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(p[0])));
  return p;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

template <std::size_t N>
std::string pick(std::mt19937_64& rng, const std::array<std::string_view, N>& words) {
  std::uniform_int_distribution<std::size_t> d(0, N - 1);
  return std::string(words[d(rng)]);
}

int uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Accumulates tagged sentences, mentions and facts into a Document.
class DocBuilder {
 public:
  explicit DocBuilder(std::string id) { doc_.doc_id = std::move(id); }

  int begin_sentence() {
    doc_.sentences.emplace_back();
    heads_.emplace_back();
    return static_cast<int>(doc_.sentences.size()) - 1;
  }

  // Appends a token to the current sentence; head is a local index, -1 for self.
  int token(const std::string& text, const char* pos, const char* dep, int head = -1) {
    auto& sent = doc_.sentences.back();
    const int idx = static_cast<int>(sent.size());
    sent.push_back(text);
    tags_.push_back({pos, dep, 0, lower(text)});
    heads_.back().push_back(head < 0 ? idx : head);
    return idx;
  }

  void set_head(int local, int head) { heads_.back()[static_cast<std::size_t>(local)] = head; }

  int entity(const std::string& type) {
    Entity e;
    e.entity_id = static_cast<int>(doc_.entities.size());
    e.type = type;
    doc_.entities.push_back(e);
    return e.entity_id;
  }

  void mention(int entity, int start, int end) {
    const int sent = static_cast<int>(doc_.sentences.size()) - 1;
    const auto& toks = doc_.sentences.back();
    std::string surface;
    for (int i = start; i < end; ++i) surface += (i > start ? " " : "") + toks[static_cast<std::size_t>(i)];
    auto& e = doc_.entities[static_cast<std::size_t>(entity)];
    e.mentions.push_back({sent, start, end, surface, surface, e.type});
  }

  void fact(int head, int tail, int relation, std::vector<int> evidence) {
    for (const auto& f : doc_.facts)
      if (f.head == head && f.tail == tail && f.relation == relation) return;
    std::sort(evidence.begin(), evidence.end());
    evidence.erase(std::unique(evidence.begin(), evidence.end()), evidence.end());
    doc_.facts.push_back({head, tail, relation, std::move(evidence)});
  }

  Document build() {
    std::size_t flat = 0, base = 0;
    for (std::size_t s = 0; s < heads_.size(); ++s) {
      for (std::size_t i = 0; i < heads_[s].size(); ++i) tags_[flat++].head = static_cast<int>(base) + heads_[s][i];
      base += heads_[s].size();
    }
    doc_.parse.tokens = tags_;
    for (auto& e : doc_.entities) {
      std::stable_sort(e.mentions.begin(), e.mentions.end(), [](const Mention& a, const Mention& b) {
        return std::tie(a.sent_id, a.start) < std::tie(b.sent_id, b.start);
      });
    }
    return doc_;
  }

 private:
  Document doc_;
  std::vector<ParseToken> tags_;
  std::vector<std::vector<int>> heads_;
};

struct Ent {
  int id;
  std::string name;
  Gender gender;
};

// "<X> <verb> the <noun> ."
int intro_sentence(DocBuilder& b, std::mt19937_64& rng, const Ent& x) {
  const int s = b.begin_sentence();
  const int n = b.token(x.name, "PROPN", "nsubj", 1);
  b.token(pick(rng, kVerbs), "VERB", "ROOT");
  b.token("the", "DET", "det", 3);
  b.token(pick(rng, kNouns), "NOUN", "dobj", 1);
  b.token(".", "PUNCT", "punct", 1);
  b.mention(x.id, n, n + 1);
  return s;
}

// "<X> and <Z> <verb> the <noun> ."
int pair_intro_sentence(DocBuilder& b, std::mt19937_64& rng, const Ent& x, const Ent& z) {
  const int s = b.begin_sentence();
  b.token(x.name, "PROPN", "nsubj", 3);
  b.token("and", "CCONJ", "cc", 0);
  b.token(z.name, "PROPN", "conj", 0);
  b.token(pick(rng, kVerbs), "VERB", "ROOT");
  b.token("the", "DET", "det", 5);
  b.token(pick(rng, kNouns), "NOUN", "dobj", 3);
  b.token(".", "PUNCT", "punct", 3);
  b.mention(x.id, 0, 1);
  b.mention(z.id, 2, 3);
  return s;
}

// "<A> <cue> <B> ."
int relation_sentence(DocBuilder& b, std::mt19937_64& rng, const Ent& a, int relation, const Ent& t) {
  const int s = b.begin_sentence();
  b.token(a.name, "PROPN", "nsubj", 1);
  b.token(std::string(kCues[static_cast<std::size_t>(relation)][static_cast<std::size_t>(uniform(rng, 0, 1))]),
          "VERB", "ROOT");
  b.token(t.name, "PROPN", "dobj", 1);
  b.token(".", "PUNCT", "punct", 1);
  b.mention(a.id, 0, 1);
  b.mention(t.id, 2, 3);
  return s;
}

// "<Pronoun> <cue> <B> ."
int pronoun_relation_sentence(DocBuilder& b, std::mt19937_64& rng, Gender g, int relation, const Ent& t) {
  const int s = b.begin_sentence();
  b.token(pronoun(g, true), "PRON", "nsubj", 1);
  b.token(std::string(kCues[static_cast<std::size_t>(relation)][static_cast<std::size_t>(uniform(rng, 0, 1))]),
          "VERB", "ROOT");
  b.token(t.name, "PROPN", "dobj", 1);
  b.token(".", "PUNCT", "punct", 1);
  b.mention(t.id, 2, 3);
  return s;
}

// "<Pron> , after a <adj> <noun> near the <adj> <noun> ... , <cue> <T> ." with at least `gap` modifier tokens.
int distant_pronoun_sentence(DocBuilder& b, std::mt19937_64& rng, Gender g, int relation, const Ent& t, int gap) {
  const int s = b.begin_sentence();
  b.token(pronoun(g, true), "PRON", "nsubj");
  b.token(",", "PUNCT", "punct");
  const int after = b.token("after", "ADP", "prep");
  auto chunk = [&](int prep, const char* det) {
    b.token(det, "DET", "det", prep + 3);
    b.token(pick(rng, kAdjectives), "ADJ", "amod", prep + 3);
    return b.token(pick(rng, kNouns), "NOUN", "pobj", prep);
  };
  int last = chunk(after, "a");
  while (last < gap) last = chunk(b.token("near", "ADP", "prep", last), uniform(rng, 0, 1) ? "the" : "a");
  const int comma = b.token(",", "PUNCT", "punct");
  const int verb = b.token(std::string(kCues[static_cast<std::size_t>(relation)][static_cast<std::size_t>(uniform(rng, 0, 1))]),
                           "VERB", "ROOT");
  const int obj = b.token(t.name, "PROPN", "dobj", verb);
  b.token(".", "PUNCT", "punct", verb);
  for (int i : {0, 1, after, comma}) b.set_head(i, verb);
  b.mention(t.id, obj, obj + 1);
  return s;
}

// "The <adj> <noun> <verb> near the <noun> ."
int filler_sentence(DocBuilder& b, std::mt19937_64& rng) {
  const int s = b.begin_sentence();
  b.token("The", "DET", "det", 2);
  b.token(pick(rng, kAdjectives), "ADJ", "amod", 2);
  b.token(pick(rng, kNouns), "NOUN", "nsubj", 3);
  b.token(pick(rng, kVerbs), "VERB", "ROOT");
  b.token("near", "ADP", "prep", 3);
  b.token("the", "DET", "det", 6);
  b.token(pick(rng, kNouns), "NOUN", "pobj", 4);
  b.token(".", "PUNCT", "punct", 3);
  return s;
}

// "<X> <verb> a <adj> <noun> ."
int mention_sentence(DocBuilder& b, std::mt19937_64& rng, const Ent& x) {
  const int s = b.begin_sentence();
  b.token(x.name, "PROPN", "nsubj", 1);
  b.token(pick(rng, kVerbs), "VERB", "ROOT");
  b.token("a", "DET", "det", 4);
  b.token(pick(rng, kAdjectives), "ADJ", "amod", 4);
  b.token(pick(rng, kNouns), "NOUN", "dobj", 1);
  b.token(".", "PUNCT", "punct", 1);
  b.mention(x.id, 0, 1);
  return s;
}

// Draws distinct names; person/org names carry the pronoun gender.
class NamePool {
 public:
  explicit NamePool(std::mt19937_64& rng) : rng_(rng) {}

  Ent draw(DocBuilder& b, Gender g) {
    const auto& pool = g == Gender::kMale ? kMale : g == Gender::kFemale ? kFemale : kOrg;
    const char* type = g == Gender::kNeuter ? "ORG" : "PER";
    std::string name;
    do name = pick(rng_, pool);
    while (!used_.insert(name).second);
    return {b.entity(type), name, g};
  }

  Ent place(DocBuilder& b) {
    std::string name;
    do name = pick(rng_, kPlace);
    while (!used_.insert(name).second);
    return {b.entity("LOC"), name, Gender::kNeuter};
  }

 private:
  std::mt19937_64& rng_;
  std::set<std::string> used_;
};

Gender random_gender(std::mt19937_64& rng) { return static_cast<Gender>(uniform(rng, 0, 2)); }

RelationVocab relation_vocab(int relations) {
  std::vector<std::string> names;
  for (int r = 0; r < relations; ++r) names.push_back("R" + std::to_string(r));
  return RelationVocab(names);
}

}  // namespace

Document walmart_example() {
  DocBuilder b("walmart");
  const int walmart = b.entity("ORG");
  const int tom = b.entity("PER");
  b.begin_sentence();
  b.token("There", "ADV", "expl", 1);
  b.token("is", "AUX", "ROOT");
  b.token("a", "DET", "det", 3);
  b.token("Walmart", "PROPN", "attr", 1);
  b.token("next", "ADV", "advmod", 1);
  b.token("to", "ADP", "prep", 4);
  b.token("Tom", "PROPN", "poss", 8);
  b.token("'s", "PART", "case", 6);
  b.token("house", "NOUN", "pobj", 5);
  b.token(".", "PUNCT", "punct", 1);
  b.mention(walmart, 3, 4);
  b.mention(tom, 6, 7);
  b.begin_sentence();
  b.token("He", "PRON", "nsubj", 1);
  b.token("works", "VERB", "ROOT");
  b.token("at", "ADP", "prep", 1);
  b.token("the", "DET", "det", 4);
  b.token("market", "NOUN", "pobj", 2);
  b.token(".", "PUNCT", "punct", 1);
  return b.build();
}

Document random_document(std::mt19937_64& rng, const RandomDocLimits& limits) {
  static const std::array<std::string_view, 12> kWords = {"alpha", "beta", "gamma", "delta", "eps", "zeta",
                                                         "eta",   "theta", "iota", "kappa", "lam", "mu"};
  static const std::array<const char*, 5> kPos = {"NOUN", "VERB", "ADJ", "ADP", "PUNCT"};
  static const std::array<const char*, 5> kDep = {"nsubj", "dobj", "amod", "prep", "punct"};

  DocBuilder b("rand" + std::to_string(rng() % 1000000));
  const int n_sent = uniform(rng, 1, limits.max_sentences);
  const int n_ent = uniform(rng, 1, limits.max_entities);
  const int n_men = uniform(rng, n_ent, std::max(n_ent, limits.max_mentions));
  const int n_trig = uniform(rng, 0, limits.max_anaphor_triggers);

  // Sentence lengths large enough to host every mention (width <= 3) and trigger.
  const int per_sent = (n_men * 3 + n_trig) / n_sent + 4;
  std::vector<int> lens(static_cast<std::size_t>(n_sent));
  for (auto& l : lens) l = uniform(rng, per_sent, per_sent + 4);

  std::vector<std::vector<int>> owner(lens.size());  // -1 free, -2 trigger, else mention slot
  for (std::size_t s = 0; s < lens.size(); ++s) owner[s].assign(static_cast<std::size_t>(lens[s]), -1);

  struct Slot { int sent, start, end; };
  std::vector<Slot> slots;
  while (static_cast<int>(slots.size()) < n_men) {
    const int s = uniform(rng, 0, n_sent - 1);
    const int w = uniform(rng, 1, 3);
    const int st = uniform(rng, 0, lens[static_cast<std::size_t>(s)] - w);
    bool free = true;
    for (int i = st; i < st + w; ++i) free = free && owner[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)] == -1;
    if (!free) continue;
    for (int i = st; i < st + w; ++i) owner[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)] = static_cast<int>(slots.size());
    slots.push_back({s, st, st + w});
  }
  std::vector<std::pair<int, int>> triggers;
  while (static_cast<int>(triggers.size()) < n_trig) {
    const int s = uniform(rng, 0, n_sent - 1);
    const int i = uniform(rng, 0, lens[static_cast<std::size_t>(s)] - 1);
    auto& o = owner[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)];
    if (o != -1) continue;
    o = -2;
    triggers.emplace_back(s, i);
  }

  std::vector<int> ents;
  for (int e = 0; e < n_ent; ++e) ents.push_back(b.entity("T" + std::to_string(e % 3)));
  // Every entity gets at least one mention slot.
  std::vector<int> slot_entity(slots.size());
  for (std::size_t k = 0; k < slots.size(); ++k)
    slot_entity[k] = k < ents.size() ? static_cast<int>(k) : uniform(rng, 0, n_ent - 1);
  std::shuffle(slot_entity.begin(), slot_entity.end(), rng);

  for (std::size_t s = 0; s < lens.size(); ++s) {
    b.begin_sentence();
    const int len = lens[s];
    for (int i = 0; i < len; ++i) {
      const int o = owner[s][static_cast<std::size_t>(i)];
      if (o == -2) {
        if (uniform(rng, 0, 1) == 0) {
          b.token(uniform(rng, 0, 1) ? "it" : "They", "PRON", "nsubj", uniform(rng, 0, len - 1));
        } else {
          // Head anywhere in the sentence: forward heads form spans, backward ones are skipped.
          b.token(uniform(rng, 0, 1) ? "the" : "The", "DET", "det", uniform(rng, 0, len - 1));
        }
      } else {
        b.token(pick(rng, kWords), kPos[static_cast<std::size_t>(uniform(rng, 0, 4))],
                kDep[static_cast<std::size_t>(uniform(rng, 0, 4))], uniform(rng, 0, len - 1));
      }
    }
    for (std::size_t k = 0; k < slots.size(); ++k)
      if (slots[k].sent == static_cast<int>(s)) b.mention(slot_entity[k], slots[k].start, slots[k].end);
  }
  return b.build();
}

Corpus relation_corpus(const CorpusOptions& options) {
  Corpus corpus;
  corpus.relations = relation_vocab(options.relations);
  for (int d = 0; d < options.docs; ++d) {
    auto rng = stream(options.seed, options.prefix + "/doc-" + std::to_string(d));
    DocBuilder b(options.prefix + "-" + std::to_string(d));
    NamePool names(rng);
    std::vector<Ent> ents;
    const int n_ent = uniform(rng, 3, 5);
    for (int e = 0; e < n_ent; ++e) ents.push_back(uniform(rng, 0, 3) == 0 ? names.place(b) : names.draw(b, random_gender(rng)));

    const int n_facts = uniform(rng, 1, 3);
    std::set<std::pair<int, int>> used_pairs;
    for (int f = 0; f < n_facts; ++f) {
      if (uniform(rng, 0, 2) == 0) filler_sentence(b, rng);
      const int hi = uniform(rng, 0, n_ent - 1);
      const int ti = (hi + uniform(rng, 1, n_ent - 1)) % n_ent;
      const Ent& h = ents[static_cast<std::size_t>(hi)];
      const Ent& t = ents[static_cast<std::size_t>(ti)];
      if (!used_pairs.insert({h.id, t.id}).second) continue;
      const int r = uniform(rng, 0, options.relations - 1);
      if (uniform(rng, 0, 1) == 0) {
        const int s = relation_sentence(b, rng, h, r, t);
        b.fact(h.id, t.id, r, {s});
      } else {
        const int s0 = intro_sentence(b, rng, h);
        const int s1 = pronoun_relation_sentence(b, rng, h.gender, r, t);
        b.fact(h.id, t.id, r, {s0, s1});
      }
    }
    // Entities not yet mentioned get a plain sentence; some get a second mention.
    Document probe = b.build();
    for (const auto& e : ents) {
      const bool unseen = probe.entities[static_cast<std::size_t>(e.id)].mentions.empty();
      if (unseen || uniform(rng, 0, 3) == 0) mention_sentence(b, rng, e);
    }
    if (uniform(rng, 0, 1) == 0) filler_sentence(b, rng);
    corpus.docs.push_back(b.build());
  }
  return corpus;
}

Corpus bridge_corpus(const CorpusOptions& options) {
  Corpus corpus;
  corpus.relations = relation_vocab(options.relations);
  for (int d = 0; d < options.docs; ++d) {
    auto rng = stream(options.seed, options.prefix + "/bridge-" + std::to_string(d));
    DocBuilder b(options.prefix + "-" + std::to_string(d));
    NamePool names(rng);
    const int blocks = uniform(rng, 2, 3);
    for (int k = 0; k < blocks; ++k) {
      if (uniform(rng, 0, 2) == 0) filler_sentence(b, rng);
      // Referent and distractor differ in gender, so the pronoun picks one.
      const Gender g = random_gender(rng);
      Gender other = random_gender(rng);
      while (other == g) other = random_gender(rng);
      const Ent x = names.draw(b, g);
      const Ent z = names.draw(b, other);
      const Ent y = names.place(b);
      const int r = uniform(rng, 0, options.relations - 1);
      const int s0 = uniform(rng, 0, 1) ? pair_intro_sentence(b, rng, x, z) : pair_intro_sentence(b, rng, z, x);
      const int s1 = options.bridge_gap > 0 ? distant_pronoun_sentence(b, rng, g, r, y, options.bridge_gap)
                                            : pronoun_relation_sentence(b, rng, g, r, y);
      b.fact(x.id, y.id, r, {s0, s1});
    }
    corpus.docs.push_back(b.build());
  }
  return corpus;
}

}  // namespace aadocre::synthetic
