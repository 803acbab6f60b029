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

// DocRED-format corpora, offline parse sidecars, entity marking and
// vocabularies.

#ifndef AADOCRE_CORPUS_HPP_
#define AADOCRE_CORPUS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace aadocre {

struct Mention {
  int sent_id = 0;
  int start = 0;  // token offset within the sentence
  int end = 0;    // exclusive
  std::string surface;  // joined span tokens
  std::string name;     // the dataset's "name" field, kept for round-trips and Ign-F1
  std::string type;

  int width() const { return end - start; }
};

struct Entity {
  int entity_id = 0;
  std::vector<Mention> mentions;  // sorted by (sent_id, start)
  std::string type;
};

struct RelationFact {
  int head = 0;
  int tail = 0;
  int relation = 0;           // dense id into the relation vocabulary
  std::vector<int> evidence;  // sorted, unique sentence ids
};

struct ParseToken {
  std::string pos;
  std::string dep;
  int head = 0;  // flattened document index of the syntactic head
  std::string lower;
};

// One record per token in flattened document order.
struct ParseAnnotation {
  std::vector<ParseToken> tokens;
  bool empty() const { return tokens.empty(); }
};

struct Document {
  std::string doc_id;
  std::vector<std::vector<std::string>> sentences;
  std::vector<Entity> entities;
  std::vector<RelationFact> facts;
  ParseAnnotation parse;

  std::size_t token_count() const;
  // Flattened start offset of each sentence plus a final total.
  std::vector<std::size_t> sentence_offsets() const;
  std::size_t mention_count() const;
  std::vector<std::string> flat_tokens() const;
};

// Corpus-derived relation names with dense ids. NA is never stored.
class RelationVocab {
 public:
  RelationVocab() = default;
  explicit RelationVocab(std::vector<std::string> names);

  int id(const std::string& name) const;  // -1 when unknown
  int add(const std::string& name);
  const std::string& name(int id) const { return names_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  // FNV-1a over the names in id order.
  std::uint64_t hash() const;

  void save(const std::filesystem::path& path) const;
  static RelationVocab load(const std::filesystem::path& path);

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> ids_;
};

struct Corpus {
  std::vector<Document> docs;
  RelationVocab relations;
};

// Parses and validates a DocRED JSON file. With `fixed`, relations are mapped
// through that vocabulary and unknown names are validation errors; otherwise
// a vocabulary is derived from the file (names sorted).
Corpus load_corpus(const std::filesystem::path& path, const RelationVocab* fixed = nullptr);
Corpus parse_corpus(const std::string& json_text, const RelationVocab* fixed = nullptr);
std::string serialize_corpus(const std::vector<Document>& docs, const RelationVocab& relations);
void save_corpus(const std::filesystem::path& path, const std::vector<Document>& docs,
                 const RelationVocab& relations);

// Throws ValidationError naming the document and the violated invariant.
void validate_document(const Document& doc, std::size_t relation_count);

// Parse sidecar: line-delimited JSON {doc_id, tokens: [{pos, dep, head, lower}]}.
std::map<std::string, ParseAnnotation> load_parses(const std::filesystem::path& path);
std::map<std::string, ParseAnnotation> parse_parses(const std::string& text);
std::string serialize_parses(const std::vector<Document>& docs);
// Attaches sidecar records by doc_id; documents without a record keep an empty parse.
// Length or head-range mismatches are validation errors.
void attach_parses(std::vector<Document>& docs, const std::map<std::string, ParseAnnotation>& parses);

struct CorpusStats {
  std::size_t docs = 0;
  double anaphors = 0.0;
  double mentions = 0.0;
  double entities = 0.0;
  double triples = 0.0;
  double sentences = 0.0;
};

// `anaphor_counts` holds one count per document, or is empty (treated as zeros).
CorpusStats corpus_stats(const std::vector<Document>& docs,
                         const std::vector<std::size_t>& anaphor_counts = {});
// Plain-text table, one column per named split.
std::string format_stats_table(const std::vector<std::pair<std::string, CorpusStats>>& columns);

// Token sequence with a distinct marker symbol before and after every mention.
struct MarkedDocument {
  std::vector<std::string> tokens;  // marker positions hold an empty string
  std::vector<bool> is_marker;
  // [entity][mention] -> index of the opening / closing marker
  std::vector<std::vector<std::size_t>> mention_start;
  std::vector<std::vector<std::size_t>> mention_end;
  std::vector<std::size_t> original_to_marked;   // per flattened original token
  std::vector<std::ptrdiff_t> marked_to_original;  // -1 at markers
  // Half-open marked-coordinate span per sentence; markers belong to their
  // mention's sentence so the spans partition [0, size()).
  std::vector<std::pair<std::size_t, std::size_t>> sentence_spans;

  std::size_t size() const { return tokens.size(); }
  std::size_t marker_count() const;
};

MarkedDocument mark_entities(const Document& doc);

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kMarker = 2;

  Vocabulary();
  // Frequency-descending, then lexicographic; tokens below min_count map to unknown.
  static Vocabulary build(const std::vector<Document>& docs, std::size_t min_count = 1);

  int id(const std::string& token) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::vector<int> encode(const MarkedDocument& marked) const;

  static Vocabulary from_tokens(std::vector<std::string> tokens);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace aadocre

#endif  // AADOCRE_CORPUS_HPP_
