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

// Synthetic documents with hand-style parse annotations: the worked
// "Walmart" example, random documents for structural oracles, and small
// relation corpora for training experiments.

#ifndef AADOCRE_SYNTHETIC_HPP_
#define AADOCRE_SYNTHETIC_HPP_

#include <cstdint>
#include <random>
#include <string>

#include "aadocre/corpus.hpp"

namespace aadocre::synthetic {

// "There is a Walmart next to Tom 's house . He works at the market ."
// with mentions Walmart and Tom and a hand-written parse.
Document walmart_example();

struct RandomDocLimits {
  int max_entities = 8;
  int max_mentions = 20;
  int max_anaphor_triggers = 6;  // PRON tokens plus det-"the" tokens
  int max_sentences = 5;
};

// Random tokens, random non-overlapping mentions and a random parse whose
// PRON and det-"the" tokens never touch a mention.
Document random_document(std::mt19937_64& rng, const RandomDocLimits& limits = {});

struct CorpusOptions {
  int docs = 32;
  int relations = 5;
  std::uint64_t seed = 1;
  std::string prefix = "synth";
  int bridge_gap = 0;  // bridge corpus: minimum modifier tokens between the pronoun and the relation cue
};

// Relation corpus over a ~200-word vocabulary. Facts are stated either inside
// one sentence ("A founded B .") or across two, through a pronoun
// ("A visited the river . He founded B ."); evidence lists the stating sentences.
Corpus relation_corpus(const CorpusOptions& options);

// Every fact is stated only across sentences through a pronoun whose
// referent is fixed by gender agreement among several candidates. With a
// positive bridge_gap the pronoun is separated from the cue by a modifier:
// "He , after a quiet walk near the old mill , founded Arden ."
Corpus bridge_corpus(const CorpusOptions& options);

}  // namespace aadocre::synthetic

#endif  // AADOCRE_SYNTHETIC_HPP_
