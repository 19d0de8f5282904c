// actset/grammar.h

// Copyright 2026  The actset Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ACTSET_GRAMMAR_H_
#define ACTSET_GRAMMAR_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actset/corpus.h"

namespace actset {

struct GrammarArc {
  int32_t from;
  ClassId label;
  int32_t to;
  bool operator==(const GrammarArc &o) const {
    return from == o.from && label == o.label && to == o.to;
  }
};

/// Nondeterministic finite label automaton. A label sequence is admissible
/// iff some path from the start state spelling it ends in an accepting
/// state. Every sequence it accepts is equally likely a priori.
///
/// On construction the automaton is trimmed: states that are unreachable
/// from the start, or from which no accepting state can be reached, are
/// removed (the start state is always kept). States are renumbered in
/// their original relative order and arcs sorted by (from, label, to), so
/// equal inputs give equal automata.
class GrammarAutomaton {
 public:
  GrammarAutomaton() = default;
  GrammarAutomaton(int32_t num_states, int32_t start,
                   std::vector<GrammarArc> arcs, std::vector<bool> accepting);

  int32_t NumStates() const { return static_cast<int32_t>(accepting_.size()); }
  int32_t Start() const { return start_; }
  bool IsAccepting(int32_t s) const { return accepting_[s]; }
  const std::vector<GrammarArc> &Arcs() const { return arcs_; }
  std::span<const GrammarArc> ArcsFrom(int32_t s) const;

  /// True if no accepting state can be reached (the empty language, or
  /// only the empty sequence).
  bool AcceptsNothing() const;
  /// Labels on any arc.
  ActionSet Alphabet() const;
  /// True if the accepted language is finite (no cycle survives trimming).
  bool IsFinite() const;

  bool Accepts(const LabelSequence &seq) const;

  /// All accepted non-empty sequences of length <= max_length, in
  /// shortlex order. Stops and returns nullopt once more than `limit`
  /// sequences are found.
  std::optional<std::vector<LabelSequence>> Enumerate(int64_t max_length,
                                                      size_t limit) const;

  bool operator==(const GrammarAutomaton &o) const {
    return start_ == o.start_ && arcs_ == o.arcs_ && accepting_ == o.accepting_;
  }

 private:
  int32_t start_ = 0;
  std::vector<GrammarArc> arcs_;
  std::vector<size_t> arc_begin_;  // CSR offsets into arcs_, size states+1
  std::vector<bool> accepting_;
};

/// Union over training videos of the Kleene closure of each action set:
/// a start state plus one self-looping accepting state per distinct set.
GrammarAutomaton BuildNaive(const Corpus &corpus);

/// Prefix tree over the deduplicated sequences; the node ending each
/// sequence is accepting.
GrammarAutomaton CompilePrefixTree(std::vector<LabelSequence> sequences);

/// A* for the given alphabet: one accepting state looping on every label.
GrammarAutomaton FreeAutomaton(const ActionSet &allowed);

/// G intersected with allowed*. Returns nullopt when no non-empty sequence
/// survives; callers then fall back to FreeAutomaton(allowed).
std::optional<GrammarAutomaton> RestrictToSet(const GrammarAutomaton &g,
                                              const ActionSet &allowed);

// ---- Sampled grammars ----------------------------------------------------

struct SampledSequence {
  LabelSequence labels;
  size_t video_index;  // source training video
};

struct SampledGrammar {
  GrammarAutomaton automaton;
  std::vector<SampledSequence> samples;  // in draw order, not deduplicated
};

/// Word co-occurrence counts N(v, w) and conditionals p(w | v).
struct BigramStats {
  int32_t num_classes = 0;
  std::vector<int64_t> counts;  // row-major num_classes^2
  std::vector<double> probs;    // row-major num_classes^2
  std::vector<bool> uniform_row;

  int64_t Count(ClassId v, ClassId w) const {
    return counts[static_cast<size_t>(v) * num_classes + w];
  }
  double Prob(ClassId v, ClassId w) const {
    return probs[static_cast<size_t>(v) * num_classes + w];
  }
  /// Recomputes probs/uniform_row from counts.
  void Normalize();
};

/// k sequences: pick a training video uniformly, then draw labels
/// uniformly from its action set until the summed means exceed its
/// length (the crossing label is kept).
SampledGrammar BuildMonteCarlo(const Corpus &corpus,
                               const std::vector<double> &means, int64_t k,
                               uint64_t seed);

/// As BuildMonteCarlo, but every label after the first is drawn from
/// p(. | previous) restricted to the action set.
SampledGrammar BuildTextBased(const Corpus &corpus,
                              const std::vector<double> &means, int64_t k,
                              uint64_t seed, const BigramStats &stats);

/// Lowercased, punctuation-free token lists, one per sentence; sentences
/// end at any of `.!?;`.
std::vector<std::vector<std::string>> TokenizeSentences(const std::string &text);

/// Counts, for v != w, the positions where a token of v is followed by a
/// token of w within `window` tokens of the same sentence.
BigramStats MineBigrams(const std::vector<std::string> &texts,
                        const ClassTable &classes, int32_t window);

// ---- Files ---------------------------------------------------------------

/// Reads either a sequence list (one space-separated sequence per line,
/// compiled to a prefix tree) or the `#automaton` format written by
/// WriteAutomaton.
GrammarAutomaton ReadGrammar(const std::filesystem::path &file,
                             const ClassTable &table);
void WriteGrammarSequences(const std::vector<LabelSequence> &sequences,
                           const ClassTable &table,
                           const std::filesystem::path &file);
void WriteAutomaton(const GrammarAutomaton &g, const ClassTable &table,
                    const std::filesystem::path &file);

void WriteBigramStats(const BigramStats &stats, const ClassTable &table,
                      const std::filesystem::path &file);
BigramStats ReadBigramStats(const std::filesystem::path &file,
                            const ClassTable &table);

}  // namespace actset

#endif  // ACTSET_GRAMMAR_H_
