// actset/segment-decoder.h

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

#ifndef ACTSET_SEGMENT_DECODER_H_
#define ACTSET_SEGMENT_DECODER_H_

#include <vector>

#include "actset/corpus.h"
#include "actset/frame-scores.h"
#include "actset/grammar.h"
#include "actset/length-model.h"

namespace actset {

struct DecodeConfig {
  /// Segment boundaries are hypothesized only on multiples of `stride`;
  /// the last segment always ends at T and absorbs the T mod stride
  /// remainder frames.
  int64_t stride = 30;
  /// Maximum segment length; 0 selects DefaultMaxLength. The final
  /// segment may exceed it by the remainder (at most stride - 1 frames).
  int64_t max_length = 0;
  /// Keep only the best `beam` automaton states per boundary; 0 = exact.
  int64_t beam = 0;
  /// When false, p(l | c) is dropped from the objective (ablation).
  bool use_length_model = true;
};

struct DecodeResult {
  Segmentation segmentation;
  double log_score = kLogZero;
  LabelSequence sequence;
  std::vector<int32_t> automaton_path;  // start state first
};

/// min(T, ceil(max_c lambda_c + 5 max_c spread_c)) rounded up to a stride
/// multiple; T rounded up to a stride multiple without a length model.
int64_t DefaultMaxLength(const LengthModel &lm, const DecodeConfig &cfg,
                         int64_t num_frames);

/// Exact maximizer of sum_n [log p(l_n | c_n) + sum_{t in segment n}
/// score(t, c_n)] over segmentations whose label sequence `g` accepts,
/// with boundaries on the stride lattice and lengths bounded as described
/// in DecodeConfig.
///
/// Ties are broken by fewer segments, then the lexicographically smaller
/// label sequence, then the lexicographically smaller length sequence.
///
/// Throws InfeasibleError if nothing satisfies the constraints and
/// ValidationError on mismatched inputs.
DecodeResult Decode(const FrameScores &scores, const GrammarAutomaton &g,
                    const LengthModel &lm, const DecodeConfig &cfg);

/// Decodes against g restricted to allowed*, or against allowed* itself
/// when the restriction is empty.
DecodeResult DecodeGivenSet(const FrameScores &scores,
                            const GrammarAutomaton &g, const LengthModel &lm,
                            const DecodeConfig &cfg, const ActionSet &allowed);

/// Exhaustive search with Decode's objective and tie-breaking. Limited to
/// ceil(T / stride) <= 16 and at most 64 admissible label sequences;
/// throws ConfigError beyond that.
DecodeResult BruteForceDecode(const FrameScores &scores,
                              const GrammarAutomaton &g, const LengthModel &lm,
                              const DecodeConfig &cfg);

/// Recomputes the decoding objective of a given segmentation.
double ScoreSegmentation(const FrameScores &scores, const LengthModel &lm,
                         const DecodeConfig &cfg, const Segmentation &seg);

}  // namespace actset

#endif  // ACTSET_SEGMENT_DECODER_H_
