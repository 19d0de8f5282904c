// actset/synthetic-corpus.h

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

#ifndef ACTSET_SYNTHETIC_CORPUS_H_
#define ACTSET_SYNTHETIC_CORPUS_H_

#include <vector>

#include "actset/corpus.h"

namespace actset {

/// Knobs for the synthetic corpus. Class 0 is always the background class.
struct SynthConfig {
  int32_t num_classes = 6;
  int32_t dim = 8;
  double separation = 10.0;   // minimum pairwise prototype distance
  double noise_sigma = 1.0;   // isotropic Gaussian noise per dimension
  /// True mean segment length per class; empty means draw each uniformly
  /// from [min_mean_length, max_mean_length].
  std::vector<double> mean_lengths;
  double min_mean_length = 60.0;
  double max_mean_length = 180.0;
  int32_t num_train_videos = 20;
  int32_t num_test_videos = 10;
  /// Admissible orderings. Empty means draw `num_orderings` of them: a
  /// background segment, a random arrangement of `min_actions`..`max_actions`
  /// distinct actions, and (optionally) a closing background segment.
  std::vector<LabelSequence> orderings;
  int32_t num_orderings = 8;
  int32_t min_actions = 2;
  int32_t max_actions = 4;
  /// When false, drawn orderings have no closing background segment.
  bool closing_background = true;
};

struct SyntheticData {
  Corpus train;
  Corpus test;
  std::vector<Segmentation> train_truth;
  std::vector<Segmentation> test_truth;
  std::vector<LabelSequence> orderings;
  std::vector<double> mean_lengths;
  Eigen::MatrixXd prototypes;  // num_classes x dim
};

/// Throws ConfigError for infeasible configurations. Bit-identical output
/// for identical (config, seed).
SyntheticData GenerateSynthetic(const SynthConfig &config, uint64_t seed);

}  // namespace actset

#endif  // ACTSET_SYNTHETIC_CORPUS_H_
