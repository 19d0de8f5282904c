// actset/frame-scores.h

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

#ifndef ACTSET_FRAME_SCORES_H_
#define ACTSET_FRAME_SCORES_H_

#include <Eigen/Core>

#include "actset/base.h"

namespace actset {

/// Per-frame log class-conditional scores with per-class prefix sums, so
/// the score of any segment is two lookups.
class FrameScores {
 public:
  FrameScores() = default;
  /// `log_scores` is T x C. Throws NumericError on non-finite entries.
  explicit FrameScores(Eigen::MatrixXd log_scores);

  int64_t NumFrames() const { return entries_.rows(); }
  int32_t NumClasses() const { return static_cast<int32_t>(entries_.cols()); }
  double Entry(int64_t t, ClassId c) const { return entries_(t, c); }
  const Eigen::MatrixXd &Entries() const { return entries_; }
  /// Sum of entries over frames [0, t) for class c.
  double Prefix(int64_t t, ClassId c) const { return prefix_(t, c); }
  /// Sum of entries over frames [begin, end) for class c.
  double SegmentScore(ClassId c, int64_t begin, int64_t end) const {
    return prefix_(end, c) - prefix_(begin, c);
  }

 private:
  Eigen::MatrixXd entries_;
  Eigen::MatrixXd prefix_;  // (T + 1) x C
};

}  // namespace actset

#endif  // ACTSET_FRAME_SCORES_H_
