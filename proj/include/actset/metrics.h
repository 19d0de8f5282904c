// actset/metrics.h

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

#ifndef ACTSET_METRICS_H_
#define ACTSET_METRICS_H_

#include <string>
#include <vector>

#include "actset/corpus.h"

namespace actset {

/// Fraction of frames with pred[t] == gt[t]. Background frames count.
double FrameAccuracy(const std::vector<ClassId> &pred,
                     const std::vector<ClassId> &gt);

struct MidpointHit {
  double precision = 0.0;  // hits / predicted non-background segments
  double recall = 0.0;     // matched / ground-truth non-background segments
};

/// A predicted non-background segment hits if its midpoint frame lies in
/// a not-yet-matched ground-truth segment of the same class; segments are
/// matched greedily in temporal order. An empty denominator scores 1 if
/// the other side is empty as well, else 0.
MidpointHit ComputeMidpointHit(const Segmentation &pred, const Segmentation &gt,
                               ClassId background);

/// Mean over non-background classes present in gt of per-class IoU.
/// If gt has no such class, 1 when pred has no non-background frame, else 0.
double JaccardIoU(const std::vector<ClassId> &pred,
                  const std::vector<ClassId> &gt, const ClassTable &classes);

struct VideoEval {
  std::string id;
  int64_t num_frames = 0;
  int64_t num_pred_segments = 0;
  int64_t num_gt_segments = 0;
  double frame_accuracy = 0.0;
  MidpointHit midpoint;
  double jaccard_iou = 0.0;
};

struct EvalReport {
  std::vector<VideoEval> videos;
  /// Pooled over all frames.
  double frame_accuracy = 0.0;
  /// The remaining aggregates are means of the per-video values.
  double frame_accuracy_video_mean = 0.0;
  double midpoint_precision = 0.0;
  double midpoint_recall = 0.0;
  double jaccard_iou = 0.0;
  int64_t num_frames = 0;
  int64_t num_pred_segments = 0;
  int64_t num_gt_segments = 0;
};

struct LabeledPrediction {
  std::string id;
  std::vector<ClassId> pred;
  std::vector<ClassId> gt;
};

EvalReport Evaluate(const std::vector<LabeledPrediction> &items,
                    const ClassTable &classes);

/// Aligned table with one row per video plus the aggregate row.
std::string FormatReportTable(const EvalReport &report);
/// `metric=value` lines for the aggregates.
std::string FormatReportKeyValues(const EvalReport &report);

}  // namespace actset

#endif  // ACTSET_METRICS_H_
