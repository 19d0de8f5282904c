// src/metrics.cc

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

#include "actset/metrics.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "actset/text-util.h"

namespace actset {

namespace {

void CheckSameLength(const std::vector<ClassId> &pred,
                     const std::vector<ClassId> &gt) {
  if (pred.size() != gt.size())
    throw ValidationError("prediction has " + std::to_string(pred.size()) +
                          " frames, ground truth has " +
                          std::to_string(gt.size()));
}

double Ratio(int64_t num, int64_t den, bool other_side_empty) {
  if (den == 0) return other_side_empty ? 1.0 : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double FrameAccuracy(const std::vector<ClassId> &pred,
                     const std::vector<ClassId> &gt) {
  CheckSameLength(pred, gt);
  if (gt.empty()) return 1.0;
  int64_t correct = 0;
  for (size_t t = 0; t < gt.size(); t++) correct += pred[t] == gt[t];
  return static_cast<double>(correct) / static_cast<double>(gt.size());
}

MidpointHit ComputeMidpointHit(const Segmentation &pred, const Segmentation &gt,
                               ClassId background) {
  if (pred.NumFrames() != gt.NumFrames())
    throw ValidationError("prediction covers " +
                          std::to_string(pred.NumFrames()) +
                          " frames, ground truth covers " +
                          std::to_string(gt.NumFrames()));
  // gt segment start frames for midpoint lookup
  std::vector<int64_t> gt_start;
  int64_t pos = 0, gt_count = 0;
  for (const Segment &s : gt.segments) {
    gt_start.push_back(pos);
    pos += s.length;
    gt_count += s.label != background;
  }
  std::vector<bool> matched(gt.segments.size(), false);
  int64_t hits = 0, pred_count = 0;
  pos = 0;
  for (const Segment &s : pred.segments) {
    const int64_t begin = pos, end = pos + s.length - 1;
    pos += s.length;
    if (s.label == background) continue;
    pred_count++;
    const int64_t mid = (begin + end) / 2;
    size_t g = std::upper_bound(gt_start.begin(), gt_start.end(), mid) -
               gt_start.begin() - 1;
    if (gt.segments[g].label == s.label && !matched[g]) {
      matched[g] = true;
      hits++;
    }
  }
  MidpointHit out;
  out.precision = Ratio(hits, pred_count, gt_count == 0);
  out.recall = Ratio(hits, gt_count, pred_count == 0);
  return out;
}

double JaccardIoU(const std::vector<ClassId> &pred,
                  const std::vector<ClassId> &gt, const ClassTable &classes) {
  CheckSameLength(pred, gt);
  const ClassId bg = classes.BackgroundId();
  std::set<ClassId> gt_classes;
  for (ClassId c : gt)
    if (c != bg) gt_classes.insert(c);
  if (gt_classes.empty()) {
    for (ClassId c : pred)
      if (c != bg) return 0.0;
    return 1.0;
  }
  double sum = 0.0;
  for (ClassId c : gt_classes) {
    int64_t inter = 0, uni = 0;
    for (size_t t = 0; t < gt.size(); t++) {
      bool p = pred[t] == c, g = gt[t] == c;
      inter += p && g;
      uni += p || g;
    }
    sum += static_cast<double>(inter) / static_cast<double>(uni);
  }
  return sum / static_cast<double>(gt_classes.size());
}

EvalReport Evaluate(const std::vector<LabeledPrediction> &items,
                    const ClassTable &classes) {
  EvalReport r;
  int64_t correct = 0;
  for (const LabeledPrediction &item : items) {
    VideoEval v;
    v.id = item.id;
    v.num_frames = static_cast<int64_t>(item.gt.size());
    v.frame_accuracy = FrameAccuracy(item.pred, item.gt);
    Segmentation ps = FramewiseToSegmentation(item.pred);
    Segmentation gs = FramewiseToSegmentation(item.gt);
    v.num_pred_segments = static_cast<int64_t>(ps.segments.size());
    v.num_gt_segments = static_cast<int64_t>(gs.segments.size());
    v.midpoint = ComputeMidpointHit(ps, gs, classes.BackgroundId());
    v.jaccard_iou = JaccardIoU(item.pred, item.gt, classes);
    for (size_t t = 0; t < item.gt.size(); t++) correct += item.pred[t] == item.gt[t];
    r.num_frames += v.num_frames;
    r.num_pred_segments += v.num_pred_segments;
    r.num_gt_segments += v.num_gt_segments;
    r.frame_accuracy_video_mean += v.frame_accuracy;
    r.midpoint_precision += v.midpoint.precision;
    r.midpoint_recall += v.midpoint.recall;
    r.jaccard_iou += v.jaccard_iou;
    r.videos.push_back(std::move(v));
  }
  if (!r.videos.empty()) {
    const double n = static_cast<double>(r.videos.size());
    r.frame_accuracy_video_mean /= n;
    r.midpoint_precision /= n;
    r.midpoint_recall /= n;
    r.jaccard_iou /= n;
  }
  r.frame_accuracy =
      r.num_frames > 0 ? static_cast<double>(correct) / r.num_frames : 0.0;
  return r;
}

std::string FormatReportTable(const EvalReport &report) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-24s %8s %8s %8s %8s %8s\n", "video",
                "frames", "acc", "mid_p", "mid_r", "iou");
  os << line;
  for (const VideoEval &v : report.videos) {
    std::snprintf(line, sizeof(line), "%-24s %8lld %8.4f %8.4f %8.4f %8.4f\n",
                  v.id.c_str(), static_cast<long long>(v.num_frames),
                  v.frame_accuracy, v.midpoint.precision, v.midpoint.recall,
                  v.jaccard_iou);
    os << line;
  }
  std::snprintf(line, sizeof(line), "%-24s %8lld %8.4f %8.4f %8.4f %8.4f\n",
                "TOTAL", static_cast<long long>(report.num_frames),
                report.frame_accuracy, report.midpoint_precision,
                report.midpoint_recall, report.jaccard_iou);
  os << line;
  return os.str();
}

std::string FormatReportKeyValues(const EvalReport &report) {
  std::ostringstream os;
  os << "videos=" << report.videos.size() << '\n'
     << "frames=" << report.num_frames << '\n'
     << "pred_segments=" << report.num_pred_segments << '\n'
     << "gt_segments=" << report.num_gt_segments << '\n'
     << "frame_accuracy=" << FormatDouble(report.frame_accuracy) << '\n'
     << "frame_accuracy_video_mean="
     << FormatDouble(report.frame_accuracy_video_mean) << '\n'
     << "midpoint_hit=" << FormatDouble(report.midpoint_precision) << '\n'
     << "midpoint_hit_recall=" << FormatDouble(report.midpoint_recall) << '\n'
     << "jaccard_iou=" << FormatDouble(report.jaccard_iou) << '\n';
  return os.str();
}

}  // namespace actset
