// tests/metrics-test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "actset/metrics.h"

namespace actset {
namespace {

// 0 = background
const ClassId BG = 0, A = 1, B = 2;
const ClassTable kClasses({"background", "a", "b", "c"}, 0);

TEST_CASE("frame accuracy") {
  std::vector<ClassId> x = {A, A, B, B};
  CHECK(FrameAccuracy(x, x) == 1.0);
  CHECK(FrameAccuracy({A, A, A, A}, {B, B, B, B}) == 0.0);
  CHECK(FrameAccuracy({A, A, B, B}, {A, B, B, B}) == 0.75);
  CHECK_THROWS_AS(FrameAccuracy({A}, {A, A}), ValidationError);
}

TEST_CASE("midpoint hit") {
  Segmentation gt{{{BG, 4}, {A, 10}, {B, 6}}};
  MidpointHit same = ComputeMidpointHit(gt, gt, BG);
  CHECK(same.precision == 1.0);
  CHECK(same.recall == 1.0);

  MidpointHit wrong =
      ComputeMidpointHit(Segmentation{{{B, 20}}}, Segmentation{{{A, 20}}}, BG);
  CHECK(wrong.precision == 0.0);
  CHECK(wrong.recall == 0.0);

  // Predicted a-segments [0,5) and [5,10) have midpoints 2 and 7, both inside
  // the single gt a-segment [0,10): the first hits, the second finds it taken.
  MidpointHit split = ComputeMidpointHit(Segmentation{{{A, 5}, {A, 5}}},
                                         Segmentation{{{A, 10}}}, BG);
  CHECK(split.precision == 0.5);
  CHECK(split.recall == 1.0);

  // Background segments are ignored on both sides.
  MidpointHit bg = ComputeMidpointHit(Segmentation{{{BG, 3}, {A, 7}}},
                                      Segmentation{{{A, 8}, {BG, 2}}}, BG);
  CHECK(bg.precision == 1.0);
  CHECK(bg.recall == 1.0);

  // Midpoints round down with inclusive ends: [0,3] -> 1, which is still a.
  MidpointHit edge = ComputeMidpointHit(Segmentation{{{A, 4}, {B, 4}}},
                                        Segmentation{{{A, 2}, {B, 6}}}, BG);
  CHECK(edge.precision == 1.0);
  CHECK(edge.recall == 1.0);
  MidpointHit shifted = ComputeMidpointHit(Segmentation{{{A, 4}, {B, 4}}},
                                           Segmentation{{{A, 1}, {B, 7}}}, BG);
  CHECK(shifted.precision == 0.5);
  CHECK(shifted.recall == 0.5);

  CHECK_THROWS_AS(ComputeMidpointHit(Segmentation{{{A, 3}}}, gt, BG), ValidationError);
}

TEST_CASE("midpoint hit never exceeds one under over-segmentation") {
  RandomEngine rng(3);
  for (int trial = 0; trial < 50; trial++) {
    Segmentation gt{{{A, 30}, {B, 30}, {A, 40}}};
    Segmentation pred;
    int64_t left = 100;
    while (left > 0) {
      int64_t len = std::min<int64_t>(left, 1 + rng() % 7);
      pred.segments.push_back({static_cast<ClassId>(rng() % 3), len});
      left -= len;
    }
    MidpointHit h = ComputeMidpointHit(pred, gt, BG);
    CHECK(h.precision <= 1.0);
    CHECK(h.recall <= 1.0);
  }
}

TEST_CASE("Jaccard index") {
  std::vector<ClassId> gt = {A, A, B, B};
  CHECK(JaccardIoU(gt, gt, kClasses) == 1.0);
  CHECK(JaccardIoU({BG, BG, BG}, {A, A, BG}, kClasses) == 0.0);
  // IoU_a = 1/2, IoU_b = 2/3
  CHECK(JaccardIoU({A, B, B, B}, gt, kClasses) == doctest::Approx(7.0 / 12));
}

TEST_CASE("all metrics are one on identical random segmentations") {
  RandomEngine rng(12);
  for (int trial = 0; trial < 20; trial++) {
    Segmentation s;
    for (int k = 1 + rng() % 8; k > 0; k--)
      s.segments.push_back({static_cast<ClassId>(rng() % 4), 1 + int64_t(rng() % 50)});
    std::vector<ClassId> f = SegmentationToFramewise(s);
    CHECK(FrameAccuracy(f, f) == 1.0);
    MidpointHit h = ComputeMidpointHit(s, s, BG);
    CHECK(h.precision == 1.0);
    CHECK(h.recall == 1.0);
    CHECK(JaccardIoU(f, f, kClasses) == 1.0);
  }
}

TEST_CASE("frame accuracy relabeling invariance and shuffling sensitivity") {
  std::vector<ClassId> gt = {A, A, B, B, BG, BG, A, B};
  std::vector<ClassId> pred = {A, B, B, B, BG, A, A, BG};
  auto relabel = [](std::vector<ClassId> v) {
    for (ClassId &c : v) c = (c + 1) % 4;
    return v;
  };
  CHECK(FrameAccuracy(relabel(pred), relabel(gt)) == FrameAccuracy(pred, gt));
  std::vector<ClassId> rotated = gt;
  std::rotate(rotated.begin(), rotated.begin() + 1, rotated.end());
  CHECK(FrameAccuracy(rotated, gt) < 1.0);
}

TEST_CASE("corpus report aggregates") {
  std::vector<LabeledPrediction> items = {
      {"v1", {A, A, B, B}, {A, B, B, B}},
      {"v2", {A, A}, {A, A}},
  };
  EvalReport r = Evaluate(items, kClasses);
  REQUIRE(r.videos.size() == 2);
  // Pooled: 5 of 6 frames.
  CHECK(r.frame_accuracy == doctest::Approx(5.0 / 6));
  CHECK(r.frame_accuracy_video_mean == doctest::Approx((0.75 + 1.0) / 2));
  CHECK(r.jaccard_iou == doctest::Approx((7.0 / 12 + 1.0) / 2));
  CHECK(r.num_frames == 6);
  CHECK(r.num_pred_segments == 3);
  CHECK(r.num_gt_segments == 3);
  std::string kv = FormatReportKeyValues(r);
  CHECK(kv.find("frame_accuracy=") != std::string::npos);
  CHECK(kv.find("midpoint_hit=") != std::string::npos);
  CHECK(kv.find("jaccard_iou=") != std::string::npos);
  std::string table = FormatReportTable(r);
  CHECK(table.find("v1") != std::string::npos);
  CHECK(table.find("TOTAL") != std::string::npos);
}

}  // namespace
}  // namespace actset
