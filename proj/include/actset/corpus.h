// actset/corpus.h

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

#ifndef ACTSET_CORPUS_H_
#define ACTSET_CORPUS_H_

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "actset/base.h"

namespace actset {

typedef Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
    FeatureMatrix;
typedef std::set<ClassId> ActionSet;

/// Ordered class inventory. Line index in classes.txt is the class id.
class ClassTable {
 public:
  ClassTable() = default;
  /// Throws ValidationError on empty or duplicate names or a bad background id.
  ClassTable(std::vector<std::string> names, ClassId background_id);

  int32_t NumClasses() const { return static_cast<int32_t>(names_.size()); }
  ClassId BackgroundId() const { return background_id_; }
  const std::string &Name(ClassId c) const { return names_.at(c); }
  const std::vector<std::string> &Names() const { return names_; }
  /// Returns nullopt for unknown names.
  std::optional<ClassId> Find(const std::string &name) const;

  bool operator==(const ClassTable &other) const {
    return names_ == other.names_ && background_id_ == other.background_id_;
  }

 private:
  std::vector<std::string> names_;
  ClassId background_id_ = 0;
};

struct VideoRecord {
  std::string id;
  FeatureMatrix features;  // T x d
  ActionSet action_set;
  std::optional<std::vector<ClassId>> gt_labels;

  int64_t NumFrames() const { return features.rows(); }
  int64_t Dim() const { return features.cols(); }
};

enum class SplitTag { kTrain, kTest };

struct Corpus {
  ClassTable class_table;
  std::vector<VideoRecord> videos;
  SplitTag split_tag = SplitTag::kTrain;

  int64_t Dim() const { return videos.empty() ? 0 : videos.front().Dim(); }
  /// Checks every VideoRecord / Corpus invariant; throws ValidationError.
  void Validate() const;
};

/// A video's labeling as alternating (class, length) runs.
struct Segment {
  ClassId label;
  int64_t length;
  bool operator==(const Segment &o) const {
    return label == o.label && length == o.length;
  }
};

struct Segmentation {
  std::vector<Segment> segments;

  int64_t NumFrames() const;
  LabelSequence Labels() const;
  bool operator==(const Segmentation &o) const {
    return segments == o.segments;
  }
};

std::vector<ClassId> SegmentationToFramewise(const Segmentation &seg);

/// Maximal-run decomposition; never emits two adjacent segments with the
/// same label.
Segmentation FramewiseToSegmentation(const std::vector<ClassId> &frames);

// ---- File formats ---------------------------------------------------------

ClassTable ReadClassTable(const std::filesystem::path &file);
void WriteClassTable(const ClassTable &table, const std::filesystem::path &file);

/// Accepts both the text (`T d` header) and binary (`SSFEAT1`) containers.
FeatureMatrix ReadFeatures(const std::filesystem::path &file);
void WriteFeaturesText(const FeatureMatrix &m, const std::filesystem::path &file);
void WriteFeaturesBinary(const FeatureMatrix &m,
                         const std::filesystem::path &file);

/// Lines `<video_id>: <name> <name> ...`, in file order.
std::vector<std::pair<std::string, std::vector<std::string>>> ReadActionSets(
    const std::filesystem::path &file);

std::vector<ClassId> ReadFramewiseLabels(const std::filesystem::path &file,
                                         const ClassTable &table);
void WriteFramewiseLabels(const std::vector<ClassId> &labels,
                          const ClassTable &table,
                          const std::filesystem::path &file);

/// `<class_name> <length>` per line.
Segmentation ReadSegmentation(const std::filesystem::path &file,
                              const ClassTable &table);
void WriteSegmentation(const Segmentation &seg, const ClassTable &table,
                       const std::filesystem::path &file);

/// Loads a corpus. The background class is added to every action set.
/// If `groundtruth_dir` is given, `<id>.txt` files found there fill
/// gt_labels (missing files are allowed).
Corpus LoadCorpus(const std::filesystem::path &features_dir,
                  const std::filesystem::path &annotations_file,
                  const std::filesystem::path &classes_file,
                  const std::optional<std::filesystem::path> &groundtruth_dir =
                      std::nullopt);

/// Loads the standard directory layout written by SaveCorpus:
/// classes.txt, actionsets.txt, features/, groundtruth/.
Corpus LoadCorpusDir(const std::filesystem::path &dir);

enum class FeatureFormat { kText, kBinary };

void SaveCorpusDir(const Corpus &corpus, const std::filesystem::path &dir,
                   FeatureFormat format = FeatureFormat::kText);

}  // namespace actset

#endif  // ACTSET_CORPUS_H_
