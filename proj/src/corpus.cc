// src/corpus.cc

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

#include "actset/corpus.h"

#include <bit>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <unordered_set>

#include "actset/text-util.h"

namespace actset {

namespace fs = std::filesystem;

namespace {

const char kBinaryMagic[] = "SSFEAT1";
constexpr size_t kBinaryMagicLen = 7;

uint32_t ToLittleEndian(uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) |
         (v >> 24);
}

void WriteU32(std::ostream &os, uint32_t v) {
  v = ToLittleEndian(v);
  os.write(reinterpret_cast<const char *>(&v), sizeof(v));
}

bool ReadU32(std::istream &is, uint32_t *v) {
  if (!is.read(reinterpret_cast<char *>(v), sizeof(*v))) return false;
  *v = ToLittleEndian(*v);
  return true;
}

void WriteF32(std::ostream &os, float f) {
  WriteU32(os, std::bit_cast<uint32_t>(f));
}

bool ReadF32(std::istream &is, float *f) {
  uint32_t u;
  if (!ReadU32(is, &u)) return false;
  *f = std::bit_cast<float>(u);
  return true;
}

std::ifstream OpenForRead(const fs::path &file,
                          std::ios::openmode mode = std::ios::in) {
  std::ifstream is(file, mode);
  if (!is) throw ValidationError("cannot open file " + file.string());
  return is;
}

std::ofstream OpenForWrite(const fs::path &file,
                           std::ios::openmode mode = std::ios::out) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream os(file, mode | std::ios::trunc);
  if (!os) throw Error("cannot open file for writing " + file.string());
  return os;
}

FeatureMatrix ReadFeaturesBinary(const fs::path &file) {
  std::ifstream is = OpenForRead(file, std::ios::in | std::ios::binary);
  char magic[kBinaryMagicLen];
  is.read(magic, kBinaryMagicLen);
  uint32_t rows = 0, cols = 0;
  if (!is || std::memcmp(magic, kBinaryMagic, kBinaryMagicLen) != 0 ||
      !ReadU32(is, &rows) || !ReadU32(is, &cols))
    throw ParseError(file.string(), 1, "bad binary feature header");
  if (rows == 0 || cols == 0)
    throw ParseError(file.string(), 1, "empty feature matrix");
  FeatureMatrix m(rows, cols);
  for (uint32_t t = 0; t < rows; t++)
    for (uint32_t j = 0; j < cols; j++)
      if (!ReadF32(is, &m(t, j)))
        throw ParseError(file.string(), 1,
                         "truncated binary feature data at frame " +
                             std::to_string(t));
  return m;
}

FeatureMatrix ReadFeaturesTextFile(const fs::path &file) {
  std::ifstream is = OpenForRead(file);
  std::string line;
  int64_t line_no = 0;
  std::vector<std::string> fields;
  // header
  while (std::getline(is, line)) {
    line_no++;
    fields = SplitWhitespace(line);
    if (!fields.empty()) break;
  }
  if (fields.size() != 2)
    throw ParseError(file.string(), line_no, "expected header `T d`");
  int64_t rows = ParseInt(fields[0], file.string(), line_no);
  int64_t cols = ParseInt(fields[1], file.string(), line_no);
  if (rows < 1 || cols < 1)
    throw ParseError(file.string(), line_no, "T and d must be positive");
  FeatureMatrix m(rows, cols);
  int64_t t = 0;
  while (t < rows && std::getline(is, line)) {
    line_no++;
    fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    if (static_cast<int64_t>(fields.size()) != cols)
      throw ParseError(file.string(), line_no,
                       "expected " + std::to_string(cols) + " values, got " +
                           std::to_string(fields.size()));
    for (int64_t j = 0; j < cols; j++)
      m(t, j) = ParseFloat(fields[j], file.string(), line_no);
    t++;
  }
  if (t != rows)
    throw ParseError(file.string(), line_no,
                     "expected " + std::to_string(rows) + " frames, got " +
                         std::to_string(t));
  while (std::getline(is, line)) {
    line_no++;
    if (!SplitWhitespace(line).empty())
      throw ParseError(file.string(), line_no, "trailing data after frames");
  }
  return m;
}

}  // namespace

ClassTable::ClassTable(std::vector<std::string> names, ClassId background_id)
    : names_(std::move(names)), background_id_(background_id) {
  if (names_.empty()) throw ValidationError("class table is empty");
  std::unordered_set<std::string> seen;
  for (const auto &n : names_) {
    if (n.empty()) throw ValidationError("empty class name");
    if (n.find_first_of(" \t\r\n") != std::string::npos)
      throw ValidationError("class name contains whitespace: '" + n + "'");
    if (!seen.insert(n).second)
      throw ValidationError("duplicate class name '" + n + "'");
  }
  if (background_id_ < 0 || background_id_ >= NumClasses())
    throw ValidationError("background id out of range");
}

std::optional<ClassId> ClassTable::Find(const std::string &name) const {
  for (size_t i = 0; i < names_.size(); i++)
    if (names_[i] == name) return static_cast<ClassId>(i);
  return std::nullopt;
}

void Corpus::Validate() const {
  const int32_t num_classes = class_table.NumClasses();
  if (num_classes == 0) throw ValidationError("corpus has no class table");
  const int64_t dim = Dim();
  std::unordered_set<std::string> ids;
  for (const VideoRecord &v : videos) {
    if (!ids.insert(v.id).second)
      throw ValidationError("duplicate video id '" + v.id + "'");
    if (v.NumFrames() < 1 || v.Dim() < 1)
      throw ValidationError("video '" + v.id + "' has empty features");
    if (v.Dim() != dim)
      throw ValidationError("feature dimension mismatch: video '" + v.id +
                            "' has d=" + std::to_string(v.Dim()) +
                            ", expected d=" + std::to_string(dim));
    if (v.action_set.empty())
      throw ValidationError("video '" + v.id + "' has an empty action set");
    for (ClassId c : v.action_set)
      if (c < 0 || c >= num_classes)
        throw ValidationError("video '" + v.id + "' has class id " +
                              std::to_string(c) + " outside the class table");
    if (v.gt_labels) {
      if (static_cast<int64_t>(v.gt_labels->size()) != v.NumFrames())
        throw ValidationError("video '" + v.id + "' ground truth has " +
                              std::to_string(v.gt_labels->size()) +
                              " frames, features have " +
                              std::to_string(v.NumFrames()));
      for (ClassId c : *v.gt_labels)
        if (c < 0 || c >= num_classes)
          throw ValidationError("video '" + v.id +
                                "' ground truth has an invalid class id");
    }
  }
}

int64_t Segmentation::NumFrames() const {
  int64_t n = 0;
  for (const Segment &s : segments) n += s.length;
  return n;
}

LabelSequence Segmentation::Labels() const {
  LabelSequence out;
  out.reserve(segments.size());
  for (const Segment &s : segments) out.push_back(s.label);
  return out;
}

std::vector<ClassId> SegmentationToFramewise(const Segmentation &seg) {
  std::vector<ClassId> frames;
  frames.reserve(seg.NumFrames());
  for (const Segment &s : seg.segments) frames.insert(frames.end(), s.length, s.label);
  return frames;
}

Segmentation FramewiseToSegmentation(const std::vector<ClassId> &frames) {
  Segmentation seg;
  for (ClassId c : frames) {
    if (!seg.segments.empty() && seg.segments.back().label == c)
      seg.segments.back().length++;
    else
      seg.segments.push_back({c, 1});
  }
  return seg;
}

ClassTable ReadClassTable(const fs::path &file) {
  std::ifstream is = OpenForRead(file);
  std::vector<std::string> names;
  std::optional<ClassId> marked;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(is, line)) {
    line_no++;
    std::vector<std::string> fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    if (fields.size() == 2 && fields[1] == "#background") {
      if (marked)
        throw ParseError(file.string(), line_no,
                         "more than one class marked #background");
      marked = static_cast<ClassId>(names.size());
    } else if (fields.size() != 1) {
      throw ParseError(file.string(), line_no,
                       "expected one class name per line");
    }
    names.push_back(fields[0]);
  }
  ClassId bg = 0;
  if (marked) {
    bg = *marked;
  } else {
    for (size_t i = 0; i < names.size(); i++)
      if (names[i] == "background") bg = static_cast<ClassId>(i);
  }
  return ClassTable(std::move(names), bg);
}

void WriteClassTable(const ClassTable &table, const fs::path &file) {
  std::ofstream os = OpenForWrite(file);
  for (ClassId c = 0; c < table.NumClasses(); c++) {
    os << table.Name(c);
    if (c == table.BackgroundId()) os << " #background";
    os << '\n';
  }
}

FeatureMatrix ReadFeatures(const fs::path &file) {
  std::ifstream probe = OpenForRead(file, std::ios::in | std::ios::binary);
  char magic[kBinaryMagicLen] = {0};
  probe.read(magic, kBinaryMagicLen);
  bool binary = probe.gcount() == static_cast<std::streamsize>(kBinaryMagicLen) &&
                std::memcmp(magic, kBinaryMagic, kBinaryMagicLen) == 0;
  probe.close();
  return binary ? ReadFeaturesBinary(file) : ReadFeaturesTextFile(file);
}

void WriteFeaturesText(const FeatureMatrix &m, const fs::path &file) {
  std::ofstream os = OpenForWrite(file);
  os << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (Eigen::Index t = 0; t < m.rows(); t++) {
    for (Eigen::Index j = 0; j < m.cols(); j++) {
      // 9 significant digits round-trip any float exactly.
      std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(m(t, j)));
      if (j > 0) os << ' ';
      os << buf;
    }
    os << '\n';
  }
}

void WriteFeaturesBinary(const FeatureMatrix &m, const fs::path &file) {
  std::ofstream os = OpenForWrite(file, std::ios::out | std::ios::binary);
  os.write(kBinaryMagic, kBinaryMagicLen);
  WriteU32(os, static_cast<uint32_t>(m.rows()));
  WriteU32(os, static_cast<uint32_t>(m.cols()));
  for (Eigen::Index t = 0; t < m.rows(); t++)
    for (Eigen::Index j = 0; j < m.cols(); j++) WriteF32(os, m(t, j));
}

std::vector<std::pair<std::string, std::vector<std::string>>> ReadActionSets(
    const fs::path &file) {
  std::ifstream is = OpenForRead(file);
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  std::unordered_set<std::string> seen;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(is, line)) {
    line_no++;
    if (SplitWhitespace(line).empty()) continue;
    size_t colon = line.find(':');
    if (colon == std::string::npos)
      throw ParseError(file.string(), line_no,
                       "expected `<video_id>: <name> ...`");
    std::vector<std::string> id_fields = SplitWhitespace(line.substr(0, colon));
    if (id_fields.size() != 1)
      throw ParseError(file.string(), line_no, "bad video id");
    if (!seen.insert(id_fields[0]).second)
      throw ParseError(file.string(), line_no,
                       "duplicate video id '" + id_fields[0] + "'");
    out.emplace_back(id_fields[0], SplitWhitespace(line.substr(colon + 1)));
  }
  return out;
}

std::vector<ClassId> ReadFramewiseLabels(const fs::path &file,
                                         const ClassTable &table) {
  std::ifstream is = OpenForRead(file);
  std::vector<ClassId> labels;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(is, line)) {
    line_no++;
    std::vector<std::string> fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    if (fields.size() != 1)
      throw ParseError(file.string(), line_no, "expected one class name");
    std::optional<ClassId> c = table.Find(fields[0]);
    if (!c)
      throw ParseError(file.string(), line_no,
                       "unknown class '" + fields[0] + "'");
    labels.push_back(*c);
  }
  return labels;
}

void WriteFramewiseLabels(const std::vector<ClassId> &labels,
                          const ClassTable &table, const fs::path &file) {
  std::ofstream os = OpenForWrite(file);
  for (ClassId c : labels) os << table.Name(c) << '\n';
}

Segmentation ReadSegmentation(const fs::path &file, const ClassTable &table) {
  std::ifstream is = OpenForRead(file);
  Segmentation seg;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(is, line)) {
    line_no++;
    std::vector<std::string> fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    if (fields.size() != 2)
      throw ParseError(file.string(), line_no,
                       "expected `<class_name> <length>`");
    std::optional<ClassId> c = table.Find(fields[0]);
    if (!c)
      throw ParseError(file.string(), line_no,
                       "unknown class '" + fields[0] + "'");
    int64_t len = ParseInt(fields[1], file.string(), line_no);
    if (len < 1)
      throw ParseError(file.string(), line_no, "segment length must be >= 1");
    seg.segments.push_back({*c, len});
  }
  return seg;
}

void WriteSegmentation(const Segmentation &seg, const ClassTable &table,
                       const fs::path &file) {
  std::ofstream os = OpenForWrite(file);
  for (const Segment &s : seg.segments)
    os << table.Name(s.label) << ' ' << s.length << '\n';
}

Corpus LoadCorpus(const fs::path &features_dir, const fs::path &annotations_file,
                  const fs::path &classes_file,
                  const std::optional<fs::path> &groundtruth_dir) {
  Corpus corpus;
  corpus.class_table = ReadClassTable(classes_file);
  const ClassTable &table = corpus.class_table;
  auto sets = ReadActionSets(annotations_file);
  for (auto &[id, names] : sets) {
    VideoRecord v;
    v.id = id;
    for (const std::string &n : names) {
      std::optional<ClassId> c = table.Find(n);
      if (!c)
        throw ValidationError(annotations_file.string() + ": video '" + id +
                              "' names unknown class '" + n + "'");
      v.action_set.insert(*c);
    }
    v.action_set.insert(table.BackgroundId());
    fs::path feat = features_dir / (id + ".feat");
    if (!fs::exists(feat))
      throw ValidationError("missing feature file " + feat.string());
    v.features = ReadFeatures(feat);
    if (groundtruth_dir) {
      fs::path gt = *groundtruth_dir / (id + ".txt");
      if (fs::exists(gt)) v.gt_labels = ReadFramewiseLabels(gt, table);
    }
    corpus.videos.push_back(std::move(v));
  }
  corpus.Validate();
  return corpus;
}

Corpus LoadCorpusDir(const fs::path &dir) {
  fs::path gt = dir / "groundtruth";
  return LoadCorpus(dir / "features", dir / "actionsets.txt",
                    dir / "classes.txt",
                    fs::is_directory(gt) ? std::optional<fs::path>(gt)
                                         : std::nullopt);
}

void SaveCorpusDir(const Corpus &corpus, const fs::path &dir,
                   FeatureFormat format) {
  corpus.Validate();
  fs::create_directories(dir / "features");
  WriteClassTable(corpus.class_table, dir / "classes.txt");
  std::ofstream sets = OpenForWrite(dir / "actionsets.txt");
  for (const VideoRecord &v : corpus.videos) {
    sets << v.id << ':';
    for (ClassId c : v.action_set) sets << ' ' << corpus.class_table.Name(c);
    sets << '\n';
    fs::path feat = dir / "features" / (v.id + ".feat");
    if (format == FeatureFormat::kText)
      WriteFeaturesText(v.features, feat);
    else
      WriteFeaturesBinary(v.features, feat);
    if (v.gt_labels)
      WriteFramewiseLabels(*v.gt_labels, corpus.class_table,
                           dir / "groundtruth" / (v.id + ".txt"));
  }
}

}  // namespace actset
