// src/synthetic-corpus.cc

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

#include "actset/synthetic-corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace actset {

namespace {

const char *const kActionNames[] = {
    "crack_egg",   "pour_milk",    "stir_dough",  "fry_pancake",
    "cut_bun",     "spread_butter", "take_cup",   "add_sugar",
    "pour_coffee", "smear_jam",    "peel_fruit",  "stir_cereals",
    "pour_juice",  "squeeze_orange", "put_toppings", "fry_egg"};

std::vector<std::string> MakeClassNames(int32_t num_classes) {
  std::vector<std::string> names = {"background"};
  const int32_t num_named = sizeof(kActionNames) / sizeof(kActionNames[0]);
  for (int32_t c = 1; c < num_classes; c++) {
    if (c - 1 < num_named)
      names.push_back(kActionNames[c - 1]);
    else
      names.push_back("action_" + std::to_string(c));
  }
  return names;
}

Eigen::MatrixXd MakePrototypes(const SynthConfig &cfg, RandomEngine *rng) {
  const int32_t C = cfg.num_classes, d = cfg.dim;
  Eigen::MatrixXd protos = Eigen::MatrixXd::Zero(C, d);
  if (d >= C) {
    // Scaled distinct axes: every pair is exactly `separation` apart.
    std::vector<int32_t> axes(d);
    std::iota(axes.begin(), axes.end(), 0);
    std::shuffle(axes.begin(), axes.end(), *rng);
    for (int32_t c = 0; c < C; c++)
      protos(c, axes[c]) = cfg.separation / std::sqrt(2.0);
    return protos;
  }
  // Rejection sampling in a cube large enough to pack C points.
  const double side =
      std::max(1.0, 2.0 * cfg.separation * std::pow(C, 1.0 / d));
  std::uniform_real_distribution<double> coord(-side / 2, side / 2);
  for (int32_t c = 0; c < C; c++) {
    bool placed = false;
    for (int attempt = 0; attempt < 100000 && !placed; attempt++) {
      for (int32_t j = 0; j < d; j++) protos(c, j) = coord(*rng);
      placed = true;
      for (int32_t o = 0; o < c && placed; o++)
        if ((protos.row(c) - protos.row(o)).norm() < cfg.separation)
          placed = false;
    }
    if (!placed)
      throw ConfigError("cannot place " + std::to_string(C) +
                        " prototypes at separation " +
                        std::to_string(cfg.separation) + " in d=" +
                        std::to_string(d));
  }
  return protos;
}

void CheckConfig(const SynthConfig &cfg) {
  if (cfg.num_classes < 2)
    throw ConfigError("synthetic corpus needs at least 2 classes");
  if (cfg.dim < 1) throw ConfigError("feature dimension must be >= 1");
  if (!(cfg.separation >= 0)) throw ConfigError("separation must be >= 0");
  if (!(cfg.noise_sigma >= 0)) throw ConfigError("noise sigma must be >= 0");
  if (cfg.num_train_videos < 1)
    throw ConfigError("synthetic corpus needs at least one training video");
  if (cfg.num_test_videos < 0)
    throw ConfigError("number of test videos must be >= 0");
  if (!cfg.mean_lengths.empty()) {
    if (static_cast<int32_t>(cfg.mean_lengths.size()) != cfg.num_classes)
      throw ConfigError("mean_lengths must have one entry per class");
    for (double m : cfg.mean_lengths)
      if (!(m > 0)) throw ConfigError("mean lengths must be positive");
  } else if (!(cfg.min_mean_length > 0) ||
             cfg.max_mean_length < cfg.min_mean_length) {
    throw ConfigError("invalid mean length range");
  }
  if (cfg.orderings.empty()) {
    if (cfg.num_orderings < 1) throw ConfigError("num_orderings must be >= 1");
    if (cfg.min_actions < 1 || cfg.max_actions < cfg.min_actions ||
        cfg.max_actions > cfg.num_classes - 1)
      throw ConfigError("invalid action count range");
  }
  for (const LabelSequence &o : cfg.orderings) {
    if (o.empty()) throw ConfigError("empty ordering");
    for (ClassId c : o)
      if (c < 0 || c >= cfg.num_classes)
        throw ConfigError("ordering uses class id outside the class table");
  }
}

Corpus MakeSplit(const std::string &prefix, int32_t num_videos,
                 SplitTag tag, const ClassTable &table,
                 const std::vector<LabelSequence> &orderings,
                 const std::vector<double> &means,
                 const Eigen::MatrixXd &protos, double noise_sigma,
                 RandomEngine *rng, std::vector<Segmentation> *truth) {
  Corpus corpus;
  corpus.class_table = table;
  corpus.split_tag = tag;
  std::uniform_int_distribution<size_t> pick(0, orderings.size() - 1);
  std::normal_distribution<double> noise(0.0, 1.0);
  char id[64];
  for (int32_t i = 0; i < num_videos; i++) {
    const LabelSequence &ordering = orderings[pick(*rng)];
    Segmentation seg;
    for (ClassId c : ordering) {
      std::poisson_distribution<int64_t> len(means[c]);
      seg.segments.push_back({c, std::max<int64_t>(1, len(*rng))});
    }
    VideoRecord v;
    std::snprintf(id, sizeof(id), "%s_%04d", prefix.c_str(), i);
    v.id = id;
    v.gt_labels = SegmentationToFramewise(seg);
    const int64_t T = static_cast<int64_t>(v.gt_labels->size());
    v.features.resize(T, protos.cols());
    for (int64_t t = 0; t < T; t++) {
      ClassId c = (*v.gt_labels)[t];
      for (Eigen::Index j = 0; j < protos.cols(); j++)
        v.features(t, j) =
            static_cast<float>(protos(c, j) + noise_sigma * noise(*rng));
    }
    v.action_set = ActionSet(ordering.begin(), ordering.end());
    corpus.videos.push_back(std::move(v));
    truth->push_back(std::move(seg));
  }
  corpus.Validate();
  return corpus;
}

}  // namespace

SyntheticData GenerateSynthetic(const SynthConfig &config, uint64_t seed) {
  CheckConfig(config);
  RandomEngine rng(seed);
  SyntheticData data;
  ClassTable table(MakeClassNames(config.num_classes), 0);

  data.mean_lengths = config.mean_lengths;
  if (data.mean_lengths.empty()) {
    std::uniform_real_distribution<double> mean(config.min_mean_length,
                                                config.max_mean_length);
    for (int32_t c = 0; c < config.num_classes; c++)
      data.mean_lengths.push_back(mean(rng));
  }

  data.orderings = config.orderings;
  if (data.orderings.empty()) {
    std::vector<ClassId> actions(config.num_classes - 1);
    std::iota(actions.begin(), actions.end(), 1);
    std::uniform_int_distribution<int32_t> count(config.min_actions,
                                                 config.max_actions);
    for (int32_t k = 0; k < config.num_orderings; k++) {
      std::shuffle(actions.begin(), actions.end(), rng);
      LabelSequence o = {table.BackgroundId()};
      o.insert(o.end(), actions.begin(), actions.begin() + count(rng));
      if (config.closing_background) o.push_back(table.BackgroundId());
      data.orderings.push_back(std::move(o));
    }
  }

  data.prototypes = MakePrototypes(config, &rng);
  data.train = MakeSplit("train", config.num_train_videos, SplitTag::kTrain,
                         table, data.orderings, data.mean_lengths,
                         data.prototypes, config.noise_sigma, &rng,
                         &data.train_truth);
  data.test = MakeSplit("test", config.num_test_videos, SplitTag::kTest,
                        table, data.orderings, data.mean_lengths,
                        data.prototypes, config.noise_sigma, &rng,
                        &data.test_truth);
  return data;
}

}  // namespace actset
