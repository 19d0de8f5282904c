// actset/multitask-net.h

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

#ifndef ACTSET_MULTITASK_NET_H_
#define ACTSET_MULTITASK_NET_H_

#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "actset/corpus.h"
#include "actset/frame-scores.h"

namespace actset {

/// One hidden ReLU layer feeding |C| independent two-way softmax heads.
/// Head c has logits (absent, present) at output rows 2c and 2c+1.
class MultiTaskNet {
 public:
  MultiTaskNet() = default;
  MultiTaskNet(int32_t dim, int32_t hidden, int32_t num_classes);

  int32_t Dim() const { return static_cast<int32_t>(w1_.cols()); }
  int32_t Hidden() const { return static_cast<int32_t>(w1_.rows()); }
  int32_t NumClasses() const { return static_cast<int32_t>(w2_.rows() / 2); }

  /// Uniform in +-1/sqrt(fan_in) for weights, zero biases.
  void InitRandom(RandomEngine *rng);

  /// Rows of `x` are frames; returns p(c present | x) as frames x C.
  Eigen::MatrixXd PresentProbs(const Eigen::MatrixXd &x) const;

  /// Mean over rows of the summed per-head cross-entropy against the 0/1
  /// targets in `y` (frames x C). If `grad` is non-null it receives the
  /// gradient, shaped like this network.
  double LossAndGradient(const Eigen::MatrixXd &x, const Eigen::MatrixXd &y,
                         MultiTaskNet *grad) const;

  /// this += alpha * other
  void Axpy(double alpha, const MultiTaskNet &other);

  /// Flat parameter access (w1, b1, w2, b2 in that order) for
  /// finite-difference checks and serialization.
  int64_t NumParams() const;
  double &Param(int64_t i);
  double Param(int64_t i) const;
  bool AllFinite() const;

  bool operator==(const MultiTaskNet &o) const {
    return w1_ == o.w1_ && b1_ == o.b1_ && w2_ == o.w2_ && b2_ == o.b2_;
  }

 private:
  Eigen::MatrixXd w1_;  // hidden x dim
  Eigen::VectorXd b1_;
  Eigen::MatrixXd w2_;  // 2C x hidden
  Eigen::VectorXd b2_;
};

enum class Supervision {
  kActionSets,  // head c targets "present" on every frame of a video whose set has c
  kFramewise,   // head c targets "present" exactly on frames labeled c
};

struct TrainConfig {
  int32_t hidden = 256;
  int32_t epochs = 10;
  int32_t batch_size = 512;
  double learning_rate = 0.01;
  int32_t frame_stride = 1;  // train on every n-th frame
  Supervision supervision = Supervision::kActionSets;
};

struct TrainResult {
  MultiTaskNet net;
  /// Full-pass training loss after each epoch.
  std::vector<double> loss_trace;
};

class DivergenceError : public NumericError {
 public:
  DivergenceError(const std::string &msg, MultiTaskNet last_finite)
      : NumericError(msg), last_finite_(std::move(last_finite)) {}
  const MultiTaskNet &last_finite() const { return last_finite_; }

 private:
  MultiTaskNet last_finite_;
};

/// Minibatch SGD on shuffled frames. Deterministic for a given seed.
TrainResult TrainMultiTaskNet(const Corpus &corpus, const TrainConfig &config,
                              uint64_t seed);

/// p(c | x) = p(c present | x) / sum_c' p(c' present | x), with each
/// presence probability floored at 1e-12 first.
Eigen::VectorXd PosteriorsFromPresence(const Eigen::VectorXd &present);
Eigen::VectorXd ClassPosteriors(const MultiTaskNet &net,
                                const Eigen::VectorXd &x);

/// Frame-level relative frequency of "c present" targets.
struct ClassPrior {
  std::vector<double> p;
  std::vector<bool> floored;  // class had zero count
};

ClassPrior ComputePrior(const Corpus &corpus,
                        Supervision supervision = Supervision::kActionSets);

struct FrameScorer {
  MultiTaskNet net;
  ClassPrior prior;
};

/// Entry (t, c) = log p(c | x_t) - log p(c), i.e. log p(x_t | c) up to a
/// per-frame constant shared by all classes.
FrameScores ComputeFrameScores(const FrameScorer &scorer,
                               const VideoRecord &video);

void WriteFrameScorer(const FrameScorer &scorer,
                      const std::filesystem::path &file);
/// Throws ParseError naming the file on any corruption.
FrameScorer ReadFrameScorer(const std::filesystem::path &file);

}  // namespace actset

#endif  // ACTSET_MULTITASK_NET_H_
