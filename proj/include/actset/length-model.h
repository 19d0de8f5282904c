// actset/length-model.h

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

#ifndef ACTSET_LENGTH_MODEL_H_
#define ACTSET_LENGTH_MODEL_H_

#include <filesystem>
#include <string>
#include <vector>

#include "actset/corpus.h"
#include "actset/grammar.h"

namespace actset {

/// Per-class mean segment length in frames.
struct MeanLengths {
  std::vector<double> lambda;
  /// True for classes that occur in no training action set; their value
  /// is imputed rather than estimated.
  std::vector<bool> imputed;
};

/// Frames of each video shared evenly among its action set, averaged over
/// the videos containing the class. Throws ValidationError on an empty
/// corpus.
MeanLengths EstimateNaive(const Corpus &corpus);

struct LossBasedOptions {
  int64_t max_iterations = 100000;
  /// Stop when the projected gradient norm is below
  /// tolerance * max(1, |lambda|).
  double tolerance = 1e-6;
  /// Attempt an exact solve on the current free set every this many
  /// gradient steps (0 disables it and leaves plain projected gradient).
  int64_t polish_interval = 50;
};

/// Raised when the loss-based estimator exhausts its iteration budget.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string &msg, std::vector<double> best,
                   double residual)
      : NumericError(msg), best_(std::move(best)), residual_(residual) {}
  const std::vector<double> &best() const { return best_; }
  double residual() const { return residual_; }

 private:
  std::vector<double> best_;
  double residual_;
};

/// sum_i (sum_{c in A_i} lambda_c - T_i)^2.
double CoupledLengthLoss(const Corpus &corpus,
                         const std::vector<double> &lambda);

/// Minimizes CoupledLengthLoss subject to lambda_c >= l_min by projected
/// gradient descent started from the naive estimate.
MeanLengths EstimateLossBased(const Corpus &corpus, double l_min,
                              const LossBasedOptions &opts = {});

/// The per-class separable variant sum_i sum_{c in A_i} (lambda_c - T_i)^2;
/// its minimizer is the mean length of the videos containing c, clipped to
/// l_min.
MeanLengths EstimateLossBasedDecoupled(const Corpus &corpus, double l_min);

enum class LengthKind { kPoisson, kGaussian, kBox, kTriangle };

std::string LengthKindName(LengthKind kind);
/// Throws ConfigError for unknown names.
LengthKind ParseLengthKind(const std::string &name);

/// Class-conditional segment length distributions p(l | c).
///
/// Poisson is defined on l >= 0 and never truncated. The others are
/// discrete and renormalized on their support: gaussian on [1, MaxLength()],
/// box and triangle on the integers of [mu - sigma, mu + sigma] clipped to
/// l >= 1 (triangle end points carry zero mass).
class LengthModel {
 public:
  LengthModel() = default;
  /// `sigma` may be empty for Poisson. If max_length is 0 it becomes
  /// ceil(max_c(lambda_c + 5 * Spread(c))).
  LengthModel(LengthKind kind, std::vector<double> lambda,
              std::vector<double> sigma, int64_t max_length = 0);

  LengthKind kind() const { return kind_; }
  int32_t NumClasses() const { return static_cast<int32_t>(lambda_.size()); }
  double Mean(ClassId c) const { return lambda_[c]; }
  double Sigma(ClassId c) const { return sigma_[c]; }
  const std::vector<double> &Means() const { return lambda_; }
  const std::vector<double> &Sigmas() const { return sigma_; }
  /// sigma for the discrete kinds, sqrt(lambda) for Poisson.
  double Spread(ClassId c) const;
  int64_t MaxLength() const { return max_length_; }

  /// log p(l | c), kLogZero outside the support.
  double LogPmf(ClassId c, int64_t l) const;

 private:
  LengthKind kind_ = LengthKind::kPoisson;
  std::vector<double> lambda_;
  std::vector<double> sigma_;
  int64_t max_length_ = 0;
  std::vector<int64_t> lo_, hi_;     // support bounds for non-Poisson kinds
  std::vector<double> log_norm_;     // log of the normalizer over the support
};

struct SigmaEstimate {
  std::vector<double> sigma;
  std::vector<bool> floored;  // fewer than two observations
};

/// Spreads each sampled sequence's source video length over its labels in
/// proportion to lambda, and takes the per-class sample standard deviation
/// of the allocated lengths, floored at sigma_min.
SigmaEstimate EstimateSigma(const Corpus &corpus,
                            const std::vector<SampledSequence> &samples,
                            const std::vector<double> &lambda,
                            double sigma_min = 15.0);

/// `kind` on the first line, then `name lambda sigma` per class.
void WriteLengthModel(const LengthModel &model, const ClassTable &table,
                      const std::filesystem::path &file);
LengthModel ReadLengthModel(const std::filesystem::path &file,
                            const ClassTable &table);

/// `name lambda` per line, for externally supplied means.
std::vector<double> ReadMeanLengths(const std::filesystem::path &file,
                                    const ClassTable &table);

}  // namespace actset

#endif  // ACTSET_LENGTH_MODEL_H_
