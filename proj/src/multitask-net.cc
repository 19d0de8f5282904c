// src/multitask-net.cc

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

#include "actset/multitask-net.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace actset {

namespace fs = std::filesystem;

namespace {

constexpr double kProbFloor = 1e-12;

// log(exp(a) + exp(b))
inline double LogAdd(double a, double b) {
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

FrameScores::FrameScores(Eigen::MatrixXd log_scores)
    : entries_(std::move(log_scores)) {
  if (!entries_.allFinite())
    throw NumericError("frame scores contain non-finite values");
  prefix_ = Eigen::MatrixXd::Zero(entries_.rows() + 1, entries_.cols());
  for (Eigen::Index t = 0; t < entries_.rows(); t++)
    prefix_.row(t + 1) = prefix_.row(t) + entries_.row(t);
}

MultiTaskNet::MultiTaskNet(int32_t dim, int32_t hidden, int32_t num_classes)
    : w1_(Eigen::MatrixXd::Zero(hidden, dim)),
      b1_(Eigen::VectorXd::Zero(hidden)),
      w2_(Eigen::MatrixXd::Zero(2 * num_classes, hidden)),
      b2_(Eigen::VectorXd::Zero(2 * num_classes)) {
  if (dim < 1 || hidden < 1 || num_classes < 1)
    throw ConfigError("network dimensions must be positive");
}

void MultiTaskNet::InitRandom(RandomEngine *rng) {
  std::uniform_real_distribution<double> u1(-1.0 / std::sqrt(Dim()),
                                            1.0 / std::sqrt(Dim()));
  std::uniform_real_distribution<double> u2(-1.0 / std::sqrt(Hidden()),
                                            1.0 / std::sqrt(Hidden()));
  for (Eigen::Index i = 0; i < w1_.rows(); i++)
    for (Eigen::Index j = 0; j < w1_.cols(); j++) w1_(i, j) = u1(*rng);
  for (Eigen::Index i = 0; i < w2_.rows(); i++)
    for (Eigen::Index j = 0; j < w2_.cols(); j++) w2_(i, j) = u2(*rng);
  b1_.setZero();
  b2_.setZero();
}

Eigen::MatrixXd MultiTaskNet::PresentProbs(const Eigen::MatrixXd &x) const {
  Eigen::MatrixXd hidden =
      ((x * w1_.transpose()).rowwise() + b1_.transpose()).cwiseMax(0.0);
  Eigen::MatrixXd logits = (hidden * w2_.transpose()).rowwise() + b2_.transpose();
  const int32_t C = NumClasses();
  Eigen::MatrixXd out(x.rows(), C);
  for (Eigen::Index t = 0; t < x.rows(); t++)
    for (int32_t c = 0; c < C; c++) {
      // softmax over (absent, present) == sigmoid of the logit difference
      double d = logits(t, 2 * c + 1) - logits(t, 2 * c);
      out(t, c) = d >= 0 ? 1.0 / (1.0 + std::exp(-d))
                         : std::exp(d) / (1.0 + std::exp(d));
    }
  return out;
}

double MultiTaskNet::LossAndGradient(const Eigen::MatrixXd &x,
                                     const Eigen::MatrixXd &y,
                                     MultiTaskNet *grad) const {
  const Eigen::Index B = x.rows();
  const int32_t C = NumClasses();
  Eigen::MatrixXd pre = (x * w1_.transpose()).rowwise() + b1_.transpose();
  Eigen::MatrixXd hidden = pre.cwiseMax(0.0);
  Eigen::MatrixXd logits = (hidden * w2_.transpose()).rowwise() + b2_.transpose();

  double loss = 0.0;
  Eigen::MatrixXd dlogits(B, 2 * C);
  for (Eigen::Index t = 0; t < B; t++) {
    for (int32_t c = 0; c < C; c++) {
      double z0 = logits(t, 2 * c), z1 = logits(t, 2 * c + 1);
      double lse = LogAdd(z0, z1);
      double target = y(t, c);
      loss -= (1.0 - target) * (z0 - lse) + target * (z1 - lse);
      dlogits(t, 2 * c) = std::exp(z0 - lse) - (1.0 - target);
      dlogits(t, 2 * c + 1) = std::exp(z1 - lse) - target;
    }
  }
  loss /= static_cast<double>(B);
  if (grad == nullptr) return loss;

  dlogits /= static_cast<double>(B);
  *grad = MultiTaskNet(Dim(), Hidden(), C);
  grad->w2_ = dlogits.transpose() * hidden;
  grad->b2_ = dlogits.colwise().sum().transpose();
  Eigen::MatrixXd dpre = (dlogits * w2_).cwiseProduct(
      (pre.array() > 0.0).cast<double>().matrix());
  grad->w1_ = dpre.transpose() * x;
  grad->b1_ = dpre.colwise().sum().transpose();
  return loss;
}

void MultiTaskNet::Axpy(double alpha, const MultiTaskNet &other) {
  w1_ += alpha * other.w1_;
  b1_ += alpha * other.b1_;
  w2_ += alpha * other.w2_;
  b2_ += alpha * other.b2_;
}

int64_t MultiTaskNet::NumParams() const {
  return w1_.size() + b1_.size() + w2_.size() + b2_.size();
}

double &MultiTaskNet::Param(int64_t i) {
  if (i < w1_.size()) return w1_.data()[i];
  i -= w1_.size();
  if (i < b1_.size()) return b1_.data()[i];
  i -= b1_.size();
  if (i < w2_.size()) return w2_.data()[i];
  i -= w2_.size();
  return b2_.data()[i];
}

double MultiTaskNet::Param(int64_t i) const {
  return const_cast<MultiTaskNet *>(this)->Param(i);
}

bool MultiTaskNet::AllFinite() const {
  return w1_.allFinite() && b1_.allFinite() && w2_.allFinite() &&
         b2_.allFinite();
}

namespace {


void FillBatch(const Corpus &corpus, const TrainConfig &config,
               const std::vector<std::pair<int32_t, int64_t>> &frames,
               size_t begin, size_t end, Eigen::MatrixXd *x,
               Eigen::MatrixXd *y) {
  const int64_t d = corpus.Dim();
  const int32_t C = corpus.class_table.NumClasses();
  x->resize(static_cast<Eigen::Index>(end - begin), d);
  y->setZero(static_cast<Eigen::Index>(end - begin), C);
  for (size_t r = begin; r < end; r++) {
    const auto [vi, t] = frames[r];
    const VideoRecord &v = corpus.videos[vi];
    const Eigen::Index row = static_cast<Eigen::Index>(r - begin);
    x->row(row) = v.features.row(t).cast<double>();
    if (config.supervision == Supervision::kActionSets) {
      for (ClassId c : v.action_set) (*y)(row, c) = 1.0;
    } else {
      (*y)(row, (*v.gt_labels)[t]) = 1.0;
    }
  }
}

double FullLoss(const MultiTaskNet &net, const Corpus &corpus,
                const TrainConfig &config,
                const std::vector<std::pair<int32_t, int64_t>> &frames) {
  const size_t chunk = 4096;
  double total = 0.0;
  Eigen::MatrixXd x, y;
  for (size_t b = 0; b < frames.size(); b += chunk) {
    size_t e = std::min(frames.size(), b + chunk);
    FillBatch(corpus, config, frames, b, e, &x, &y);
    total += net.LossAndGradient(x, y, nullptr) * static_cast<double>(e - b);
  }
  return total / static_cast<double>(frames.size());
}

}  // namespace

TrainResult TrainMultiTaskNet(const Corpus &corpus, const TrainConfig &config,
                              uint64_t seed) {
  if (corpus.videos.empty())
    throw ConfigError("cannot train on an empty corpus");
  if (config.epochs < 0 || config.batch_size < 1 || config.frame_stride < 1 ||
      !(config.learning_rate > 0.0))
    throw ConfigError("invalid training hyperparameters");
  if (config.supervision == Supervision::kFramewise)
    for (const VideoRecord &v : corpus.videos)
      if (!v.gt_labels)
        throw ConfigError("framewise supervision needs ground truth for '" +
                          v.id + "'");

  RandomEngine rng(seed);
  TrainResult result;
  result.net = MultiTaskNet(static_cast<int32_t>(corpus.Dim()), config.hidden,
                            corpus.class_table.NumClasses());
  result.net.InitRandom(&rng);

  std::vector<std::pair<int32_t, int64_t>> frames;
  for (size_t i = 0; i < corpus.videos.size(); i++)
    for (int64_t t = 0; t < corpus.videos[i].NumFrames(); t += config.frame_stride)
      frames.push_back({static_cast<int32_t>(i), t});

  std::vector<std::pair<int32_t, int64_t>> order = frames;
  Eigen::MatrixXd x, y;
  MultiTaskNet grad;
  for (int32_t epoch = 0; epoch < config.epochs; epoch++) {
    MultiTaskNet last_finite = result.net;
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t b = 0; b < order.size(); b += config.batch_size) {
      size_t e = std::min(order.size(), b + static_cast<size_t>(config.batch_size));
      FillBatch(corpus, config, order, b, e, &x, &y);
      double loss = result.net.LossAndGradient(x, y, &grad);
      if (!std::isfinite(loss))
        throw DivergenceError("training loss became non-finite in epoch " +
                                  std::to_string(epoch + 1),
                              last_finite);
      result.net.Axpy(-config.learning_rate, grad);
    }
    double epoch_loss = FullLoss(result.net, corpus, config, frames);
    if (!std::isfinite(epoch_loss) || !result.net.AllFinite())
      throw DivergenceError("training diverged in epoch " +
                                std::to_string(epoch + 1),
                            last_finite);
    result.loss_trace.push_back(epoch_loss);
  }
  return result;
}

Eigen::VectorXd PosteriorsFromPresence(const Eigen::VectorXd &present) {
  Eigen::VectorXd p = present.cwiseMax(kProbFloor);
  return p / p.sum();
}

Eigen::VectorXd ClassPosteriors(const MultiTaskNet &net,
                                const Eigen::VectorXd &x) {
  if (x.size() != net.Dim())
    throw ValidationError("frame dimension does not match the network");
  Eigen::MatrixXd probs = net.PresentProbs(x.transpose());
  return PosteriorsFromPresence(probs.row(0).transpose());
}

ClassPrior ComputePrior(const Corpus &corpus, Supervision supervision) {
  if (corpus.videos.empty())
    throw ValidationError("cannot compute a class prior from an empty corpus");
  const int32_t C = corpus.class_table.NumClasses();
  std::vector<double> count(C, 0.0);
  for (const VideoRecord &v : corpus.videos) {
    if (supervision == Supervision::kActionSets) {
      for (ClassId c : v.action_set) count[c] += static_cast<double>(v.NumFrames());
    } else {
      if (!v.gt_labels)
        throw ConfigError("framewise prior needs ground truth for '" + v.id + "'");
      for (ClassId c : *v.gt_labels) count[c] += 1.0;
    }
  }
  ClassPrior prior;
  prior.floored.assign(C, false);
  const double total = std::accumulate(count.begin(), count.end(), 0.0);
  prior.p.resize(C);
  for (ClassId c = 0; c < C; c++) {
    prior.p[c] = count[c] / total;
    if (count[c] == 0.0) {
      prior.p[c] = kProbFloor;
      prior.floored[c] = true;
      ACTSET_WARN << "class '" << corpus.class_table.Name(c)
                  << "' never present in training; prior floored";
    }
  }
  const double norm = std::accumulate(prior.p.begin(), prior.p.end(), 0.0);
  for (double &p : prior.p) p /= norm;
  return prior;
}

FrameScores ComputeFrameScores(const FrameScorer &scorer,
                               const VideoRecord &video) {
  const MultiTaskNet &net = scorer.net;
  if (video.Dim() != net.Dim())
    throw ValidationError("video '" + video.id + "' has d=" +
                          std::to_string(video.Dim()) +
                          " but the network expects d=" +
                          std::to_string(net.Dim()));
  if (static_cast<int32_t>(scorer.prior.p.size()) != net.NumClasses())
    throw ValidationError("class prior does not match the network");
  Eigen::MatrixXd probs = net.PresentProbs(video.features.cast<double>());
  const int32_t C = net.NumClasses();
  Eigen::MatrixXd scores(probs.rows(), C);
  for (Eigen::Index t = 0; t < probs.rows(); t++) {
    Eigen::VectorXd post = PosteriorsFromPresence(probs.row(t).transpose());
    for (int32_t c = 0; c < C; c++)
      scores(t, c) = std::log(post(c)) - std::log(scorer.prior.p[c]);
  }
  return FrameScores(std::move(scores));
}

// ---- Model file ----------------------------------------------------------
//
// "ACTSETNN" | u32 version | u32 d | u32 H | u32 C | f32 params[] |
// f64 prior[C], all little-endian.

namespace {

const char kModelMagic[8] = {'A', 'C', 'T', 'S', 'E', 'T', 'N', 'N'};
constexpr uint32_t kModelVersion = 1;

template <typename U>
U ToLittle(U v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  U out = 0;
  for (size_t i = 0; i < sizeof(U); i++) {
    out = static_cast<U>((out << 8) | (v & 0xff));
    v >>= 8;
  }
  return out;
}

template <typename U>
void Put(std::ostream &os, U v) {
  v = ToLittle(v);
  os.write(reinterpret_cast<const char *>(&v), sizeof(v));
}

template <typename U>
bool Get(std::istream &is, U *v) {
  if (!is.read(reinterpret_cast<char *>(v), sizeof(*v))) return false;
  *v = ToLittle(*v);
  return true;
}

}  // namespace

void WriteFrameScorer(const FrameScorer &scorer, const fs::path &file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot write " + file.string());
  const MultiTaskNet &net = scorer.net;
  os.write(kModelMagic, sizeof(kModelMagic));
  Put<uint32_t>(os, kModelVersion);
  Put<uint32_t>(os, net.Dim());
  Put<uint32_t>(os, net.Hidden());
  Put<uint32_t>(os, net.NumClasses());
  for (int64_t i = 0; i < net.NumParams(); i++)
    Put<uint32_t>(os, std::bit_cast<uint32_t>(static_cast<float>(net.Param(i))));
  for (double p : scorer.prior.p) Put<uint64_t>(os, std::bit_cast<uint64_t>(p));
  if (!os) throw Error("failed writing " + file.string());
}

FrameScorer ReadFrameScorer(const fs::path &file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw ValidationError("cannot open model file " + file.string());
  auto fail = [&](const std::string &what) {
    return ParseError(file.string(), 1, "corrupt model file: " + what);
  };
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kModelMagic, 8) != 0)
    throw fail("bad magic");
  uint32_t version, d, h, c;
  if (!Get(is, &version) || !Get(is, &d) || !Get(is, &h) || !Get(is, &c))
    throw fail("truncated header");
  if (version != kModelVersion)
    throw fail("unsupported version " + std::to_string(version));
  if (d == 0 || h == 0 || c == 0 || d > (1u << 20) || h > (1u << 20) ||
      c > (1u << 16))
    throw fail("implausible dimensions");
  FrameScorer scorer;
  scorer.net = MultiTaskNet(d, h, c);
  for (int64_t i = 0; i < scorer.net.NumParams(); i++) {
    uint32_t bits;
    if (!Get(is, &bits)) throw fail("truncated parameters");
    scorer.net.Param(i) = static_cast<double>(std::bit_cast<float>(bits));
  }
  scorer.prior.p.resize(c);
  scorer.prior.floored.assign(c, false);
  for (uint32_t k = 0; k < c; k++) {
    uint64_t bits;
    if (!Get(is, &bits)) throw fail("truncated prior");
    scorer.prior.p[k] = std::bit_cast<double>(bits);
    if (!(scorer.prior.p[k] > 0.0)) throw fail("non-positive prior");
  }
  if (is.peek() != std::char_traits<char>::eof()) throw fail("trailing data");
  if (!scorer.net.AllFinite()) throw fail("non-finite parameters");
  return scorer;
}

}  // namespace actset
