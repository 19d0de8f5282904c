// src/length-model.cc

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

#include "actset/length-model.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <Eigen/Dense>

#include "actset/text-util.h"

namespace actset {

namespace fs = std::filesystem;

MeanLengths EstimateNaive(const Corpus &corpus) {
  if (corpus.videos.empty())
    throw ValidationError("cannot estimate mean lengths from an empty corpus");
  const int32_t C = corpus.class_table.NumClasses();
  std::vector<double> sum(C, 0.0);
  std::vector<int64_t> n(C, 0);
  for (const VideoRecord &v : corpus.videos) {
    const double share =
        static_cast<double>(v.NumFrames()) / static_cast<double>(v.action_set.size());
    for (ClassId c : v.action_set) {
      sum[c] += share;
      n[c]++;
    }
  }
  MeanLengths out;
  out.lambda.assign(C, 0.0);
  out.imputed.assign(C, false);
  double global = 0.0;
  int32_t observed = 0;
  for (ClassId c = 0; c < C; c++)
    if (n[c] > 0) {
      out.lambda[c] = sum[c] / static_cast<double>(n[c]);
      global += out.lambda[c];
      observed++;
    }
  global /= observed;
  for (ClassId c = 0; c < C; c++)
    if (n[c] == 0) {
      out.lambda[c] = global;
      out.imputed[c] = true;
      ACTSET_WARN << "class '" << corpus.class_table.Name(c)
                  << "' occurs in no action set; using mean length " << global;
    }
  return out;
}

double CoupledLengthLoss(const Corpus &corpus,
                         const std::vector<double> &lambda) {
  double loss = 0.0;
  for (const VideoRecord &v : corpus.videos) {
    double r = -static_cast<double>(v.NumFrames());
    for (ClassId c : v.action_set) r += lambda[c];
    loss += r * r;
  }
  return loss;
}

namespace {

// Projected gradient for min x'Gx - 2b'x s.t. x >= lo, evaluated at x.
Eigen::VectorXd ProjectedGradient(const Eigen::MatrixXd &G,
                                  const Eigen::VectorXd &b,
                                  const Eigen::VectorXd &x, double lo) {
  Eigen::VectorXd g = 2.0 * (G * x - b);
  for (Eigen::Index c = 0; c < x.size(); c++)
    if (x(c) <= lo && g(c) > 0.0) g(c) = 0.0;
  return g;
}

// Exact minimizer with the variables in `at_bound` fixed to lo. Returns
// false if the solution leaves the feasible set.
bool SolveOnFreeSet(const Eigen::MatrixXd &G, const Eigen::VectorXd &b,
                    const std::vector<bool> &at_bound, double lo,
                    Eigen::VectorXd *x) {
  std::vector<Eigen::Index> free_idx;
  for (Eigen::Index c = 0; c < G.rows(); c++)
    if (!at_bound[c]) free_idx.push_back(c);
  Eigen::VectorXd cand = Eigen::VectorXd::Constant(G.rows(), lo);
  if (!free_idx.empty()) {
    const Eigen::Index nf = static_cast<Eigen::Index>(free_idx.size());
    Eigen::MatrixXd Gff(nf, nf);
    Eigen::VectorXd rhs(nf);
    for (Eigen::Index i = 0; i < nf; i++) {
      rhs(i) = b(free_idx[i]);
      for (Eigen::Index c = 0; c < G.rows(); c++)
        if (at_bound[c]) rhs(i) -= G(free_idx[i], c) * lo;
      for (Eigen::Index j = 0; j < nf; j++)
        Gff(i, j) = G(free_idx[i], free_idx[j]);
    }
    // Minimum-norm solution keeps this well defined when classes always
    // co-occur and the minimizer is not unique.
    Eigen::VectorXd sol = Gff.completeOrthogonalDecomposition().solve(rhs);
    for (Eigen::Index i = 0; i < nf; i++) {
      if (!std::isfinite(sol(i)) || sol(i) < lo) return false;
      cand(free_idx[i]) = sol(i);
    }
  }
  *x = cand;
  return true;
}

}  // namespace

MeanLengths EstimateLossBased(const Corpus &corpus, double l_min,
                              const LossBasedOptions &opts) {
  if (!(l_min >= 1.0)) throw ConfigError("l_min must be >= 1");
  MeanLengths naive = EstimateNaive(corpus);
  const int32_t C = corpus.class_table.NumClasses();

  // Normal-equation form: G = M'M, b = M'T with M the set-membership matrix.
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(C, C);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(C);
  for (const VideoRecord &v : corpus.videos) {
    for (ClassId c : v.action_set) {
      b(c) += static_cast<double>(v.NumFrames());
      for (ClassId o : v.action_set) G(c, o) += 1.0;
    }
  }
  const double lipschitz = 2.0 * G.rowwise().sum().maxCoeff();
  const double step = 1.0 / lipschitz;

  Eigen::VectorXd x(C);
  for (ClassId c = 0; c < C; c++) x(c) = std::max(naive.lambda[c], l_min);

  auto objective = [&](const Eigen::VectorXd &v) {
    return v.dot(G * v) - 2.0 * b.dot(v);
  };
  auto converged = [&](const Eigen::VectorXd &v, double *residual) {
    *residual = ProjectedGradient(G, b, v, l_min).norm();
    return *residual <= opts.tolerance * std::max(1.0, v.norm());
  };

  double residual = 0.0;
  for (int64_t it = 0; it <= opts.max_iterations; it++) {
    if (converged(x, &residual)) break;
    if (it == opts.max_iterations) {
      std::vector<double> best(x.data(), x.data() + x.size());
      throw ConvergenceError(
          "loss-based length estimation did not converge in " +
              std::to_string(opts.max_iterations) + " iterations (residual " +
              std::to_string(residual) + ")",
          best, residual);
    }
    Eigen::VectorXd g = 2.0 * (G * x - b);
    x = (x - step * g).cwiseMax(l_min);
    if (opts.polish_interval > 0 && (it + 1) % opts.polish_interval == 0) {
      std::vector<bool> at_bound(C);
      Eigen::VectorXd grad = 2.0 * (G * x - b);
      for (ClassId c = 0; c < C; c++)
        at_bound[c] = x(c) <= l_min && grad(c) >= 0.0;
      Eigen::VectorXd polished;
      if (SolveOnFreeSet(G, b, at_bound, l_min, &polished) &&
          objective(polished) <= objective(x))
        x = polished;
    }
  }

  MeanLengths out;
  out.lambda.assign(x.data(), x.data() + x.size());
  out.imputed = naive.imputed;
  return out;
}

MeanLengths EstimateLossBasedDecoupled(const Corpus &corpus, double l_min) {
  if (!(l_min >= 1.0)) throw ConfigError("l_min must be >= 1");
  MeanLengths naive = EstimateNaive(corpus);
  const int32_t C = corpus.class_table.NumClasses();
  std::vector<double> sum(C, 0.0);
  std::vector<int64_t> n(C, 0);
  for (const VideoRecord &v : corpus.videos)
    for (ClassId c : v.action_set) {
      sum[c] += static_cast<double>(v.NumFrames());
      n[c]++;
    }
  MeanLengths out = naive;
  for (ClassId c = 0; c < C; c++) {
    if (n[c] > 0) out.lambda[c] = sum[c] / static_cast<double>(n[c]);
    out.lambda[c] = std::max(out.lambda[c], l_min);
  }
  return out;
}

std::string LengthKindName(LengthKind kind) {
  switch (kind) {
    case LengthKind::kPoisson: return "poisson";
    case LengthKind::kGaussian: return "gaussian";
    case LengthKind::kBox: return "box";
    case LengthKind::kTriangle: return "triangle";
  }
  return "unknown";
}

LengthKind ParseLengthKind(const std::string &name) {
  if (name == "poisson") return LengthKind::kPoisson;
  if (name == "gaussian") return LengthKind::kGaussian;
  if (name == "box") return LengthKind::kBox;
  if (name == "triangle") return LengthKind::kTriangle;
  throw ConfigError("unknown length kind '" + name + "'");
}

namespace {

double LogSumExp(const std::vector<double> &v) {
  double m = kLogZero;
  for (double x : v) m = std::max(m, x);
  if (m == kLogZero) return kLogZero;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double TriangleWeight(double mu, double sigma, int64_t l) {
  return 1.0 - std::abs(static_cast<double>(l) - mu) / sigma;
}

}  // namespace

LengthModel::LengthModel(LengthKind kind, std::vector<double> lambda,
                         std::vector<double> sigma, int64_t max_length)
    : kind_(kind), lambda_(std::move(lambda)), sigma_(std::move(sigma)) {
  const int32_t C = NumClasses();
  if (C == 0) throw ValidationError("length model needs at least one class");
  if (sigma_.empty()) sigma_.assign(C, 0.0);
  if (static_cast<int32_t>(sigma_.size()) != C)
    throw ValidationError("sigma table does not match the class count");
  for (ClassId c = 0; c < C; c++) {
    if (!(lambda_[c] > 0.0) || !std::isfinite(lambda_[c]))
      throw ValidationError("mean length must be positive and finite");
    if (kind_ != LengthKind::kPoisson &&
        (!(sigma_[c] > 0.0) || !std::isfinite(sigma_[c])))
      throw ValidationError(LengthKindName(kind_) +
                            " length model needs positive sigma");
  }
  max_length_ = max_length;
  if (max_length_ <= 0) {
    double m = 0.0;
    for (ClassId c = 0; c < C; c++) m = std::max(m, lambda_[c] + 5.0 * Spread(c));
    max_length_ = std::max<int64_t>(1, static_cast<int64_t>(std::ceil(m)));
  }
  if (kind_ == LengthKind::kPoisson) return;

  lo_.assign(C, 1);
  hi_.assign(C, max_length_);
  log_norm_.assign(C, 0.0);
  for (ClassId c = 0; c < C; c++) {
    const double mu = lambda_[c], sd = sigma_[c];
    if (kind_ == LengthKind::kBox || kind_ == LengthKind::kTriangle) {
      lo_[c] = std::max<int64_t>(1, static_cast<int64_t>(std::ceil(mu - sd)));
      hi_[c] = std::min<int64_t>(max_length_,
                                 static_cast<int64_t>(std::floor(mu + sd)));
      if (kind_ == LengthKind::kTriangle) {
        // zero-weight end points are not part of the support
        while (lo_[c] <= hi_[c] && TriangleWeight(mu, sd, lo_[c]) <= 0.0) lo_[c]++;
        while (hi_[c] >= lo_[c] && TriangleWeight(mu, sd, hi_[c]) <= 0.0) hi_[c]--;
      }
      if (lo_[c] > hi_[c]) {
        // Degenerate support: point mass at the nearest valid length.
        lo_[c] = hi_[c] = std::max<int64_t>(1, std::llround(mu));
        continue;
      }
    }
    std::vector<double> terms;
    terms.reserve(hi_[c] - lo_[c] + 1);
    for (int64_t l = lo_[c]; l <= hi_[c]; l++) {
      double d = static_cast<double>(l) - mu;
      switch (kind_) {
        case LengthKind::kGaussian: terms.push_back(-d * d / (2.0 * sd * sd)); break;
        case LengthKind::kBox: terms.push_back(0.0); break;
        case LengthKind::kTriangle:
          terms.push_back(std::log(TriangleWeight(mu, sd, l)));
          break;
        case LengthKind::kPoisson: break;
      }
    }
    log_norm_[c] = LogSumExp(terms);
  }
}

double LengthModel::Spread(ClassId c) const {
  return kind_ == LengthKind::kPoisson ? std::sqrt(lambda_[c]) : sigma_[c];
}

double LengthModel::LogPmf(ClassId c, int64_t l) const {
  if (kind_ == LengthKind::kPoisson) {
    if (l < 0) return kLogZero;
    const double x = static_cast<double>(l);
    return x * std::log(lambda_[c]) - lambda_[c] - std::lgamma(x + 1.0);
  }
  if (l < lo_[c] || l > hi_[c]) return kLogZero;
  const double mu = lambda_[c], sd = sigma_[c];
  const double d = static_cast<double>(l) - mu;
  switch (kind_) {
    case LengthKind::kGaussian: return -d * d / (2.0 * sd * sd) - log_norm_[c];
    case LengthKind::kBox: return -std::log(static_cast<double>(hi_[c] - lo_[c] + 1));
    case LengthKind::kTriangle: {
      if (lo_[c] == hi_[c]) return 0.0;
      return std::log(TriangleWeight(mu, sd, l)) - log_norm_[c];
    }
    case LengthKind::kPoisson: break;
  }
  return kLogZero;
}

SigmaEstimate EstimateSigma(const Corpus &corpus,
                            const std::vector<SampledSequence> &samples,
                            const std::vector<double> &lambda,
                            double sigma_min) {
  const int32_t C = corpus.class_table.NumClasses();
  if (static_cast<int32_t>(lambda.size()) != C)
    throw ValidationError("mean length table does not match the class table");
  std::vector<std::vector<double>> alloc(C);
  for (const SampledSequence &s : samples) {
    if (s.video_index >= corpus.videos.size())
      throw ValidationError("sampled sequence refers to an unknown video");
    double total = 0.0;
    for (ClassId c : s.labels) total += lambda[c];
    if (!(total > 0.0)) continue;
    const double T = static_cast<double>(corpus.videos[s.video_index].NumFrames());
    for (ClassId c : s.labels) alloc[c].push_back(T * lambda[c] / total);
  }
  SigmaEstimate out;
  out.sigma.assign(C, sigma_min);
  out.floored.assign(C, true);
  for (ClassId c = 0; c < C; c++) {
    const std::vector<double> &a = alloc[c];
    if (a.size() < 2) continue;
    double mean = 0.0;
    for (double x : a) mean += x;
    mean /= static_cast<double>(a.size());
    double ss = 0.0;
    for (double x : a) ss += (x - mean) * (x - mean);
    double sd = std::sqrt(ss / static_cast<double>(a.size() - 1));
    out.floored[c] = false;
    out.sigma[c] = std::max(sigma_min, sd);
  }
  return out;
}

void WriteLengthModel(const LengthModel &model, const ClassTable &table,
                      const fs::path &file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream os(file);
  if (!os) throw Error("cannot write " + file.string());
  os << LengthKindName(model.kind()) << '\n';
  for (ClassId c = 0; c < model.NumClasses(); c++)
    os << table.Name(c) << ' ' << FormatDouble(model.Mean(c)) << ' '
       << FormatDouble(model.Sigma(c)) << '\n';
}

LengthModel ReadLengthModel(const fs::path &file, const ClassTable &table) {
  std::ifstream is(file);
  if (!is) throw ValidationError("cannot open length model " + file.string());
  std::string line;
  int64_t line_no = 0;
  std::optional<LengthKind> kind;
  const int32_t C = table.NumClasses();
  std::vector<double> lambda(C, 0.0), sigma(C, 0.0);
  std::vector<bool> seen(C, false);
  while (std::getline(is, line)) {
    line_no++;
    std::vector<std::string> f = SplitWhitespace(line);
    if (f.empty()) continue;
    if (!kind) {
      if (f.size() != 1)
        throw ParseError(file.string(), line_no, "expected the length kind");
      try {
        kind = ParseLengthKind(f[0]);
      } catch (const ConfigError &e) {
        throw ParseError(file.string(), line_no, e.what());
      }
      continue;
    }
    if (f.size() != 3)
      throw ParseError(file.string(), line_no, "expected `name lambda sigma`");
    std::optional<ClassId> c = table.Find(f[0]);
    if (!c)
      throw ParseError(file.string(), line_no, "unknown class '" + f[0] + "'");
    lambda[*c] = ParseDouble(f[1], file.string(), line_no);
    sigma[*c] = ParseDouble(f[2], file.string(), line_no);
    seen[*c] = true;
  }
  if (!kind) throw ParseError(file.string(), line_no, "empty length model");
  for (ClassId c = 0; c < C; c++)
    if (!seen[c])
      throw ValidationError(file.string() + ": no entry for class '" +
                            table.Name(c) + "'");
  return LengthModel(*kind, std::move(lambda), std::move(sigma));
}

std::vector<double> ReadMeanLengths(const fs::path &file,
                                    const ClassTable &table) {
  std::ifstream is(file);
  if (!is) throw ValidationError("cannot open mean length file " + file.string());
  std::vector<double> lambda(table.NumClasses(), 0.0);
  std::vector<bool> seen(table.NumClasses(), false);
  std::string line;
  int64_t line_no = 0;
  while (std::getline(is, line)) {
    line_no++;
    std::vector<std::string> f = SplitWhitespace(line);
    if (f.empty()) continue;
    if (f.size() != 2)
      throw ParseError(file.string(), line_no, "expected `name lambda`");
    std::optional<ClassId> c = table.Find(f[0]);
    if (!c)
      throw ParseError(file.string(), line_no, "unknown class '" + f[0] + "'");
    lambda[*c] = ParseDouble(f[1], file.string(), line_no);
    if (!(lambda[*c] > 0))
      throw ParseError(file.string(), line_no, "mean length must be positive");
    seen[*c] = true;
  }
  for (ClassId c = 0; c < table.NumClasses(); c++)
    if (!seen[c])
      throw ValidationError(file.string() + ": no mean for class '" +
                            table.Name(c) + "'");
  return lambda;
}

}  // namespace actset
