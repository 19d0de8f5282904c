// src/grammar-sampling.cc

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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <unordered_map>

#include "actset/grammar.h"

namespace actset {

namespace {

// Every categorical draw consumes exactly one uniform variate, so samplers
// that differ only in their weights stay in lock-step on the same seed.
size_t UniformIndex(double u, size_t n) {
  return std::min(n - 1, static_cast<size_t>(u * static_cast<double>(n)));
}

size_t WeightedIndex(double u, const std::vector<double> &weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) return UniformIndex(u, weights.size());
  double target = u * total, cum = 0.0;
  for (size_t j = 0; j < weights.size(); j++) {
    cum += weights[j];
    if (target < cum) return j;
  }
  // Rounding can leave target == total; return the last positive weight.
  for (size_t j = weights.size(); j-- > 0;)
    if (weights[j] > 0.0) return j;
  return weights.size() - 1;
}

void CheckSamplingInputs(const Corpus &corpus, const std::vector<double> &means,
                         int64_t k) {
  if (corpus.videos.empty())
    throw ConfigError("grammar sampling needs a non-empty corpus");
  if (k < 1) throw ConfigError("number of sampled sequences must be >= 1");
  if (static_cast<int32_t>(means.size()) != corpus.class_table.NumClasses())
    throw ConfigError("mean length table does not match the class table");
  for (const VideoRecord &v : corpus.videos)
    for (ClassId c : v.action_set)
      if (!(means[c] > 0.0) || !std::isfinite(means[c]))
        throw ConfigError("mean length of class '" +
                          corpus.class_table.Name(c) + "' must be positive");
}

/// `choose(previous, candidates, u)` returns an index into candidates;
/// previous is -1 for the first label of a sequence.
template <typename Chooser>
SampledGrammar SampleGrammar(const Corpus &corpus,
                             const std::vector<double> &means, int64_t k,
                             uint64_t seed, Chooser choose) {
  CheckSamplingInputs(corpus, means, k);
  RandomEngine rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SampledGrammar out;
  out.samples.reserve(k);
  std::vector<LabelSequence> sequences;
  sequences.reserve(k);
  for (int64_t n = 0; n < k; n++) {
    size_t i = UniformIndex(unit(rng), corpus.videos.size());
    const VideoRecord &video = corpus.videos[i];
    std::vector<ClassId> candidates(video.action_set.begin(),
                                    video.action_set.end());
    const double length = static_cast<double>(video.NumFrames());
    SampledSequence sample{{}, i};
    double total = 0.0;
    ClassId previous = -1;
    do {
      ClassId c = candidates[choose(previous, candidates, unit(rng))];
      sample.labels.push_back(c);
      total += means[c];
      previous = c;
    } while (total <= length);
    sequences.push_back(sample.labels);
    out.samples.push_back(std::move(sample));
  }
  out.automaton = CompilePrefixTree(std::move(sequences));
  return out;
}

std::vector<std::string> SplitClassName(const std::string &name) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : name) {
    if (ch == '_') {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

}  // namespace

void BigramStats::Normalize() {
  const size_t C = static_cast<size_t>(num_classes);
  probs.assign(C * C, 0.0);
  uniform_row.assign(C, false);
  for (size_t v = 0; v < C; v++) {
    int64_t total = 0;
    for (size_t w = 0; w < C; w++) total += counts[v * C + w];
    if (total == 0) {
      uniform_row[v] = true;
      for (size_t w = 0; w < C; w++) probs[v * C + w] = 1.0 / C;
    } else {
      for (size_t w = 0; w < C; w++)
        probs[v * C + w] = static_cast<double>(counts[v * C + w]) / total;
    }
  }
}

SampledGrammar BuildMonteCarlo(const Corpus &corpus,
                               const std::vector<double> &means, int64_t k,
                               uint64_t seed) {
  return SampleGrammar(corpus, means, k, seed,
                       [](ClassId, const std::vector<ClassId> &cand, double u) {
                         return UniformIndex(u, cand.size());
                       });
}

SampledGrammar BuildTextBased(const Corpus &corpus,
                              const std::vector<double> &means, int64_t k,
                              uint64_t seed, const BigramStats &stats) {
  if (stats.num_classes != corpus.class_table.NumClasses())
    throw ConfigError("bigram statistics do not match the class table");
  std::vector<double> weights;
  return SampleGrammar(
      corpus, means, k, seed,
      [&](ClassId previous, const std::vector<ClassId> &cand, double u) {
        if (previous < 0 || stats.uniform_row[previous])
          return UniformIndex(u, cand.size());
        weights.clear();
        for (ClassId w : cand) weights.push_back(stats.Prob(previous, w));
        return WeightedIndex(u, weights);
      });
}

std::vector<std::vector<std::string>> TokenizeSentences(
    const std::string &text) {
  std::vector<std::vector<std::string>> sentences(1);
  std::string token;
  auto flush = [&]() {
    if (!token.empty()) sentences.back().push_back(token);
    token.clear();
  };
  for (char ch : text) {
    unsigned char uc = static_cast<unsigned char>(ch);
    if (ch == '.' || ch == '!' || ch == '?' || ch == ';') {
      flush();
      if (!sentences.back().empty()) sentences.emplace_back();
    } else if (std::isalnum(uc)) {
      token.push_back(static_cast<char>(std::tolower(uc)));
    } else {
      flush();
    }
  }
  flush();
  if (sentences.back().empty()) sentences.pop_back();
  return sentences;
}

BigramStats MineBigrams(const std::vector<std::string> &texts,
                        const ClassTable &classes, int32_t window) {
  if (window < 1) throw ConfigError("text window must be >= 1");
  const int32_t C = classes.NumClasses();
  std::unordered_map<std::string, std::vector<ClassId>> owners;
  for (ClassId c = 0; c < C; c++)
    for (const std::string &tok : SplitClassName(classes.Name(c))) {
      std::vector<ClassId> &o = owners[tok];
      if (std::find(o.begin(), o.end(), c) == o.end()) o.push_back(c);
    }

  BigramStats stats;
  stats.num_classes = C;
  stats.counts.assign(static_cast<size_t>(C) * C, 0);
  size_t num_tokens = 0;
  for (const std::string &text : texts) {
    for (const auto &sentence : TokenizeSentences(text)) {
      num_tokens += sentence.size();
      std::vector<const std::vector<ClassId> *> hits(sentence.size(), nullptr);
      for (size_t p = 0; p < sentence.size(); p++) {
        auto it = owners.find(sentence[p]);
        if (it != owners.end()) hits[p] = &it->second;
      }
      for (size_t p = 0; p < sentence.size(); p++) {
        if (!hits[p]) continue;
        std::set<ClassId> followers;
        size_t end = std::min(sentence.size(), p + 1 + static_cast<size_t>(window));
        for (size_t q = p + 1; q < end; q++)
          if (hits[q]) followers.insert(hits[q]->begin(), hits[q]->end());
        for (ClassId v : *hits[p])
          for (ClassId w : followers)
            if (v != w) stats.counts[static_cast<size_t>(v) * C + w]++;
      }
    }
  }
  if (num_tokens == 0)
    ACTSET_WARN << "text corpus is empty; all bigram rows are uniform";
  stats.Normalize();
  return stats;
}

}  // namespace actset
