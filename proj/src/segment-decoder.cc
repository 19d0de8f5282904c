// src/segment-decoder.cc

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

#include "actset/segment-decoder.h"

#include <algorithm>
#include <cmath>
#include <functional>

namespace actset {

namespace {

struct Lattice {
  std::vector<int64_t> bounds;  // 0, stride, 2*stride, ..., T
  int64_t remainder = 0;        // frames absorbed by the final segment
  int64_t max_length = 0;

  int32_t Last() const { return static_cast<int32_t>(bounds.size()) - 1; }
  bool Allowed(int32_t a, int32_t b) const {
    int64_t len = bounds[b] - bounds[a];
    if (b == Last()) len -= remainder;
    return len <= max_length;
  }
};

Lattice MakeLattice(int64_t num_frames, int64_t stride, int64_t max_length) {
  Lattice lat;
  for (int64_t t = 0; t < num_frames; t += stride) lat.bounds.push_back(t);
  lat.bounds.push_back(num_frames);
  lat.remainder = num_frames % stride;
  lat.max_length = max_length;
  return lat;
}

void CheckInputs(const FrameScores &scores, const GrammarAutomaton &g,
                 const LengthModel &lm, const DecodeConfig &cfg) {
  if (scores.NumFrames() < 1) throw ValidationError("cannot decode zero frames");
  if (cfg.stride < 1) throw ConfigError("decoding stride must be >= 1");
  if (cfg.max_length != 0 && cfg.max_length < cfg.stride)
    throw ConfigError("max segment length must be >= the stride");
  if (cfg.beam < 0) throw ConfigError("beam width must be >= 0");
  for (const GrammarArc &a : g.Arcs()) {
    if (a.label >= scores.NumClasses())
      throw ValidationError("grammar label outside the frame score matrix");
    if (cfg.use_length_model && a.label >= lm.NumClasses())
      throw ValidationError("grammar label outside the length model");
  }
}

int64_t ResolveMaxLength(const LengthModel &lm, const DecodeConfig &cfg,
                         int64_t num_frames) {
  return cfg.max_length > 0 ? cfg.max_length
                            : DefaultMaxLength(lm, cfg, num_frames);
}

double SegmentTerm(const FrameScores &scores, const LengthModel &lm,
                   const DecodeConfig &cfg, ClassId c, int64_t begin,
                   int64_t end) {
  double len_term = cfg.use_length_model ? lm.LogPmf(c, end - begin) : 0.0;
  if (len_term == kLogZero) return kLogZero;
  return len_term + scores.SegmentScore(c, begin, end);
}

// Lexicographic comparison of (labels, lengths); -1, 0, 1.
int CompareSegments(const std::vector<Segment> &x,
                    const std::vector<Segment> &y) {
  for (size_t i = 0; i < std::min(x.size(), y.size()); i++)
    if (x[i].label != y[i].label) return x[i].label < y[i].label ? -1 : 1;
  if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
  for (size_t i = 0; i < x.size(); i++)
    if (x[i].length != y[i].length) return x[i].length < y[i].length ? -1 : 1;
  return 0;
}

// Strict "a is preferred over b" under the documented tie-break.
bool Preferred(double score_a, size_t nseg_a,
               const std::function<std::vector<Segment>()> &path_a,
               double score_b, size_t nseg_b,
               const std::function<std::vector<Segment>()> &path_b) {
  if (score_a != score_b) return score_a > score_b;
  if (nseg_a != nseg_b) return nseg_a < nseg_b;
  return CompareSegments(path_a(), path_b()) < 0;
}

DecodeResult MakeResult(std::vector<Segment> segs, double score,
                        std::vector<int32_t> path) {
  DecodeResult r;
  r.segmentation.segments = std::move(segs);
  r.sequence = r.segmentation.Labels();
  r.log_score = score;
  r.automaton_path = std::move(path);
  return r;
}

std::string InfeasibleMessage(int64_t T, const DecodeConfig &cfg,
                              int64_t max_length) {
  return "no admissible segmentation of T=" + std::to_string(T) +
         " frames with stride " + std::to_string(cfg.stride) +
         " and max segment length " + std::to_string(max_length) +
         " under the grammar and length model";
}

}  // namespace

int64_t DefaultMaxLength(const LengthModel &lm, const DecodeConfig &cfg,
                         int64_t num_frames) {
  const int64_t stride = std::max<int64_t>(1, cfg.stride);
  int64_t limit = num_frames;
  if (cfg.use_length_model) {
    double max_mean = 0.0, max_spread = 0.0;
    for (ClassId c = 0; c < lm.NumClasses(); c++) {
      max_mean = std::max(max_mean, lm.Mean(c));
      max_spread = std::max(max_spread, lm.Spread(c));
    }
    limit = std::min<int64_t>(
        num_frames, static_cast<int64_t>(std::ceil(max_mean + 5.0 * max_spread)));
  }
  limit = std::max<int64_t>(limit, 1);
  return ((limit + stride - 1) / stride) * stride;
}

DecodeResult Decode(const FrameScores &scores, const GrammarAutomaton &g,
                    const LengthModel &lm, const DecodeConfig &cfg) {
  CheckInputs(scores, g, lm, cfg);
  const int64_t T = scores.NumFrames();
  const int64_t max_length = ResolveMaxLength(lm, cfg, T);
  if (g.AcceptsNothing())
    throw InfeasibleError("grammar accepts no non-empty label sequence");

  const Lattice lat = MakeLattice(T, cfg.stride, max_length);
  const int32_t J = lat.Last();
  const int32_t Q = g.NumStates();
  const int32_t C = scores.NumClasses();

  struct Cell {
    double score = kLogZero;
    int32_t nseg = 0;
    int32_t prev_j = -1;
    int32_t prev_q = -1;
    ClassId label = -1;
  };
  std::vector<Cell> cells(static_cast<size_t>(J + 1) * Q);
  auto cell = [&](int32_t j, int32_t q) -> Cell & {
    return cells[static_cast<size_t>(j) * Q + q];
  };
  auto trace = [&](int32_t j, int32_t q) {
    std::vector<Segment> segs;
    while (j > 0) {
      const Cell &c = cell(j, q);
      segs.push_back({c.label, lat.bounds[j] - lat.bounds[c.prev_j]});
      int32_t pj = c.prev_j;
      q = c.prev_q;
      j = pj;
    }
    std::reverse(segs.begin(), segs.end());
    return segs;
  };

  cell(0, g.Start()).score = 0.0;
  std::vector<double> term(C);
  std::vector<int32_t> active;
  for (int32_t j = 1; j <= J; j++) {
    for (int32_t a = j - 1; a >= 0 && lat.Allowed(a, j); a--) {
      active.clear();
      for (int32_t q = 0; q < Q; q++)
        if (cell(a, q).score != kLogZero) active.push_back(q);
      if (active.empty()) continue;
      std::fill(term.begin(), term.end(), std::nan(""));
      for (int32_t qp : active) {
        const Cell &from = cell(a, qp);
        for (const GrammarArc &arc : g.ArcsFrom(qp)) {
          double &t = term[arc.label];
          if (std::isnan(t))
            t = SegmentTerm(scores, lm, cfg, arc.label, lat.bounds[a],
                            lat.bounds[j]);
          if (t == kLogZero) continue;
          const double cand = from.score + t;
          Cell &to = cell(j, arc.to);
          if (to.score != kLogZero) {
            const int64_t len = lat.bounds[j] - lat.bounds[a];
            bool better = Preferred(
                cand, from.nseg + 1,
                [&] {
                  auto s = trace(a, qp);
                  s.push_back({arc.label, len});
                  return s;
                },
                to.score, to.nseg, [&] { return trace(j, arc.to); });
            if (!better) continue;
          }
          to.score = cand;
          to.nseg = from.nseg + 1;
          to.prev_j = a;
          to.prev_q = qp;
          to.label = arc.label;
        }
      }
    }
    if (cfg.beam > 0 && j < J) {
      std::vector<std::pair<double, int32_t>> live;
      for (int32_t q = 0; q < Q; q++)
        if (cell(j, q).score != kLogZero) live.push_back({cell(j, q).score, q});
      if (static_cast<int64_t>(live.size()) > cfg.beam) {
        std::sort(live.begin(), live.end(), [](const auto &x, const auto &y) {
          return x.first != y.first ? x.first > y.first : x.second < y.second;
        });
        for (size_t k = static_cast<size_t>(cfg.beam); k < live.size(); k++)
          cell(j, live[k].second).score = kLogZero;
      }
    }
  }

  int32_t best_q = -1;
  for (int32_t q = 0; q < Q; q++) {
    if (!g.IsAccepting(q) || cell(J, q).score == kLogZero) continue;
    if (best_q < 0 ||
        Preferred(cell(J, q).score, cell(J, q).nseg, [&] { return trace(J, q); },
                  cell(J, best_q).score, cell(J, best_q).nseg,
                  [&] { return trace(J, best_q); }))
      best_q = q;
  }
  if (best_q < 0) throw InfeasibleError(InfeasibleMessage(T, cfg, max_length));

  std::vector<int32_t> path;
  for (int32_t j = J, q = best_q; j >= 0;) {
    path.push_back(q);
    if (j == 0) break;
    const Cell &c = cell(j, q);
    q = c.prev_q;
    j = c.prev_j;
  }
  std::reverse(path.begin(), path.end());
  return MakeResult(trace(J, best_q), cell(J, best_q).score, std::move(path));
}

DecodeResult DecodeGivenSet(const FrameScores &scores,
                            const GrammarAutomaton &g, const LengthModel &lm,
                            const DecodeConfig &cfg, const ActionSet &allowed) {
  std::optional<GrammarAutomaton> restricted = RestrictToSet(g, allowed);
  if (restricted) return Decode(scores, *restricted, lm, cfg);
  return Decode(scores, FreeAutomaton(allowed), lm, cfg);
}

DecodeResult BruteForceDecode(const FrameScores &scores,
                              const GrammarAutomaton &g, const LengthModel &lm,
                              const DecodeConfig &cfg) {
  CheckInputs(scores, g, lm, cfg);
  const int64_t T = scores.NumFrames();
  const int64_t max_length = ResolveMaxLength(lm, cfg, T);
  const Lattice lat = MakeLattice(T, cfg.stride, max_length);
  const int32_t J = lat.Last();
  if (J > 16)
    throw ConfigError("brute-force decoding limited to 16 lattice steps, got " +
                      std::to_string(J));
  std::optional<std::vector<LabelSequence>> seqs = g.Enumerate(J, 64);
  if (!seqs)
    throw ConfigError("brute-force decoding limited to 64 label sequences");
  if (g.AcceptsNothing())
    throw InfeasibleError("grammar accepts no non-empty label sequence");

  bool found = false;
  double best_score = kLogZero;
  std::vector<Segment> best;
  std::vector<int32_t> cuts;  // lattice indices of boundaries, 0 .. J
  std::vector<Segment> segs;
  for (const LabelSequence &seq : *seqs) {
    const int32_t N = static_cast<int32_t>(seq.size());
    if (N > J) continue;
    // Enumerate increasing interior cut positions in [1, J-1].
    std::vector<int32_t> inner(N - 1);
    for (int32_t k = 0; k < N - 1; k++) inner[k] = k + 1;
    while (true) {
      cuts.assign(1, 0);
      cuts.insert(cuts.end(), inner.begin(), inner.end());
      cuts.push_back(J);
      double acc = 0.0;
      bool ok = true;
      segs.clear();
      for (int32_t n = 0; n < N && ok; n++) {
        if (!lat.Allowed(cuts[n], cuts[n + 1])) {
          ok = false;
          break;
        }
        int64_t b = lat.bounds[cuts[n]], e = lat.bounds[cuts[n + 1]];
        double t = SegmentTerm(scores, lm, cfg, seq[n], b, e);
        if (t == kLogZero) ok = false;
        acc = acc + t;
        segs.push_back({seq[n], e - b});
      }
      if (ok && (!found || Preferred(acc, segs.size(), [&] { return segs; },
                                     best_score, best.size(),
                                     [&] { return best; }))) {
        found = true;
        best_score = acc;
        best = segs;
      }
      // next combination
      int32_t k = N - 2;
      while (k >= 0 && inner[k] == J - 1 - (N - 2 - k)) k--;
      if (k < 0) break;
      inner[k]++;
      for (int32_t m = k + 1; m < N - 1; m++) inner[m] = inner[m - 1] + 1;
    }
  }
  if (!found) throw InfeasibleError(InfeasibleMessage(T, cfg, max_length));

  // Any accepting state path spelling the winning sequence.
  LabelSequence labels;
  for (const Segment &s : best) labels.push_back(s.label);
  std::vector<int32_t> path = {g.Start()};
  std::function<bool(size_t)> dfs = [&](size_t i) {
    if (i == labels.size()) return g.IsAccepting(path.back());
    for (const GrammarArc &a : g.ArcsFrom(path.back())) {
      if (a.label != labels[i]) continue;
      path.push_back(a.to);
      if (dfs(i + 1)) return true;
      path.pop_back();
    }
    return false;
  };
  dfs(0);
  return MakeResult(std::move(best), best_score, std::move(path));
}

double ScoreSegmentation(const FrameScores &scores, const LengthModel &lm,
                         const DecodeConfig &cfg, const Segmentation &seg) {
  double acc = 0.0;
  int64_t begin = 0;
  for (const Segment &s : seg.segments) {
    acc = acc + SegmentTerm(scores, lm, cfg, s.label, begin, begin + s.length);
    begin += s.length;
  }
  return acc;
}

}  // namespace actset
