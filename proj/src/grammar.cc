// src/grammar.cc

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

#include "actset/grammar.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "actset/text-util.h"

namespace actset {

namespace fs = std::filesystem;

GrammarAutomaton::GrammarAutomaton(int32_t num_states, int32_t start,
                                   std::vector<GrammarArc> arcs,
                                   std::vector<bool> accepting) {
  if (num_states < 1 || start < 0 || start >= num_states ||
      static_cast<int32_t>(accepting.size()) != num_states)
    throw ValidationError("inconsistent automaton description");
  for (const GrammarArc &a : arcs)
    if (a.from < 0 || a.from >= num_states || a.to < 0 || a.to >= num_states ||
        a.label < 0)
      throw ValidationError("automaton arc out of range");

  std::vector<std::vector<int32_t>> fwd(num_states), bwd(num_states);
  for (const GrammarArc &a : arcs) {
    fwd[a.from].push_back(a.to);
    bwd[a.to].push_back(a.from);
  }
  auto flood = [](const std::vector<std::vector<int32_t>> &adj,
                  std::vector<int32_t> seeds, std::vector<bool> *mark) {
    for (int32_t s : seeds) (*mark)[s] = true;
    while (!seeds.empty()) {
      int32_t s = seeds.back();
      seeds.pop_back();
      for (int32_t n : adj[s])
        if (!(*mark)[n]) {
          (*mark)[n] = true;
          seeds.push_back(n);
        }
    }
  };
  std::vector<bool> reach(num_states, false), coreach(num_states, false);
  flood(fwd, {start}, &reach);
  std::vector<int32_t> finals;
  for (int32_t s = 0; s < num_states; s++)
    if (accepting[s]) finals.push_back(s);
  flood(bwd, finals, &coreach);

  std::vector<int32_t> remap(num_states, -1);
  int32_t kept = 0;
  for (int32_t s = 0; s < num_states; s++)
    if (s == start || (reach[s] && coreach[s])) remap[s] = kept++;

  start_ = remap[start];
  accepting_.assign(kept, false);
  for (int32_t s = 0; s < num_states; s++)
    if (remap[s] >= 0) accepting_[remap[s]] = accepting[s];
  for (const GrammarArc &a : arcs)
    if (remap[a.from] >= 0 && remap[a.to] >= 0 && coreach[a.to] &&
        reach[a.from])
      arcs_.push_back({remap[a.from], a.label, remap[a.to]});
  std::sort(arcs_.begin(), arcs_.end(),
            [](const GrammarArc &x, const GrammarArc &y) {
              if (x.from != y.from) return x.from < y.from;
              if (x.label != y.label) return x.label < y.label;
              return x.to < y.to;
            });
  arcs_.erase(std::unique(arcs_.begin(), arcs_.end()), arcs_.end());
  arc_begin_.assign(kept + 1, 0);
  for (const GrammarArc &a : arcs_) arc_begin_[a.from + 1]++;
  for (int32_t s = 0; s < kept; s++) arc_begin_[s + 1] += arc_begin_[s];
}

std::span<const GrammarArc> GrammarAutomaton::ArcsFrom(int32_t s) const {
  return std::span<const GrammarArc>(arcs_.data() + arc_begin_[s],
                                     arc_begin_[s + 1] - arc_begin_[s]);
}

bool GrammarAutomaton::AcceptsNothing() const {
  // After trimming every surviving arc lies on an accepting path.
  return arcs_.empty();
}

ActionSet GrammarAutomaton::Alphabet() const {
  ActionSet out;
  for (const GrammarArc &a : arcs_) out.insert(a.label);
  return out;
}

bool GrammarAutomaton::IsFinite() const {
  // 0 = unvisited, 1 = on stack, 2 = done
  std::vector<int8_t> color(NumStates(), 0);
  std::vector<std::pair<int32_t, size_t>> stack;
  for (int32_t root = 0; root < NumStates(); root++) {
    if (color[root]) continue;
    stack.push_back({root, 0});
    color[root] = 1;
    while (!stack.empty()) {
      auto &[s, next] = stack.back();
      std::span<const GrammarArc> out = ArcsFrom(s);
      if (next == out.size()) {
        color[s] = 2;
        stack.pop_back();
        continue;
      }
      int32_t to = out[next++].to;
      if (color[to] == 1) return false;
      if (color[to] == 0) {
        color[to] = 1;
        stack.push_back({to, 0});
      }
    }
  }
  return true;
}

bool GrammarAutomaton::Accepts(const LabelSequence &seq) const {
  if (accepting_.empty()) return false;
  std::vector<int32_t> current = {start_}, next;
  std::vector<bool> in_next(NumStates(), false);
  for (ClassId c : seq) {
    next.clear();
    for (int32_t s : current)
      for (const GrammarArc &a : ArcsFrom(s))
        if (a.label == c && !in_next[a.to]) {
          in_next[a.to] = true;
          next.push_back(a.to);
        }
    for (int32_t s : next) in_next[s] = false;
    current.swap(next);
    if (current.empty()) return false;
  }
  for (int32_t s : current)
    if (accepting_[s]) return true;
  return false;
}

std::optional<std::vector<LabelSequence>> GrammarAutomaton::Enumerate(
    int64_t max_length, size_t limit) const {
  std::vector<LabelSequence> out;
  if (accepting_.empty()) return out;
  struct Item {
    LabelSequence seq;
    std::vector<int32_t> states;  // sorted, unique
  };
  std::vector<Item> frontier = {{{}, {start_}}};
  for (int64_t len = 1; len <= max_length && !frontier.empty(); len++) {
    std::vector<Item> next_frontier;
    for (const Item &item : frontier) {
      std::map<ClassId, std::set<int32_t>> by_label;
      for (int32_t s : item.states)
        for (const GrammarArc &a : ArcsFrom(s)) by_label[a.label].insert(a.to);
      for (auto &[label, states] : by_label) {
        Item child{item.seq, std::vector<int32_t>(states.begin(), states.end())};
        child.seq.push_back(label);
        bool accepted = false;
        for (int32_t s : child.states) accepted = accepted || accepting_[s];
        if (accepted) {
          out.push_back(child.seq);
          if (out.size() > limit) return std::nullopt;
        }
        next_frontier.push_back(std::move(child));
      }
    }
    frontier.swap(next_frontier);
  }
  return out;
}

GrammarAutomaton BuildNaive(const Corpus &corpus) {
  std::set<ActionSet> distinct;
  for (const VideoRecord &v : corpus.videos) distinct.insert(v.action_set);
  const int32_t num_states = 1 + static_cast<int32_t>(distinct.size());
  std::vector<GrammarArc> arcs;
  int32_t branch = 1;
  for (const ActionSet &set : distinct) {
    for (ClassId c : set) {
      arcs.push_back({0, c, branch});
      arcs.push_back({branch, c, branch});
    }
    branch++;
  }
  return GrammarAutomaton(num_states, 0, std::move(arcs),
                          std::vector<bool>(num_states, true));
}

GrammarAutomaton CompilePrefixTree(std::vector<LabelSequence> sequences) {
  std::sort(sequences.begin(), sequences.end());
  sequences.erase(std::unique(sequences.begin(), sequences.end()),
                  sequences.end());
  std::vector<std::map<ClassId, int32_t>> children(1);
  std::vector<bool> accepting(1, false);
  for (const LabelSequence &seq : sequences) {
    if (seq.empty()) continue;
    int32_t node = 0;
    for (ClassId c : seq) {
      auto it = children[node].find(c);
      if (it == children[node].end()) {
        int32_t fresh = static_cast<int32_t>(children.size());
        children[node][c] = fresh;
        children.emplace_back();
        accepting.push_back(false);
        node = fresh;
      } else {
        node = it->second;
      }
    }
    accepting[node] = true;
  }
  std::vector<GrammarArc> arcs;
  for (size_t s = 0; s < children.size(); s++)
    for (const auto &[c, to] : children[s])
      arcs.push_back({static_cast<int32_t>(s), c, to});
  return GrammarAutomaton(static_cast<int32_t>(children.size()), 0,
                          std::move(arcs), std::move(accepting));
}

GrammarAutomaton FreeAutomaton(const ActionSet &allowed) {
  if (allowed.empty())
    throw ValidationError("free automaton needs a non-empty alphabet");
  std::vector<GrammarArc> arcs;
  for (ClassId c : allowed) arcs.push_back({0, c, 0});
  return GrammarAutomaton(1, 0, std::move(arcs), {true});
}

std::optional<GrammarAutomaton> RestrictToSet(const GrammarAutomaton &g,
                                              const ActionSet &allowed) {
  if (allowed.empty())
    throw ValidationError("restriction needs a non-empty alphabet");
  std::vector<GrammarArc> arcs;
  for (const GrammarArc &a : g.Arcs())
    if (allowed.count(a.label)) arcs.push_back(a);
  std::vector<bool> accepting(g.NumStates());
  for (int32_t s = 0; s < g.NumStates(); s++) accepting[s] = g.IsAccepting(s);
  GrammarAutomaton out(g.NumStates(), g.Start(), std::move(arcs),
                       std::move(accepting));
  if (out.AcceptsNothing()) return std::nullopt;
  return out;
}

// ---- Files ---------------------------------------------------------------

namespace {

ClassId LookupClass(const ClassTable &table, const std::string &name,
                    const fs::path &file, int64_t line_no) {
  std::optional<ClassId> c = table.Find(name);
  if (!c)
    throw ParseError(file.string(), line_no, "unknown class '" + name + "'");
  return *c;
}

GrammarAutomaton ParseAutomaton(std::ifstream &is, const fs::path &file,
                                int64_t line_no, const ClassTable &table) {
  int32_t num_states = -1, start = -1;
  std::vector<GrammarArc> arcs;
  std::vector<int32_t> finals;
  std::string line;
  while (std::getline(is, line)) {
    line_no++;
    std::vector<std::string> f = SplitWhitespace(line);
    if (f.empty() || f[0][0] == '#') continue;
    if (f[0] == "states" && f.size() == 2) {
      num_states = static_cast<int32_t>(ParseInt(f[1], file.string(), line_no));
    } else if (f[0] == "start" && f.size() == 2) {
      start = static_cast<int32_t>(ParseInt(f[1], file.string(), line_no));
    } else if (f[0] == "accepting") {
      for (size_t i = 1; i < f.size(); i++)
        finals.push_back(
            static_cast<int32_t>(ParseInt(f[i], file.string(), line_no)));
    } else if (f[0] == "arc" && f.size() == 4) {
      arcs.push_back(
          {static_cast<int32_t>(ParseInt(f[1], file.string(), line_no)),
           LookupClass(table, f[2], file, line_no),
           static_cast<int32_t>(ParseInt(f[3], file.string(), line_no))});
    } else {
      throw ParseError(file.string(), line_no, "unrecognized automaton line");
    }
  }
  if (num_states < 1 || start < 0 || start >= num_states)
    throw ParseError(file.string(), line_no,
                     "automaton needs `states` and a valid `start`");
  std::vector<bool> accepting(num_states, false);
  for (int32_t s : finals) {
    if (s < 0 || s >= num_states)
      throw ParseError(file.string(), line_no, "accepting state out of range");
    accepting[s] = true;
  }
  for (const GrammarArc &a : arcs)
    if (a.from < 0 || a.from >= num_states || a.to < 0 || a.to >= num_states)
      throw ParseError(file.string(), line_no, "arc state out of range");
  return GrammarAutomaton(num_states, start, std::move(arcs),
                          std::move(accepting));
}

}  // namespace

GrammarAutomaton ReadGrammar(const fs::path &file, const ClassTable &table) {
  std::ifstream is(file);
  if (!is) throw ValidationError("cannot open grammar file " + file.string());
  std::vector<LabelSequence> sequences;
  std::string line;
  int64_t line_no = 0;
  bool first = true;
  while (std::getline(is, line)) {
    line_no++;
    std::vector<std::string> f = SplitWhitespace(line);
    if (f.empty()) continue;
    if (first && f[0] == "#automaton")
      return ParseAutomaton(is, file, line_no, table);
    first = false;
    if (f[0][0] == '#') continue;
    LabelSequence seq;
    for (const std::string &name : f)
      seq.push_back(LookupClass(table, name, file, line_no));
    sequences.push_back(std::move(seq));
  }
  if (sequences.empty())
    throw ParseError(file.string(), line_no, "grammar file has no sequences");
  return CompilePrefixTree(std::move(sequences));
}

void WriteGrammarSequences(const std::vector<LabelSequence> &sequences,
                           const ClassTable &table, const fs::path &file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream os(file);
  if (!os) throw Error("cannot write " + file.string());
  for (const LabelSequence &seq : sequences) {
    for (size_t i = 0; i < seq.size(); i++)
      os << (i ? " " : "") << table.Name(seq[i]);
    os << '\n';
  }
}

void WriteAutomaton(const GrammarAutomaton &g, const ClassTable &table,
                    const fs::path &file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream os(file);
  if (!os) throw Error("cannot write " + file.string());
  os << "#automaton\n";
  os << "states " << g.NumStates() << '\n';
  os << "start " << g.Start() << '\n';
  os << "accepting";
  for (int32_t s = 0; s < g.NumStates(); s++)
    if (g.IsAccepting(s)) os << ' ' << s;
  os << '\n';
  for (const GrammarArc &a : g.Arcs())
    os << "arc " << a.from << ' ' << table.Name(a.label) << ' ' << a.to << '\n';
}

void WriteBigramStats(const BigramStats &stats, const ClassTable &table,
                      const fs::path &file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream os(file);
  if (!os) throw Error("cannot write " + file.string());
  for (ClassId v = 0; v < stats.num_classes; v++)
    for (ClassId w = 0; w < stats.num_classes; w++)
      if (stats.Count(v, w) > 0)
        os << table.Name(v) << ' ' << table.Name(w) << ' ' << stats.Count(v, w)
           << '\n';
}

BigramStats ReadBigramStats(const fs::path &file, const ClassTable &table) {
  std::ifstream is(file);
  if (!is) throw ValidationError("cannot open bigram file " + file.string());
  BigramStats stats;
  stats.num_classes = table.NumClasses();
  stats.counts.assign(static_cast<size_t>(stats.num_classes) *
                          stats.num_classes, 0);
  std::string line;
  int64_t line_no = 0;
  while (std::getline(is, line)) {
    line_no++;
    std::vector<std::string> f = SplitWhitespace(line);
    if (f.empty()) continue;
    if (f.size() != 3)
      throw ParseError(file.string(), line_no, "expected `v w count`");
    ClassId v = LookupClass(table, f[0], file, line_no);
    ClassId w = LookupClass(table, f[1], file, line_no);
    int64_t n = ParseInt(f[2], file.string(), line_no);
    if (n < 0) throw ParseError(file.string(), line_no, "negative count");
    stats.counts[static_cast<size_t>(v) * stats.num_classes + w] = n;
  }
  stats.Normalize();
  return stats;
}

}  // namespace actset
