// pipeline.cc

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

#include "actset/pipeline.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "actset/corpus.h"
#include "actset/frame-scores.h"
#include "actset/grammar.h"
#include "actset/length-model.h"
#include "actset/metrics.h"
#include "actset/multitask-net.h"
#include "actset/segment-decoder.h"
#include "actset/synthetic-corpus.h"
#include "actset/text-util.h"

namespace actset {

namespace fs = std::filesystem;

namespace {

typedef std::variant<uint64_t PipelineConfig::*, int64_t PipelineConfig::*,
                     double PipelineConfig::*, bool PipelineConfig::*,
                     std::string PipelineConfig::*>
    FieldPtr;

struct Field {
  const char *key;
  FieldPtr ptr;
};

const std::vector<Field> &FieldTable() {
  typedef PipelineConfig P;
  static const std::vector<Field> table = {
      {"seed", &P::seed},
      {"data_dir", &P::data_dir},
      {"train_dir", &P::train_dir},
      {"test_dir", &P::test_dir},
      {"model_dir", &P::model_dir},
      {"output_dir", &P::output_dir},
      {"grammar", &P::grammar},
      {"grammar_k", &P::grammar_k},
      {"grammar_file", &P::grammar_file},
      {"text_file", &P::text_file},
      {"text_window", &P::text_window},
      {"length_mean", &P::length_mean},
      {"length_kind", &P::length_kind},
      {"l_min", &P::l_min},
      {"lambda_file", &P::lambda_file},
      {"sigma_min", &P::sigma_min},
      {"hidden", &P::hidden},
      {"epochs", &P::epochs},
      {"batch_size", &P::batch_size},
      {"learning_rate", &P::learning_rate},
      {"frame_stride", &P::frame_stride},
      {"supervision", &P::supervision},
      {"stride", &P::stride},
      {"max_length", &P::max_length},
      {"beam", &P::beam},
      {"mode", &P::mode},
      {"use_grammar", &P::use_grammar},
      {"use_length_model", &P::use_length_model},
      {"metrics", &P::metrics},
      {"synth_classes", &P::synth_classes},
      {"synth_dim", &P::synth_dim},
      {"synth_separation", &P::synth_separation},
      {"synth_noise", &P::synth_noise},
      {"synth_train", &P::synth_train},
      {"synth_test", &P::synth_test},
      {"synth_orderings", &P::synth_orderings},
      {"synth_min_actions", &P::synth_min_actions},
      {"synth_max_actions", &P::synth_max_actions},
      {"synth_closing_background", &P::synth_closing_background},
      {"synth_min_mean", &P::synth_min_mean},
      {"synth_max_mean", &P::synth_max_mean},
      {"synth_format", &P::synth_format},
  };
  return table;
}

const Field &FindField(const std::string &key) {
  for (const Field &f : FieldTable())
    if (key == f.key) return f;
  throw ConfigError("unknown config key '" + key + "'");
}

template <typename T>
T ParseValue(const std::string &key, const std::string &value) {
  const std::string where = "config key '" + key + "'";
  if constexpr (std::is_same_v<T, std::string>) {
    return value;
  } else if constexpr (std::is_same_v<T, bool>) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError(where + ": expected a boolean, got '" + value + "'");
  } else {
    try {
      if constexpr (std::is_same_v<T, double>) {
        return ParseDouble(value, where, 0);
      } else {
        int64_t v = ParseInt(value, where, 0);
        if (std::is_same_v<T, uint64_t> && v < 0)
          throw ConfigError(where + ": must be non-negative");
        return static_cast<T>(v);
      }
    } catch (const ParseError &e) {
      throw ConfigError(where + ": cannot parse '" + value + "'");
    }
  }
}

void RequireOneOf(const std::string &key, const std::string &value,
                  std::initializer_list<const char *> allowed) {
  std::string list;
  for (const char *a : allowed) {
    if (value == a) return;
    list += std::string(list.empty() ? "" : "|") + a;
  }
  throw ConfigError("config key '" + key + "': expected " + list + ", got '" +
                    value + "'");
}

void RequirePositive(const std::string &key, double v) {
  if (!(v > 0)) throw ConfigError("config key '" + key + "' must be positive");
}

void RequireFile(const std::string &what, const fs::path &p) {
  if (p.empty()) throw ConfigError(what + " is not set");
  if (!fs::is_regular_file(p))
    throw ConfigError(what + " '" + p.string() + "' does not exist");
}

void RequireDir(const std::string &what, const fs::path &p) {
  if (!fs::is_directory(p))
    throw ConfigError(what + " '" + p.string() + "' is not a directory");
}

void WriteText(const fs::path &file, const std::string &text) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw Error("cannot write " + file.string());
  os << text;
  if (!os) throw Error("write failed: " + file.string());
}

std::vector<std::string> SplitLines(const std::string &text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

// Independent streams for the stochastic stages of training.
uint64_t SubSeed(uint64_t seed, uint64_t stage) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stage + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// ---- shared validation ----------------------------------------------------

void ValidateGrammarKeys(const PipelineConfig &cfg) {
  RequireOneOf("grammar", cfg.grammar,
               {"naive", "monte-carlo", "text", "file", "none"});
  if (cfg.grammar_k <= 0) throw ConfigError("config key 'grammar_k' must be positive");
  if (cfg.text_window <= 0)
    throw ConfigError("config key 'text_window' must be positive");
  if (cfg.grammar == "text") RequireFile("text_file", cfg.text_file);
  if (cfg.grammar == "file") RequireFile("grammar_file", cfg.grammar_file);
}

void ValidateLengthKeys(const PipelineConfig &cfg) {
  RequireOneOf("length_mean", cfg.length_mean,
               {"naive", "loss", "loss-decoupled", "file"});
  try {
    ParseLengthKind(cfg.length_kind);
  } catch (const Error &e) {
    throw ConfigError(e.what());
  }
  if (cfg.l_min < 0) throw ConfigError("config key 'l_min' must be non-negative");
  RequirePositive("sigma_min", cfg.sigma_min);
  if (cfg.length_mean == "file") RequireFile("lambda_file", cfg.lambda_file);
}

void ValidateTrainKeys(const PipelineConfig &cfg) {
  RequirePositive("hidden", static_cast<double>(cfg.hidden));
  RequirePositive("epochs", static_cast<double>(cfg.epochs));
  RequirePositive("batch_size", static_cast<double>(cfg.batch_size));
  RequirePositive("learning_rate", cfg.learning_rate);
  RequirePositive("frame_stride", static_cast<double>(cfg.frame_stride));
  RequireOneOf("supervision", cfg.supervision, {"weak", "full"});
}

void ValidateDecodeKeys(const PipelineConfig &cfg) {
  RequirePositive("stride", static_cast<double>(cfg.stride));
  if (cfg.max_length < 0)
    throw ConfigError("config key 'max_length' must be non-negative");
  if (cfg.max_length > 0 && cfg.max_length < cfg.stride)
    throw ConfigError("config key 'max_length' is smaller than 'stride'");
  if (cfg.beam < 0) throw ConfigError("config key 'beam' must be non-negative");
  RequireOneOf("mode", cfg.mode, {"free", "given-sets"});
}

std::set<std::string> SelectedMetrics(const PipelineConfig &cfg) {
  std::string s = cfg.metrics;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::set<std::string> out;
  for (const std::string &m : SplitWhitespace(s)) {
    RequireOneOf("metrics", m, {"accuracy", "midpoint", "jaccard"});
    out.insert(m);
  }
  if (out.empty()) throw ConfigError("config key 'metrics' selects nothing");
  return out;
}

void RequireCorpusDir(const std::string &what, const fs::path &dir) {
  RequireDir(what, dir);
  RequireFile(what + " classes file", dir / "classes.txt");
  RequireFile(what + " action-set file", dir / "actionsets.txt");
  RequireDir(what + " features", dir / "features");
}

// ---- grammar construction -------------------------------------------------

struct BuiltGrammar {
  GrammarAutomaton automaton;
  // Sampled sequences when the grammar came from sampling.
  std::vector<SampledSequence> samples;
  std::optional<BigramStats> bigrams;
  // Distinct sequences for the sequence-per-line writer, when finite.
  std::optional<std::vector<LabelSequence>> sequences;
};

std::vector<std::string> ReadTextCorpus(const fs::path &file) {
  std::vector<std::string> texts;
  std::ifstream is(file);
  if (!is) throw Error("cannot read " + file.string());
  std::string line;
  while (std::getline(is, line))
    if (!Trim(line).empty()) texts.push_back(line);
  return texts;
}

std::vector<LabelSequence> DistinctSorted(const std::vector<SampledSequence> &s) {
  std::vector<LabelSequence> seqs;
  seqs.reserve(s.size());
  for (const SampledSequence &x : s) seqs.push_back(x.labels);
  std::sort(seqs.begin(), seqs.end());
  seqs.erase(std::unique(seqs.begin(), seqs.end()), seqs.end());
  return seqs;
}

BuiltGrammar BuildGrammar(const PipelineConfig &cfg, const Corpus &train,
                          const std::vector<double> &means) {
  BuiltGrammar out;
  const ClassTable &classes = train.class_table;
  if (cfg.grammar == "naive") {
    out.automaton = BuildNaive(train);
  } else if (cfg.grammar == "none") {
    ActionSet all;
    for (ClassId c = 0; c < classes.NumClasses(); ++c) all.insert(c);
    out.automaton = FreeAutomaton(all);
  } else if (cfg.grammar == "file") {
    out.automaton = ReadGrammar(cfg.grammar_file, classes);
  } else {
    SampledGrammar sg;
    if (cfg.grammar == "monte-carlo") {
      sg = BuildMonteCarlo(train, means, cfg.grammar_k, SubSeed(cfg.seed, 0));
    } else {
      BigramStats stats = MineBigrams(ReadTextCorpus(cfg.text_file), classes,
                                      static_cast<int32_t>(cfg.text_window));
      sg = BuildTextBased(train, means, cfg.grammar_k, SubSeed(cfg.seed, 0),
                          stats);
      out.bigrams = std::move(stats);
    }
    out.automaton = std::move(sg.automaton);
    out.samples = std::move(sg.samples);
    out.sequences = DistinctSorted(out.samples);
  }
  return out;
}

std::string Join(const LabelSequence &seq, const ClassTable &classes) {
  std::string s;
  for (size_t i = 0; i < seq.size(); ++i)
    s += (i ? " " : "") + classes.Name(seq[i]);
  return s;
}

}  // namespace

// ---- PipelineConfig -------------------------------------------------------

void PipelineConfig::Set(const std::string &key, const std::string &value) {
  const Field &f = FindField(key);
  std::visit(
      [&](auto ptr) {
        typedef std::remove_reference_t<decltype(this->*ptr)> T;
        this->*ptr = ParseValue<T>(key, value);
      },
      f.ptr);
}

std::string PipelineConfig::Get(const std::string &key) const {
  const Field &f = FindField(key);
  return std::visit(
      [&](auto ptr) -> std::string {
        const auto &v = this->*ptr;
        typedef std::decay_t<decltype(v)> T;
        if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, double>) {
          return FormatDouble(v);
        } else {
          return std::to_string(v);
        }
      },
      f.ptr);
}

const std::vector<std::string> &PipelineConfig::Keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const Field &f : FieldTable()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void PipelineConfig::MergeFile(const fs::path &file) {
  std::ifstream is(file);
  if (!is) throw ConfigError("cannot read config file " + file.string());
  std::string line;
  int64_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(file.string(), lineno, "expected 'key = value'");
    std::string key = Trim(line.substr(0, eq));
    std::string value = Trim(line.substr(eq + 1));
    try {
      Set(key, value);
    } catch (const ConfigError &e) {
      throw ParseError(file.string(), lineno, e.what());
    }
  }
}

std::string PipelineConfig::Serialize() const {
  std::ostringstream os;
  for (const Field &f : FieldTable()) {
    std::string v = Get(f.key);
    if (std::string(f.key) == "train_dir") v = TrainDir().string();
    if (std::string(f.key) == "test_dir") v = TestDir().string();
    os << f.key << " = " << v << "\n";
  }
  return os.str();
}

fs::path PipelineConfig::TrainDir() const {
  return train_dir.empty() ? fs::path(data_dir) / "train" : fs::path(train_dir);
}

fs::path PipelineConfig::TestDir() const {
  return test_dir.empty() ? fs::path(data_dir) / "test" : fs::path(test_dir);
}

// ---- synth ----------------------------------------------------------------

int CmdSynth(const PipelineConfig &cfg, std::ostream &log) {
  SynthConfig sc;
  sc.num_classes = static_cast<int32_t>(cfg.synth_classes);
  sc.dim = static_cast<int32_t>(cfg.synth_dim);
  sc.separation = cfg.synth_separation;
  sc.noise_sigma = cfg.synth_noise;
  sc.num_train_videos = static_cast<int32_t>(cfg.synth_train);
  sc.num_test_videos = static_cast<int32_t>(cfg.synth_test);
  sc.num_orderings = static_cast<int32_t>(cfg.synth_orderings);
  sc.min_actions = static_cast<int32_t>(cfg.synth_min_actions);
  sc.max_actions = static_cast<int32_t>(cfg.synth_max_actions);
  sc.closing_background = cfg.synth_closing_background;
  sc.min_mean_length = cfg.synth_min_mean;
  sc.max_mean_length = cfg.synth_max_mean;
  RequireOneOf("synth_format", cfg.synth_format, {"text", "binary"});
  FeatureFormat format =
      cfg.synth_format == "binary" ? FeatureFormat::kBinary : FeatureFormat::kText;

  // Generation validates the configuration; nothing is written before it.
  SyntheticData data = GenerateSynthetic(sc, cfg.seed);

  fs::path root(cfg.data_dir);
  fs::create_directories(root);
  SaveCorpusDir(data.train, cfg.TrainDir(), format);
  SaveCorpusDir(data.test, cfg.TestDir(), format);
  WriteGrammarSequences(data.orderings, data.train.class_table,
                        root / "hidden_grammar.txt");
  {
    std::ostringstream m;
    m << "seed " << cfg.seed << "\n";
    m << "classes " << data.train.class_table.NumClasses() << "\n";
    m << "dim " << sc.dim << "\n";
    m << "train_videos " << data.train.videos.size() << "\n";
    m << "test_videos " << data.test.videos.size() << "\n";
    m << "orderings " << data.orderings.size() << "\n";
    for (ClassId c = 0; c < data.train.class_table.NumClasses(); ++c)
      m << "mean_length " << data.train.class_table.Name(c) << " "
        << FormatDouble(data.mean_lengths[c]) << "\n";
    WriteText(root / "manifest.txt", m.str());
  }
  WriteText(root / "config.txt", cfg.Serialize());
  log << "wrote " << data.train.videos.size() << " train and "
      << data.test.videos.size() << " test videos to " << root.string() << "\n";
  return kExitOk;
}

// ---- train ----------------------------------------------------------------

int CmdTrain(const PipelineConfig &cfg, std::ostream &log) {
  ValidateGrammarKeys(cfg);
  ValidateLengthKeys(cfg);
  ValidateTrainKeys(cfg);
  RequireCorpusDir("train_dir", cfg.TrainDir());
  LengthKind kind = ParseLengthKind(cfg.length_kind);

  Corpus train = LoadCorpusDir(cfg.TrainDir());
  if (train.videos.empty()) throw ValidationError("training corpus is empty");
  const ClassTable &classes = train.class_table;
  bool full = cfg.supervision == "full";
  if (full) {
    for (const VideoRecord &v : train.videos)
      if (!v.gt_labels)
        throw ValidationError("full supervision needs ground truth for video " +
                              v.id);
  }

  std::ostringstream tl;
  tl << "seed " << cfg.seed << "\n";

  // Mean lengths.
  MeanLengths means;
  if (cfg.length_mean == "naive") {
    means = EstimateNaive(train);
  } else if (cfg.length_mean == "loss") {
    means = EstimateLossBased(train, cfg.l_min);
  } else if (cfg.length_mean == "loss-decoupled") {
    means = EstimateLossBasedDecoupled(train, cfg.l_min);
  } else {
    means.lambda = ReadMeanLengths(cfg.lambda_file, classes);
    means.imputed.assign(means.lambda.size(), false);
  }
  for (size_t c = 0; c < means.lambda.size(); ++c)
    if (means.imputed[c])
      ACTSET_WARN << "class " << classes.Name(c)
                  << " occurs in no action set; mean length imputed";

  // Grammar.
  BuiltGrammar grammar = BuildGrammar(cfg, train, means.lambda);
  if (grammar.automaton.AcceptsNothing())
    throw ValidationError("grammar admits no sequence");

  // Spread for the non-Poisson kinds comes from sampled sequences.
  std::vector<double> sigma;
  std::vector<bool> sigma_floored;
  if (kind != LengthKind::kPoisson) {
    std::vector<SampledSequence> samples = grammar.samples;
    if (samples.empty())
      samples = BuildMonteCarlo(train, means.lambda, cfg.grammar_k,
                                SubSeed(cfg.seed, 1))
                    .samples;
    SigmaEstimate se = EstimateSigma(train, samples, means.lambda, cfg.sigma_min);
    sigma = se.sigma;
    sigma_floored = se.floored;
  }
  LengthModel lengths(kind, means.lambda, sigma);

  // Network.
  TrainConfig tc;
  tc.hidden = static_cast<int32_t>(cfg.hidden);
  tc.epochs = static_cast<int32_t>(cfg.epochs);
  tc.batch_size = static_cast<int32_t>(cfg.batch_size);
  tc.learning_rate = cfg.learning_rate;
  tc.frame_stride = static_cast<int32_t>(cfg.frame_stride);
  tc.supervision = full ? Supervision::kFramewise : Supervision::kActionSets;
  TrainResult tr = TrainMultiTaskNet(train, tc, SubSeed(cfg.seed, 2));
  FrameScorer scorer{std::move(tr.net), ComputePrior(train, tc.supervision)};

  tl << "grammar " << cfg.grammar << " states " << grammar.automaton.NumStates()
     << " arcs " << grammar.automaton.Arcs().size() << "\n";
  if (grammar.sequences)
    tl << "grammar_sequences " << grammar.sequences->size() << "\n";
  for (size_t e = 0; e < tr.loss_trace.size(); ++e)
    tl << "epoch " << (e + 1) << " loss " << FormatDouble(tr.loss_trace[e]) << "\n";
  tl << "# class lambda sigma imputed prior\n";
  for (ClassId c = 0; c < classes.NumClasses(); ++c) {
    tl << "class " << classes.Name(c) << " " << FormatDouble(means.lambda[c])
       << " " << (sigma.empty() ? std::string("-") : FormatDouble(sigma[c]))
       << " " << (means.imputed[c] ? 1 : 0) << " "
       << FormatDouble(scorer.prior.p[c]) << "\n";
  }

  fs::path out(cfg.model_dir);
  fs::create_directories(out);
  WriteClassTable(classes, out / "classes.txt");
  if (grammar.sequences)
    WriteGrammarSequences(*grammar.sequences, classes, out / "grammar.txt");
  else
    WriteAutomaton(grammar.automaton, classes, out / "grammar.txt");
  if (grammar.bigrams) WriteBigramStats(*grammar.bigrams, classes, out / "bigrams.txt");
  WriteLengthModel(lengths, classes, out / "lengths.txt");
  WriteFrameScorer(scorer, out / "net.bin");
  WriteText(out / "train.log", tl.str());
  WriteText(out / "config.txt", cfg.Serialize());
  log << "trained on " << train.videos.size() << " videos; final loss "
      << (tr.loss_trace.empty() ? std::string("-")
                                : FormatDouble(tr.loss_trace.back()))
      << "; artifacts in " << out.string() << "\n";
  return kExitOk;
}

// ---- infer ----------------------------------------------------------------

int CmdInfer(const PipelineConfig &cfg, std::ostream &log) {
  ValidateDecodeKeys(cfg);
  fs::path model(cfg.model_dir);
  RequireDir("model_dir", model);
  for (const char *f : {"classes.txt", "grammar.txt", "lengths.txt", "net.bin"})
    RequireFile(std::string("model file ") + f, model / f);
  RequireCorpusDir("test_dir", cfg.TestDir());

  ClassTable classes = ReadClassTable(model / "classes.txt");
  Corpus test = LoadCorpusDir(cfg.TestDir());
  if (!(test.class_table == classes))
    throw ValidationError("test corpus classes differ from the model's");
  GrammarAutomaton grammar = ReadGrammar(model / "grammar.txt", classes);
  LengthModel lengths = ReadLengthModel(model / "lengths.txt", classes);
  FrameScorer scorer = ReadFrameScorer(model / "net.bin");
  if (scorer.net.NumClasses() != classes.NumClasses())
    throw ValidationError((model / "net.bin").string() +
                          ": class count differs from classes.txt");
  for (const VideoRecord &v : test.videos)
    if (v.Dim() != scorer.net.Dim())
      throw ValidationError("video " + v.id + " has feature dimension " +
                            std::to_string(v.Dim()) + ", model expects " +
                            std::to_string(scorer.net.Dim()));
  if (!cfg.use_grammar) {
    ActionSet all;
    for (ClassId c = 0; c < classes.NumClasses(); ++c) all.insert(c);
    grammar = FreeAutomaton(all);
  }

  DecodeConfig dc;
  dc.stride = cfg.stride;
  dc.max_length = cfg.max_length;
  dc.beam = cfg.beam;
  dc.use_length_model = cfg.use_length_model;

  fs::path out(cfg.output_dir);
  fs::create_directories(out / "segments");
  fs::create_directories(out / "framewise");
  std::ostringstream scores_txt, infeasible_txt;
  int64_t num_infeasible = 0;
  for (const VideoRecord &v : test.videos) {
    FrameScores scores = ComputeFrameScores(scorer, v);
    DecodeResult r;
    try {
      if (cfg.mode == "given-sets")
        r = DecodeGivenSet(scores, grammar, lengths, dc, v.action_set);
      else
        r = Decode(scores, grammar, lengths, dc);
    } catch (const InfeasibleError &e) {
      ACTSET_WARN << "video " << v.id << " skipped: " << e.what();
      infeasible_txt << v.id << " " << e.what() << "\n";
      ++num_infeasible;
      continue;
    }
    WriteSegmentation(r.segmentation, classes, out / "segments" / (v.id + ".txt"));
    WriteFramewiseLabels(SegmentationToFramewise(r.segmentation), classes,
                         out / "framewise" / (v.id + ".txt"));
    scores_txt << v.id << " " << FormatDouble(r.log_score) << "\n";
  }
  WriteText(out / "scores.txt", scores_txt.str());
  WriteText(out / "infeasible.txt", infeasible_txt.str());
  WriteText(out / "config.txt", cfg.Serialize());
  log << "decoded " << (test.videos.size() - num_infeasible) << " of "
      << test.videos.size() << " videos (" << cfg.mode << " mode) into "
      << out.string() << "\n";
  return num_infeasible > 0 ? kExitPartial : kExitOk;
}

// ---- eval -----------------------------------------------------------------

int CmdEval(const PipelineConfig &cfg, std::ostream &out) {
  std::set<std::string> selected = SelectedMetrics(cfg);
  fs::path pred_dir = fs::path(cfg.output_dir) / "framewise";
  RequireDir("prediction directory", pred_dir);
  RequireCorpusDir("test_dir", cfg.TestDir());
  RequireDir("ground-truth directory", cfg.TestDir() / "groundtruth");

  bool any_pred = false;
  for (const auto &e : fs::directory_iterator(pred_dir))
    if (e.is_regular_file() && e.path().extension() == ".txt") any_pred = true;
  if (!any_pred)
    throw ValidationError("prediction directory " + pred_dir.string() +
                          " is empty");

  Corpus test = LoadCorpusDir(cfg.TestDir());
  const ClassTable &classes = test.class_table;
  std::vector<LabeledPrediction> items;
  std::vector<std::string> missing;
  for (const VideoRecord &v : test.videos) {
    if (!v.gt_labels) continue;
    fs::path pf = pred_dir / (v.id + ".txt");
    if (!fs::is_regular_file(pf)) {
      ACTSET_WARN << "no prediction for video " << v.id << "; excluded";
      missing.push_back(v.id);
      continue;
    }
    std::vector<ClassId> pred = ReadFramewiseLabels(pf, classes);
    if (pred.size() != v.gt_labels->size())
      throw ValidationError(pf.string() + ": " + std::to_string(pred.size()) +
                            " frames, ground truth has " +
                            std::to_string(v.gt_labels->size()));
    items.push_back({v.id, std::move(pred), *v.gt_labels});
  }
  if (items.empty())
    throw ValidationError("no prediction matches a ground-truth video");

  EvalReport report = Evaluate(items, classes);
  std::string table = FormatReportTable(report);
  std::ostringstream kv;
  for (const std::string &line : SplitLines(FormatReportKeyValues(report))) {
    std::string key = line.substr(0, line.find('='));
    bool keep = true;
    if (key.rfind("frame_accuracy", 0) == 0) keep = selected.count("accuracy");
    if (key.rfind("midpoint", 0) == 0) keep = selected.count("midpoint");
    if (key.rfind("jaccard", 0) == 0) keep = selected.count("jaccard");
    if (keep) kv << line << "\n";
  }
  kv << "excluded=" << missing.size() << "\n";
  kv << "seed=" << cfg.seed << "\n";

  fs::path dir(cfg.output_dir);
  WriteText(dir / "report.txt", table);
  WriteText(dir / "metrics.txt", kv.str());
  WriteText(dir / "eval_config.txt", cfg.Serialize());
  out << table << kv.str();
  return kExitOk;
}

// ---- grammar --------------------------------------------------------------

int CmdGrammar(const PipelineConfig &cfg, const std::optional<std::string> &accepts,
               const std::optional<std::string> &write_to, std::ostream &out) {
  ValidateGrammarKeys(cfg);
  bool needs_corpus = cfg.grammar != "file";
  if (needs_corpus) {
    ValidateLengthKeys(cfg);
    RequireCorpusDir("train_dir", cfg.TrainDir());
  }
  ClassTable classes;
  BuiltGrammar g;
  if (needs_corpus) {
    Corpus train = LoadCorpusDir(cfg.TrainDir());
    std::vector<double> means;
    if (cfg.grammar == "monte-carlo" || cfg.grammar == "text") {
      if (cfg.length_mean == "naive")
        means = EstimateNaive(train).lambda;
      else if (cfg.length_mean == "loss")
        means = EstimateLossBased(train, cfg.l_min).lambda;
      else if (cfg.length_mean == "loss-decoupled")
        means = EstimateLossBasedDecoupled(train, cfg.l_min).lambda;
      else
        means = ReadMeanLengths(cfg.lambda_file, train.class_table);
    }
    classes = train.class_table;
    g = BuildGrammar(cfg, train, means);
  } else {
    fs::path ct = fs::is_regular_file(fs::path(cfg.model_dir) / "classes.txt")
                      ? fs::path(cfg.model_dir) / "classes.txt"
                      : cfg.TrainDir() / "classes.txt";
    RequireFile("classes file", ct);
    classes = ReadClassTable(ct);
    g = BuildGrammar(cfg, Corpus{classes, {}, SplitTag::kTrain}, {});
  }

  LabelSequence query;
  if (accepts) {
    for (const std::string &name : SplitWhitespace(*accepts)) {
      std::optional<ClassId> c = classes.Find(name);
      if (!c) throw ValidationError("unknown class '" + name + "' in query");
      query.push_back(*c);
    }
  }

  const GrammarAutomaton &a = g.automaton;
  out << "grammar " << cfg.grammar << "\n";
  out << "states " << a.NumStates() << "\n";
  out << "arcs " << a.Arcs().size() << "\n";
  if (!a.IsFinite()) {
    out << "sequences infinite\n";
  } else {
    auto seqs = a.Enumerate(a.NumStates(), 10000000);
    out << "sequences " << (seqs ? std::to_string(seqs->size()) : ">10000000")
        << "\n";
  }
  if (accepts)
    out << "accepts \"" << Join(query, classes) << "\" "
        << (a.Accepts(query) ? "yes" : "no") << "\n";
  if (write_to) {
    if (g.sequences)
      WriteGrammarSequences(*g.sequences, classes, *write_to);
    else
      WriteAutomaton(a, classes, *write_to);
  }
  return kExitOk;
}

}  // namespace actset
