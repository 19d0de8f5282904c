// actset/pipeline.h

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

#ifndef ACTSET_PIPELINE_H_
#define ACTSET_PIPELINE_H_

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "actset/base.h"

namespace actset {

/// Every knob of an experiment. Keys use snake_case in config files and
/// kebab-case on the command line (`l_min` <-> `--l-min`).
struct PipelineConfig {
  uint64_t seed = 1;

  // paths
  std::string data_dir = "data";
  std::string train_dir;  // default <data_dir>/train
  std::string test_dir;   // default <data_dir>/test
  std::string model_dir = "model";
  std::string output_dir = "predictions";

  // grammar
  std::string grammar = "monte-carlo";  // naive|monte-carlo|text|file|none
  int64_t grammar_k = 1000;
  std::string grammar_file;
  std::string text_file;
  int64_t text_window = 10;

  // lengths
  std::string length_mean = "loss";  // naive|loss|loss-decoupled|file
  std::string length_kind = "poisson";
  double l_min = 50.0;
  std::string lambda_file;
  double sigma_min = 15.0;

  // network
  int64_t hidden = 256;
  int64_t epochs = 10;
  int64_t batch_size = 512;
  double learning_rate = 0.01;
  int64_t frame_stride = 1;
  std::string supervision = "weak";  // weak|full

  // decoding
  int64_t stride = 30;
  int64_t max_length = 0;
  int64_t beam = 0;
  std::string mode = "free";  // free|given-sets
  bool use_grammar = true;
  bool use_length_model = true;

  // evaluation
  std::string metrics = "accuracy,midpoint,jaccard";

  // synthetic corpus
  int64_t synth_classes = 6;
  int64_t synth_dim = 8;
  double synth_separation = 10.0;
  double synth_noise = 1.0;
  int64_t synth_train = 20;
  int64_t synth_test = 10;
  int64_t synth_orderings = 8;
  int64_t synth_min_actions = 2;
  int64_t synth_max_actions = 4;
  bool synth_closing_background = true;
  double synth_min_mean = 60.0;
  double synth_max_mean = 180.0;
  std::string synth_format = "text";  // text|binary

  /// Throws ConfigError for unknown keys or unparsable values.
  void Set(const std::string &key, const std::string &value);
  std::string Get(const std::string &key) const;
  static const std::vector<std::string> &Keys();

  /// `key = value` lines ('#' starts a comment).
  void MergeFile(const std::filesystem::path &file);
  /// All keys, resolved, one `key = value` per line.
  std::string Serialize() const;

  std::filesystem::path TrainDir() const;
  std::filesystem::path TestDir() const;
};

/// Process exit codes of the command-line tool.
enum ExitCode {
  kExitOk = 0,
  kExitValidation = 1,
  kExitRuntime = 2,
  kExitPartial = 3,
};

/// Writes <data_dir>/{train,test}, the hidden orderings, and a manifest.
int CmdSynth(const PipelineConfig &cfg, std::ostream &log);

/// Writes classes.txt, grammar.txt, lengths.txt, net.bin, train.log and
/// config.txt under model_dir.
int CmdTrain(const PipelineConfig &cfg, std::ostream &log);

/// Decodes every test video into <output_dir>/segments and
/// <output_dir>/framewise. Returns kExitPartial if some video was
/// infeasible.
int CmdInfer(const PipelineConfig &cfg, std::ostream &log);

/// Compares <output_dir>/framewise with the test ground truth; prints the
/// report and writes report.txt and metrics.txt to output_dir.
int CmdEval(const PipelineConfig &cfg, std::ostream &out);

/// Builds (or loads) the configured grammar and prints its size. If
/// `accepts` is set, also prints whether that space-separated sequence is
/// admissible. If `write_to` is set, the automaton is written there.
int CmdGrammar(const PipelineConfig &cfg, const std::optional<std::string> &accepts,
               const std::optional<std::string> &write_to, std::ostream &out);

}  // namespace actset

#endif  // ACTSET_PIPELINE_H_
