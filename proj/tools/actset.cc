// actset.cc

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

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "actset/pipeline.h"

namespace {

const char *kUsage =
    "Weakly supervised temporal action segmentation from action sets.\n"
    "Options override values read from --config.";

// Adds --<key> for every config key; the returned map holds the raw values.
std::map<std::string, CLI::Option *> AddConfigFlags(
    CLI::App *app, std::map<std::string, std::string> *values) {
  std::map<std::string, CLI::Option *> opts;
  for (const std::string &key : actset::PipelineConfig::Keys()) {
    std::string flag = key;
    for (char &ch : flag)
      if (ch == '_') ch = '-';
    opts[key] = app->add_option("--" + flag, (*values)[key], "config key " + key);
  }
  return opts;
}

actset::PipelineConfig Resolve(const std::string &config_file,
                               const std::map<std::string, CLI::Option *> &opts,
                               const std::map<std::string, std::string> &values) {
  actset::PipelineConfig cfg;
  if (!config_file.empty()) cfg.MergeFile(config_file);
  for (const auto &[key, opt] : opts)
    if (opt->count() > 0) cfg.Set(key, values.at(key));
  return cfg;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{kUsage, "actset"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App *app;
    std::string config;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option *> opts;
  };
  std::map<std::string, Sub> subs;
  const std::map<std::string, std::string> descriptions = {
      {"synth", "generate a synthetic corpus"},
      {"train", "estimate lengths, build the grammar, train the network"},
      {"infer", "decode every test video"},
      {"eval", "score predictions against ground truth"},
      {"grammar", "build or load a grammar and inspect it"},
  };
  for (const auto &[name, desc] : descriptions) {
    Sub &s = subs[name];
    s.app = app.add_subcommand(name, desc);
    s.app->add_option("--config", s.config, "key = value config file");
    s.opts = AddConfigFlags(s.app, &s.values);
  }
  std::string accepts, write_to;
  CLI::Option *accepts_opt = subs["grammar"].app->add_option(
      "--accepts", accepts, "space-separated class names to test");
  CLI::Option *write_opt = subs["grammar"].app->add_option(
      "--write", write_to, "write the grammar to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? actset::kExitOk : actset::kExitValidation;
  }

  try {
    for (auto &[name, s] : subs) {
      if (!s.app->parsed()) continue;
      actset::PipelineConfig cfg = Resolve(s.config, s.opts, s.values);
      if (name == "synth") return actset::CmdSynth(cfg, std::cout);
      if (name == "train") return actset::CmdTrain(cfg, std::cout);
      if (name == "infer") return actset::CmdInfer(cfg, std::cout);
      if (name == "eval") return actset::CmdEval(cfg, std::cout);
      std::optional<std::string> a, w;
      if (accepts_opt->count()) a = accepts;
      if (write_opt->count()) w = write_to;
      return actset::CmdGrammar(cfg, a, w, std::cout);
    }
  } catch (const actset::ParseError &e) {
    std::cerr << "ERROR: " << e.what() << std::endl;
    return actset::kExitValidation;
  } catch (const actset::ValidationError &e) {
    std::cerr << "ERROR: " << e.what() << std::endl;
    return actset::kExitValidation;
  } catch (const actset::ConfigError &e) {
    std::cerr << "ERROR: " << e.what() << std::endl;
    return actset::kExitValidation;
  } catch (const std::exception &e) {
    std::cerr << "ERROR: " << e.what() << std::endl;
    return actset::kExitRuntime;
  }
  return actset::kExitRuntime;
}
