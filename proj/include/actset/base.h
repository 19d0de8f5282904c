// actset/base.h

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

#ifndef ACTSET_BASE_H_
#define ACTSET_BASE_H_

#include <cstdint>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace actset {

typedef int32_t ClassId;
typedef std::vector<ClassId> LabelSequence;

/// All sampling in the library goes through this engine so that a seed
/// fully determines every artifact.
typedef std::mt19937_64 RandomEngine;

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

/// Malformed input file; carries the file and 1-based line.
class ParseError : public Error {
 public:
  ParseError(const std::string &file, int64_t line, const std::string &msg)
      : Error(file + ":" + std::to_string(line) + ": " + msg),
        file_(file), line_(line) {}
  const std::string &file() const { return file_; }
  int64_t line() const { return line_; }

 private:
  std::string file_;
  int64_t line_;
};

/// Well-formed input that violates a contract (unknown class, dim mismatch).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string &msg) : Error(msg) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string &msg) : Error(msg) {}
};

/// Non-finite values, divergence, non-convergence.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string &msg) : Error(msg) {}
};

/// No segmentation satisfies the decoding constraints.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string &msg) : Error(msg) {}
};

namespace internal {

class LogMessage {
 public:
  explicit LogMessage(const char *level) { stream_ << level << ": "; }
  ~LogMessage() { std::cerr << stream_.str() << std::endl; }
  std::ostream &stream() { return stream_; }

 private:
  std::ostringstream stream_;
};

}  // namespace internal

#define ACTSET_LOG ::actset::internal::LogMessage("LOG").stream()
#define ACTSET_WARN ::actset::internal::LogMessage("WARNING").stream()

}  // namespace actset

#endif  // ACTSET_BASE_H_
