// actset/text-util.h

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

#ifndef ACTSET_TEXT_UTIL_H_
#define ACTSET_TEXT_UTIL_H_

#include <string>
#include <vector>

#include "actset/base.h"

namespace actset {

std::vector<std::string> SplitWhitespace(const std::string &s);
std::string Trim(const std::string &s);

// The Parse* helpers throw ParseError(file, line) on malformed input.
int64_t ParseInt(const std::string &s, const std::string &file, int64_t line);
float ParseFloat(const std::string &s, const std::string &file, int64_t line);
double ParseDouble(const std::string &s, const std::string &file, int64_t line);

/// Shortest decimal that parses back to exactly `v`.
std::string FormatDouble(double v);

}  // namespace actset

#endif  // ACTSET_TEXT_UTIL_H_
