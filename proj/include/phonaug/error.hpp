// Copyright 2026  The phonaug Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace phonaug {

enum class ErrorKind {
  kParse,
  kIntegrity,
  kRange,
  kCapacity,
  kVocabulary,
  kArgument,
  kFormat,
  kLength,
  kConfig,
  kData,
  kIndex,
  kShape,
  kDegenerate,
  kIo,
};

const char *ErrorKindName(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(std::string(ErrorKindName(kind)) + " error: " + what),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char *ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kIntegrity: return "integrity";
    case ErrorKind::kRange: return "range";
    case ErrorKind::kCapacity: return "capacity";
    case ErrorKind::kVocabulary: return "vocabulary";
    case ErrorKind::kArgument: return "argument";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kLength: return "length";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kData: return "data";
    case ErrorKind::kIndex: return "index";
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kDegenerate: return "degenerate-input";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace phonaug
