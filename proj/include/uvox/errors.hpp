// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <stdexcept>
#include <string>

namespace uvox {

// Bad arguments or inputs that violate an operation's contract.
class InvalidInputError : public std::runtime_error {
 public:
  explicit InvalidInputError(const std::string& msg)
      : std::runtime_error("invalid-input: " + msg) {}
};

// Malformed or unsupported file contents (WAV, matrix, config, vocab).
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& msg)
      : std::runtime_error("format: " + msg) {}
};

// Normal equations are singular; the caller should regularize.
class RankDeficiencyError : public std::runtime_error {
 public:
  explicit RankDeficiencyError(const std::string& msg)
      : std::runtime_error("rank-deficiency: " + msg) {}
};

}  // namespace uvox
