// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SCT_ERROR_HPP
#define SCT_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sct {

enum class ErrorCode {
  InvalidQuaternion,
  AllPointsCoincident,
  DegenerateFrame,
  EigenFailure,
  ConfigError,
  TrainingDiverged,
  InvalidCount,
  MalformedHeader,
  IndexOutOfRange,
  TruncatedFile,
  NonNumericToken,
  ZeroAreaMesh,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parser failure pinned to a 1-based line of the input.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t line, const std::string& message)
      : Error(code, "line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace sct

#endif  // SCT_ERROR_HPP
