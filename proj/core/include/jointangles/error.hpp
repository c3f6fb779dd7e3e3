// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jointangles {

enum class ErrorKind {
  parse,
  unsupported_format,
  structural,
  argument,
  empty_input,
  invalid_transform,
  degenerate_frame,
  reconstruction_gap,
  domain,
  internal_consistency,
  io,
};

/// Stable snake_case identifier used in diagnostics (`LEVEL code message`).
std::string_view error_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view code() const noexcept { return error_code(kind_); }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(ErrorKind::parse, message), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UnsupportedFormatError : public Error {
 public:
  explicit UnsupportedFormatError(const std::string& message)
      : Error(ErrorKind::unsupported_format, message) {}
};

class StructuralError : public Error {
 public:
  explicit StructuralError(const std::string& message)
      : Error(ErrorKind::structural, message) {}
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& message)
      : Error(ErrorKind::argument, message) {}
};

class EmptyInputError : public Error {
 public:
  explicit EmptyInputError(const std::string& message)
      : Error(ErrorKind::empty_input, message) {}
};

class InvalidTransformError : public Error {
 public:
  explicit InvalidTransformError(const std::string& message)
      : Error(ErrorKind::invalid_transform, message) {}
};

class DegenerateFrameError : public Error {
 public:
  explicit DegenerateFrameError(const std::string& message)
      : Error(ErrorKind::degenerate_frame, message) {}
};

class ReconstructionGapError : public Error {
 public:
  explicit ReconstructionGapError(const std::string& message)
      : Error(ErrorKind::reconstruction_gap, message) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message)
      : Error(ErrorKind::domain, message) {}
};

class InternalConsistencyError : public Error {
 public:
  explicit InternalConsistencyError(const std::string& message)
      : Error(ErrorKind::internal_consistency, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorKind::io, message) {}
};

}  // namespace jointangles
