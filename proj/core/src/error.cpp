// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

#include "jointangles/error.hpp"

namespace jointangles {

std::string_view error_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parse: return "parse_error";
    case ErrorKind::unsupported_format: return "unsupported_format";
    case ErrorKind::structural: return "structural_error";
    case ErrorKind::argument: return "argument_error";
    case ErrorKind::empty_input: return "empty_input";
    case ErrorKind::invalid_transform: return "invalid_transform";
    case ErrorKind::degenerate_frame: return "degenerate_frame";
    case ErrorKind::reconstruction_gap: return "reconstruction_gap";
    case ErrorKind::domain: return "domain_error";
    case ErrorKind::internal_consistency: return "internal_consistency";
    case ErrorKind::io: return "io_error";
  }
  return "error";
}

}  // namespace jointangles
