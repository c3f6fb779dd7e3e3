// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "jointangles/error.hpp"

namespace jointangles::cli {

/// Exit codes: 0 ok, 1 data error, 2 structural error or bad usage,
/// 3 internal-consistency error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitStructural = 2;
inline constexpr int kExitInternal = 3;

int exit_code(ErrorKind kind) noexcept;

/// Runs one `jointangles` invocation. `args` excludes the program name.
/// Results go to `out`; diagnostics go to `err` as `LEVEL code message`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jointangles::cli
