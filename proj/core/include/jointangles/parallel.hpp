// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace jointangles {

/// Worker count from JCS_NUM_THREADS, else the hardware concurrency. Always
/// at least 1.
inline std::size_t thread_count_from_env() {
  std::size_t hardware = std::max(1U, std::thread::hardware_concurrency());
  if (const char* value = std::getenv("JCS_NUM_THREADS")) {
    try {
      const long requested = std::stol(value);
      if (requested >= 1) return static_cast<std::size_t>(requested);
    } catch (const std::exception&) {
      // Unparseable values fall back to the default.
    }
  }
  return hardware;
}

/// Runs body(i) for i in [0, n) on up to `threads` workers, each taking a
/// contiguous block. The first exception thrown by any worker is rethrown.
template <typename Body>
void parallel_for(std::size_t n, std::size_t threads, Body&& body) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> workers;
  workers.reserve(threads);
  const std::size_t block = (n + threads - 1) / threads;
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      try {
        const std::size_t end = std::min(n, (w + 1) * block);
        for (std::size_t i = w * block; i < end; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& worker : workers) worker.join();
  for (auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

}  // namespace jointangles
