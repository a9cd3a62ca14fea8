// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace sglv {

/// Number of worker threads used by pixel-parallel loops. Defaults to the
/// SGLV_THREADS environment variable if set, else the logical core count.
int thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [0, n). Work items must be independent; results must
/// not depend on which thread runs which item.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace sglv
