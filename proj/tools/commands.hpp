// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace sglv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitValidation = 3;

/// Parses and runs one subcommand; returns the process exit code.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace sglv::cli
