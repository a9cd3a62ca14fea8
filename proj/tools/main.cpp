// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

int main(int argc, char** argv) { return sglv::cli::run(argc, argv); }
