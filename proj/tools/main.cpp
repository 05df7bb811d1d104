// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcfnet/cli.hpp"

int main(int argc, char** argv) { return mcfnet::cli::dispatch(argc, argv); }
