// Copyright 2026 The iotrans Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>
#include <vector>

#include "iotrans/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return iotrans::cli::dispatch(std::move(args), std::cout, std::cerr);
}
