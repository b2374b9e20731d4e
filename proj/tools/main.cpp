// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "evopiezo/cli.hpp"

int main(int argc, char** argv) {
  return evopiezo::run_cli(argc, argv, std::cout, std::cerr);
}
