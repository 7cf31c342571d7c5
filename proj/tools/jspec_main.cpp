// SPDX-License-Identifier: Apache-2.0
#include <vector>

#include "jspec/cli_main.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return jspec::run_cli(args);
}
