// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "spheredyn/commands.hpp"

int main(int argc, char** argv) { return spheredyn::cli_main(argc, argv, std::cout, std::cerr); }
