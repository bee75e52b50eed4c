#include <iostream>

#include "levelflow/cli.hpp"

int main(int argc, char** argv) { return levelflow::run_command_line(argc, argv, std::cout, std::cerr); }
