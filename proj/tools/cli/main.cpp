#include <iostream>

#include "unplab_cli.hpp"

int main(int argc, char** argv) { return unplab::cli::main_entry(argc, argv, std::cout, std::cerr); }
