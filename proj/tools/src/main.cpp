#include <iostream>

#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
  const auto parsed = sdosm::cli::parse_command_line(argc, argv);
  if (!parsed.config) return parsed.exit_code;
  return sdosm::cli::dispatch(*parsed.config, std::cout, std::cerr);
}
