#pragma once

#include <map>
#include <ostream>
#include <string>

#include "matryoshka/process_library.hpp"

namespace matryoshka {

enum ExitCode : int { kExitOk = 0, kExitInvalid = 2, kExitNumerical = 3 };

/// Options that describe a process on the command line.
struct ProcessArgs {
  std::string process;
  std::string params;  // "k=v,k=v"
  std::string jumps;
  std::string collapse;
  std::string jumps_a;
  std::string jumps_b;
  std::string jumps_c;
};

/// Parses "k=v,..." into numbers. Throws InvalidInput naming the bad entry.
std::map<std::string, double> parse_params(const std::string& text);

/// Builds a ProcessSpec from command-line options. Throws InvalidInput.
ProcessSpec make_process(const ProcessArgs& args);

/// Entry point of the command-line tool. Documents go to `out`, diagnostics
/// to `err`; the return value is the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace matryoshka
