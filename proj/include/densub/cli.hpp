#pragma once

#include "densub/kv.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace densub {

inline constexpr const char* kVersion = "1.0.0";

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInput = 2,
  kExitNumerical = 3,
};

/// Runs one command line (args exclude the program name).
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err);
int cli_dispatch(int argc, char** argv);

/// Hex SHA-256 of a file's bytes.
std::string file_digest(const std::string& path);

/// Record of one CLI run: the arguments, seed, inputs and outputs with their
/// digests, and timestamps. Outputs flagged deterministic must be reproduced
/// byte for byte by `replay`.
struct RunManifest {
  std::string command;
  std::vector<std::string> args;
  std::string seed;
  std::vector<std::string> inputs;
  std::vector<std::pair<std::string, bool>> outputs;  // path, deterministic
  std::string started;
  std::string finished;

  KeyValue to_kv() const;
  static RunManifest from_kv(const KeyValue& kv);
};

}  // namespace densub
