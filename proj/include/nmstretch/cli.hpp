#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <variant>

namespace nmstretch {

enum ExitCode : int { kExitOk = 0, kExitIo = 1, kExitConfig = 2 };

struct CliArgs {
  std::filesystem::path input;
  std::filesystem::path output;
  std::optional<double> alpha;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> stems;
  std::optional<std::filesystem::path> onsets;
  std::optional<std::string> bit_depth;  // "16", "24" or "float"
  int verbosity = 0;
};

/// Parses `stretch <in> <out> --alpha <f> [--mode nm|ni|nd|an] [--seed <u64>]
/// [--config <path>] [--stems <dir>] [--onsets <csv>] [--bit-depth 16|24|float] [-v]`.
/// Returns the exit code instead when parsing stops (help, usage errors).
std::variant<CliArgs, int> parse_cli(int argc, const char* const* argv, std::ostream& out,
                                     std::ostream& err);

/// Loads the input, builds the configuration (defaults, then config file, then
/// flags), stretches and writes the outputs. Prints one `RESULT:` line to `out`.
int run_cli(const CliArgs& args, std::ostream& out, std::ostream& err);

int stretch_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nmstretch
