// Command-line front end: flat key = value configs, subcommand dispatch and
// atomic CSV output.

#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nocp/montecarlo.hpp"

namespace nocp::cli {

/// Exit codes of `run`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitBadConfig = 2;
inline constexpr int kExitTooManyFailures = 3;

/// Sets one SimConfig field from its text form. Throws ConfigError naming the
/// key for unknown keys and unparsable values.
void apply_setting(SimConfig& cfg, std::string_view key, std::string_view value);

/// Reads `key = value` lines ('#' comments, blank lines ignored) on top of the
/// defaults, then applies `overrides` ("key=value" each) and validates.
SimConfig parse_config(std::istream& in, const std::vector<std::string>& overrides = {});
SimConfig load_config(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& overrides = {});

/// Text that parse_config reads back to an identical SimConfig.
std::string dump_config(const SimConfig& cfg);

/// Writes via a sibling temporary file renamed over `path` on success, so a
/// failed writer never leaves a truncated file behind.
void write_file_atomically(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);

/// Entry point; diagnostics go to `err`, results to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nocp::cli
