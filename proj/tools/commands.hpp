#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace minnet::cli {

// Each command returns a process exit status. Empty paths mean stdout.

int cmd_schedule(std::uint32_t n, const std::filesystem::path& out_path, bool verify, std::ostream& out,
                 std::ostream& err);

int cmd_routes(std::uint32_t n, const std::filesystem::path& out_path, std::ostream& out, std::ostream& err);

/// Runs the simulation described by a config file. `repeat` > 1 runs that
/// many seeds (seed, seed+1, ...) concurrently, writing one record per run to
/// "<stem>.<k><ext>".
int cmd_simulate(const std::filesystem::path& config_path, const std::filesystem::path& out_override,
                 const std::filesystem::path& events_override, int repeat, std::ostream& out, std::ostream& err);

int cmd_pipeline(const std::filesystem::path& config_path, const std::filesystem::path& out_path, std::ostream& out,
                 std::ostream& err);

/// Full command line including argv[0].
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace minnet::cli
