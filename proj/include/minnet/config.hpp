#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "minnet/pipeline.hpp"
#include "minnet/simnet.hpp"

namespace minnet {

/// Contents of a run config file.
struct RunConfig {
    SimConfig sim;
    /// Present when any stage.* key or slot_duration is given; also sets
    /// sim.processing_budget.
    std::optional<PipelineSettings> pipeline;
    std::string metrics_out;
    std::string events_out;
};

/// Parses flat "key = value" lines ('#' starts a comment). Unknown or
/// repeated keys and invalid values throw ConfigError naming the key. A
/// relative trace path is resolved against base_dir.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});

RunConfig load_run_config(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace minnet
