#pragma once

#include <optional>
#include <string>

#include "minnet/pipeline.hpp"
#include "minnet/simnet.hpp"

namespace minnet {

/// One JSON object per run: the echoed config, then every Metrics field,
/// then the processing budget when stage times were given. Keys appear in a
/// fixed order so identical runs produce identical bytes.
std::string metrics_record(const SimConfig& cfg, const Metrics& m,
                           const std::optional<PipelineSettings>& pipeline = std::nullopt);

/// JSON object with stage times, latency, throughputs and per-slot budget.
std::string pipeline_record(const PipelineSettings& settings);

}  // namespace minnet
