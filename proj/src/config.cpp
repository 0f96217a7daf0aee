#include "minnet/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace minnet {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

template <typename T>
T number(const std::string& key, std::string_view value)
{
    T v{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || ec != std::errc() || ptr != value.data() + value.size())
        throw ConfigError(key, "'" + std::string(value) + "' is not a valid number");
    return v;
}

constexpr std::string_view kStagePrefix = "stage.";

}  // namespace

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir)
{
    std::map<std::string, std::string> entries;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        auto line = text.substr(0, eol);
        text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no), "expected key = value");
        const auto key = std::string(trim(line.substr(0, eq)));
        const auto value = std::string(trim(line.substr(eq + 1)));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no), "empty key");
        if (!entries.emplace(key, value).second)
            throw ConfigError(key, "given more than once");
    }

    RunConfig cfg;
    std::optional<std::string> trace_path;
    bool have_pipeline = false;
    PipelineSettings pipeline;

    for (const auto& [key, value] : entries) {
        if (key == "nodes") {
            cfg.sim.n_nodes = number<std::uint32_t>(key, value);
        } else if (key == "routing_level") {
            cfg.sim.routing_level = number<int>(key, value);
        } else if (key == "slots") {
            cfg.sim.slots_to_run = number<std::int64_t>(key, value);
        } else if (key == "arrival_rate") {
            cfg.sim.arrival_rate = number<double>(key, value);
        } else if (key == "traffic_model") {
            if (value == "uniform-random")
                cfg.sim.traffic_model = TrafficModel::UniformRandom;
            else if (value == "trace")
                cfg.sim.traffic_model = TrafficModel::Trace;
            else
                throw ConfigError(key, "expected 'uniform-random' or 'trace'");
        } else if (key == "trace") {
            trace_path = value;
        } else if (key == "seed") {
            cfg.sim.seed = number<std::uint64_t>(key, value);
        } else if (key == "buffer_capacity") {
            if (value == "unlimited")
                cfg.sim.buffer_capacity.reset();
            else
                cfg.sim.buffer_capacity = number<std::uint64_t>(key, value);
        } else if (key == "secondary_receivers") {
            cfg.sim.secondary_receivers = number<std::uint32_t>(key, value);
        } else if (key == "control_overhead") {
            cfg.sim.control_overhead = number<double>(key, value);
        } else if (key == "baseline") {
            if (value == "min")
                cfg.sim.baseline = Baseline::Min;
            else if (value == "swift_like")
                cfg.sim.baseline = Baseline::SwiftLike;
            else
                throw ConfigError(key, "expected 'min' or 'swift_like'");
        } else if (key == "slot_duration") {
            pipeline.slot_duration = number<double>(key, value);
            have_pipeline = true;
        } else if (key.starts_with(kStagePrefix)) {
            const auto stage = stage_from_name(std::string_view(key).substr(kStagePrefix.size()));
            if (!stage)
                throw ConfigError(key, "unknown stage");
            const auto time = number<double>(key, value);
            try {
                pipeline.model.set_service_time(*stage, time);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(key, e.what());
            }
            have_pipeline = true;
        } else if (key == "metrics_out") {
            cfg.metrics_out = value;
        } else if (key == "events_out") {
            cfg.events_out = value;
        } else {
            throw ConfigError(key, "unknown key");
        }
    }

    if (cfg.sim.traffic_model == TrafficModel::Trace) {
        if (!trace_path)
            throw ConfigError("trace", "traffic_model = trace needs a trace file");
        std::filesystem::path p(*trace_path);
        if (p.is_relative() && !base_dir.empty())
            p = base_dir / p;
        std::string text_data;
        try {
            text_data = read_file(p);
        } catch (const std::runtime_error& e) {
            throw ConfigError("trace", e.what());
        }
        cfg.sim.trace = parse_trace_csv(text_data, cfg.sim.n_nodes);
    } else if (trace_path) {
        throw ConfigError("trace", "only valid with traffic_model = trace");
    }

    if (have_pipeline) {
        try {
            cfg.sim.processing_budget = node_processing_budget(pipeline.model, pipeline.slot_duration);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("slot_duration", e.what());
        }
        cfg.pipeline = pipeline;
    }

    validate(cfg.sim);
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path)
{
    const auto text = read_file(path);
    return parse_run_config(text, path.parent_path());
}

}  // namespace minnet
