#include "minnet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace minnet {

std::string_view stage_name(Stage s)
{
    switch (s) {
    case Stage::Fn11:
        return "fn11";
    case Stage::Fn12:
        return "fn12";
    case Stage::Fn21:
        return "fn21";
    case Stage::Controller:
        return "controller";
    case Stage::SlotFilter:
        return "slot_filter";
    case Stage::RoutingFilter:
        return "routing_filter";
    }
    return "unknown";
}

std::optional<Stage> stage_from_name(std::string_view name)
{
    for (const auto s : kAllStages)
        if (stage_name(s) == name)
            return s;
    return std::nullopt;
}

PipelineModel::PipelineModel(const std::array<double, 6>& service_times)
{
    for (const auto s : kAllStages)
        set_service_time(s, service_times[static_cast<std::size_t>(s)]);
}

void PipelineModel::set_service_time(Stage s, double t)
{
    if (!std::isfinite(t) || t < 0.0)
        throw std::invalid_argument("service time of " + std::string(stage_name(s)) + " must be finite and >= 0");
    times_[static_cast<std::size_t>(s)] = t;
}

std::vector<StageSpec> PipelineModel::stages() const
{
    std::vector<StageSpec> out;
    for (const auto s : kAllStages)
        out.push_back({s, service_time(s)});
    return out;
}

std::vector<StageRelation> PipelineModel::relations()
{
    return {
        {Stage::Fn11, Stage::Fn21, ProcessClass::Pipelined},
        {Stage::Fn11, Stage::Fn12, ProcessClass::Parallel},
        // fn21 and fn12 both write the shared buffer the controller reads.
        {Stage::Fn21, Stage::Controller, ProcessClass::Concurrent},
        {Stage::Fn12, Stage::Controller, ProcessClass::Concurrent},
        {Stage::Controller, Stage::SlotFilter, ProcessClass::Pipelined},
        {Stage::SlotFilter, Stage::RoutingFilter, ProcessClass::Pipelined},
    };
}

double packet_latency(const PipelineModel& m)
{
    const double join = std::max(m.service_time(Stage::Fn11) + m.service_time(Stage::Fn21),
                                 m.service_time(Stage::Fn12));
    return join + m.service_time(Stage::Controller) + m.service_time(Stage::SlotFilter) +
           m.service_time(Stage::RoutingFilter);
}

std::optional<double> steady_throughput(const PipelineModel& m)
{
    double bottleneck = 0.0;
    for (const auto s : kAllStages)
        bottleneck = std::max(bottleneck, m.service_time(s));
    if (bottleneck == 0.0)
        return std::nullopt;
    return 1.0 / bottleneck;
}

std::optional<double> sequential_throughput(const PipelineModel& m)
{
    double total = 0.0;
    for (const auto s : kAllStages)
        total += m.service_time(s);
    if (total == 0.0)
        return std::nullopt;
    return 1.0 / total;
}

std::optional<std::int64_t> node_processing_budget(const PipelineModel& m, double slot_duration)
{
    if (!std::isfinite(slot_duration) || slot_duration <= 0.0)
        throw std::invalid_argument("slot duration must be positive");
    double bottleneck = 0.0;
    for (const auto s : kAllStages)
        bottleneck = std::max(bottleneck, m.service_time(s));
    if (bottleneck == 0.0)
        return std::nullopt;
    // Divide rather than multiply by the rate so that exact multiples of the
    // bottleneck do not round down.
    return static_cast<std::int64_t>(std::floor(slot_duration / bottleneck));
}

}  // namespace minnet
