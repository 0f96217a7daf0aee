#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace minnet {

/// Functions of a node's transmit section.
enum class Stage { Fn11, Fn12, Fn21, Controller, SlotFilter, RoutingFilter };

inline constexpr std::array<Stage, 6> kAllStages = {Stage::Fn11,       Stage::Fn12,       Stage::Fn21,
                                                    Stage::Controller, Stage::SlotFilter, Stage::RoutingFilter};

std::string_view stage_name(Stage s);
/// Inverse of stage_name(); nullopt for unknown names.
std::optional<Stage> stage_from_name(std::string_view name);

/// How two processes relate when handling packets.
enum class ProcessClass {
    Parallel,    // independent of each other
    Concurrent,  // share data under mutual exclusion; not a timing element
    Pipelined,   // one consumes the other's output
};

struct StageRelation {
    Stage from;
    Stage to;
    ProcessClass kind;
};

struct StageSpec {
    Stage stage;
    double service_time = 0.0;
};

/// Transmit section: fn11 -> fn21 in series, fn12 alongside that chain,
/// both feeding the shared buffer, which the controller drains into the
/// slot filter and then the routing filter.
class PipelineModel {
public:
    PipelineModel() = default;
    /// Throws std::invalid_argument for negative or non-finite times.
    explicit PipelineModel(const std::array<double, 6>& service_times);

    double service_time(Stage s) const { return times_[static_cast<std::size_t>(s)]; }
    void set_service_time(Stage s, double t);

    std::vector<StageSpec> stages() const;
    static std::vector<StageRelation> relations();

private:
    std::array<double, 6> times_{};
};

/// Stage times plus the slot length they are measured against.
struct PipelineSettings {
    PipelineModel model;
    double slot_duration = 1.0;
};

/// Critical path: max(fn11 + fn21, fn12) + controller + slot_filter + routing_filter.
double packet_latency(const PipelineModel& m);

/// 1 / bottleneck service time, one processor per stage. nullopt when every
/// stage is free (unbounded rate).
std::optional<double> steady_throughput(const PipelineModel& m);

/// 1 / sum of service times: the same work done on a single processor.
std::optional<double> sequential_throughput(const PipelineModel& m);

/// floor(slot_duration * steady_throughput), or nullopt (no cap) when the
/// throughput is unbounded. Throws std::invalid_argument unless
/// slot_duration > 0.
std::optional<std::int64_t> node_processing_budget(const PipelineModel& m, double slot_duration);

}  // namespace minnet
