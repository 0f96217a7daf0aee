#include <ostream>

#include <json.hpp>

#include "minnet/report.hpp"
#include "minnet/simnet.hpp"

namespace minnet {

std::string_view to_string(EventKind k)
{
    switch (k) {
    case EventKind::Arrive:
        return "arrive";
    case EventKind::Drop:
        return "drop";
    case EventKind::Deliver:
        return "deliver";
    case EventKind::Relay:
        return "relay";
    case EventKind::Steal:
        return "steal";
    case EventKind::Ack:
        return "ack";
    }
    return "unknown";
}

void write_event_header(std::ostream& out)
{
    out << "slot,event,from,to,packet_id\n";
}

void write_events(std::ostream& out, const std::vector<SlotEvent>& events)
{
    for (const auto& e : events)
        out << e.slot << ',' << to_string(e.kind) << ',' << e.from.value << ',' << e.to.value << ',' << e.packet
            << '\n';
}

namespace {

using nlohmann::ordered_json;

ordered_json pipeline_json(const PipelineSettings& settings)
{
    ordered_json j;
    ordered_json stages;
    for (const auto& s : settings.model.stages())
        stages[std::string(stage_name(s.stage))] = s.service_time;
    j["stages"] = stages;
    j["slot_duration"] = settings.slot_duration;
    j["packet_latency"] = packet_latency(settings.model);
    if (const auto t = steady_throughput(settings.model))
        j["steady_throughput"] = *t;
    else
        j["steady_throughput"] = "unbounded";
    if (const auto t = sequential_throughput(settings.model))
        j["sequential_throughput"] = *t;
    else
        j["sequential_throughput"] = "unbounded";
    if (const auto b = node_processing_budget(settings.model, settings.slot_duration))
        j["packets_per_slot"] = *b;
    else
        j["packets_per_slot"] = "uncapped";
    return j;
}

}  // namespace

std::string metrics_record(const SimConfig& cfg, const Metrics& m, const std::optional<PipelineSettings>& pipeline)
{
    ordered_json config;
    config["nodes"] = cfg.n_nodes;
    config["routing_level"] = cfg.routing_level;
    config["slots"] = cfg.slots_to_run;
    config["arrival_rate"] = cfg.arrival_rate;
    config["traffic_model"] = std::string(to_string(cfg.traffic_model));
    config["trace_records"] = cfg.trace.size();
    config["seed"] = cfg.seed;
    if (cfg.buffer_capacity)
        config["buffer_capacity"] = *cfg.buffer_capacity;
    else
        config["buffer_capacity"] = "unlimited";
    config["secondary_receivers"] = cfg.secondary_receivers;
    config["control_overhead"] = cfg.control_overhead;
    config["baseline"] = std::string(to_string(cfg.baseline));
    if (cfg.processing_budget)
        config["processing_budget"] = *cfg.processing_budget;
    else
        config["processing_budget"] = "uncapped";

    ordered_json metrics;
    metrics["slots_run"] = m.slots_run;
    metrics["packets_offered"] = m.packets_offered;
    metrics["packets_delivered"] = m.packets_delivered;
    metrics["packets_dropped"] = m.packets_dropped;
    metrics["packets_in_flight"] = m.packets_in_flight;
    metrics["mean_delay_slots"] = m.mean_delay_slots;
    metrics["p95_delay_slots"] = m.p95_delay_slots;
    metrics["max_delay_slots"] = m.max_delay_slots;
    metrics["throughput"] = m.throughput;
    metrics["scheduled_slot_utilization"] = m.scheduled_slot_utilization;
    metrics["data_transmissions"] = m.data_transmissions;
    metrics["max_pair_goodput"] = m.max_pair_goodput;
    metrics["steal_attempts"] = m.steal_attempts;
    metrics["steal_grants"] = m.steal_grants;
    metrics["max_buffer_occupancy"] = m.max_buffer_occupancy;
    ordered_json hops = ordered_json::object();
    for (const auto& [h, count] : m.hop_histogram)
        hops[std::to_string(h)] = count;
    metrics["hop_histogram"] = hops;

    ordered_json record;
    record["config"] = config;
    record["metrics"] = metrics;
    if (pipeline)
        record["pipeline"] = pipeline_json(*pipeline);
    return record.dump(2) + "\n";
}

std::string pipeline_record(const PipelineSettings& settings)
{
    return pipeline_json(settings).dump(2) + "\n";
}

}  // namespace minnet
