#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "minnet/routing.hpp"
#include "minnet/schedule.hpp"

namespace minnet {

using PacketId = std::uint64_t;

/// Invalid configuration value; key() names the offending setting.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string key, const std::string& message)
        : std::invalid_argument(key + ": " + message), key_(std::move(key))
    {
    }

    const std::string& key() const { return key_; }

private:
    std::string key_;
};

enum class TrafficModel { UniformRandom, Trace };
enum class Baseline { Min, SwiftLike };

std::string_view to_string(TrafficModel m);
std::string_view to_string(Baseline b);

struct TraceRecord {
    GlobalSlot arrival_slot = 1;
    NodeId source;
    NodeId destination;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Parses "arrival_slot,src,dst" lines. An optional header line with those
/// names, blank lines and '#' comments are skipped. Throws ConfigError
/// ("trace") for self-addressed records, unknown nodes, slots < 1 or
/// decreasing arrival slots.
std::vector<TraceRecord> parse_trace_csv(std::string_view text, std::uint32_t n_nodes);

struct SimConfig {
    std::uint32_t n_nodes = 8;
    int routing_level = 0;
    std::int64_t slots_to_run = 1000;
    /// Probability that a node emits a packet in a slot.
    double arrival_rate = 0.0;
    TrafficModel traffic_model = TrafficModel::UniformRandom;
    std::vector<TraceRecord> trace;
    std::uint64_t seed = 1;
    /// Packets a node may queue; nullopt is unlimited.
    std::optional<std::uint64_t> buffer_capacity;
    std::uint32_t secondary_receivers = 1;
    /// Share of each slot spent on status/request/grant exchanges (level 2).
    double control_overhead = 0.0;
    Baseline baseline = Baseline::Min;
    /// Transmissions a node's processors can prepare per slot; nullopt is
    /// uncapped.
    std::optional<std::int64_t> processing_budget;
};

/// Throws ConfigError naming the first invalid field.
void validate(const SimConfig& cfg);

struct Packet {
    PacketId id = 0;
    NodeId source;
    NodeId destination;
    GlobalSlot arrival_slot = 0;
    NodeId holder;
    std::optional<GlobalSlot> delivered_slot;
    std::uint32_t hops = 0;
    std::vector<NodeId> relay_trace;
};

/// Per-slot packet arrivals, deterministic for a given config.
class TrafficSource {
public:
    explicit TrafficSource(const SimConfig& cfg);

    /// Packets arriving during `slot`. Slots must be requested in
    /// increasing order.
    std::vector<Packet> generate(GlobalSlot slot);

private:
    bool bernoulli(double p);
    std::uint64_t below(std::uint64_t bound);

    std::uint32_t n_;
    double rate_;
    TrafficModel model_;
    std::vector<TraceRecord> trace_;
    std::size_t cursor_ = 0;
    std::mt19937_64 rng_;
    PacketId next_id_ = 0;
};

struct Transmission {
    NodeId from;
    NodeId to;
    PacketId packet = 0;
};

enum class ControlKind { Status, Request, Grant, Deny };

struct ControlRecord {
    ControlKind kind;
    NodeId from;
    NodeId to;
    /// Status: sender has data for its scheduled partner this slot.
    bool has_traffic = false;
};

/// What happens in one slot: the status/request/grant preamble and the data
/// transmissions it settles on.
struct SlotPlan {
    GlobalSlot slot = 0;
    SlotIndex phase;
    /// Data on the slot's scheduled links.
    std::vector<Transmission> scheduled;
    /// Data sent to a third node's secondary receiver.
    std::vector<Transmission> steals;
    /// Stop-and-wait acknowledgements (baseline only); packet is the one
    /// being acknowledged.
    std::vector<Transmission> acks;
    std::vector<ControlRecord> control;
};

enum class EventKind { Arrive, Drop, Deliver, Relay, Steal, Ack };

std::string_view to_string(EventKind k);

struct SlotEvent {
    GlobalSlot slot = 0;
    EventKind kind;
    NodeId from;
    NodeId to;
    PacketId packet = 0;
};

struct Metrics {
    std::int64_t slots_run = 0;
    std::uint64_t packets_offered = 0;
    std::uint64_t packets_delivered = 0;
    std::uint64_t packets_dropped = 0;
    std::uint64_t packets_in_flight = 0;
    double mean_delay_slots = 0.0;
    double p95_delay_slots = 0.0;
    std::int64_t max_delay_slots = 0;
    /// Delivered packets per slot.
    double throughput = 0.0;
    /// Of the node-slots where a scheduled node had queued packets, the
    /// share in which it transmitted data (scheduled or stolen).
    double scheduled_slot_utilization = 0.0;
    std::uint64_t data_transmissions = 0;
    /// Largest data rate carried by one directed node pair, packets/slot.
    double max_pair_goodput = 0.0;
    std::uint64_t steal_attempts = 0;
    std::uint64_t steal_grants = 0;
    std::uint64_t max_buffer_occupancy = 0;
    /// Delivered packets by number of transmissions taken.
    std::map<std::uint32_t, std::uint64_t> hop_histogram;
};

/// State of every node in a running network plus the counters behind
/// Metrics. A slot is advanced by begin_slot(), admit(), plan_slot() and
/// execute_slot(), in that order.
class Network {
public:
    explicit Network(const SimConfig& cfg);

    const SimConfig& config() const { return cfg_; }
    const AllocationMatrix& matrix() const { return matrix_; }
    /// Null below routing level 1 and for the baseline.
    const RoutingTable* routing_table() const { return routing_ ? &*routing_ : nullptr; }

    void begin_slot(GlobalSlot slot);
    /// Queues new packets at their sources; full buffers drop the arrival.
    std::vector<SlotEvent> admit(std::vector<Packet> arrivals);
    SlotPlan plan_slot(GlobalSlot slot) const;
    /// Throws std::logic_error if the plan does not match the current state.
    std::vector<SlotEvent> execute_slot(const SlotPlan& plan);

    const Packet& packet(PacketId id) const { return packets_.at(id); }
    std::uint64_t queued_at(NodeId node) const { return nodes_.at(node.value).queued; }
    /// Packets queued at `node` for `destination`, oldest first.
    const std::deque<PacketId>& queue(NodeId node, NodeId destination) const
    {
        return nodes_.at(node.value).queues.at(destination.value);
    }

    std::uint64_t offered() const { return offered_; }
    std::uint64_t delivered() const { return delivered_; }
    std::uint64_t dropped() const { return dropped_; }
    std::uint64_t in_flight() const;

    Metrics metrics() const;

private:
    struct NodeState {
        NodeId id;
        std::vector<std::deque<PacketId>> queues;
        std::uint64_t queued = 0;
        /// Baseline: destinations with an unacknowledged packet outstanding.
        std::vector<bool> awaiting_ack;
        /// Baseline: packet this node must acknowledge to each peer.
        std::vector<std::optional<PacketId>> ack_due;
    };

    bool has_data_capacity(GlobalSlot slot) const;
    bool can_transmit(GlobalSlot slot) const;
    std::optional<PacketId> scheduled_choice(const NodeState& node, NodeId partner, SlotIndex phase) const;
    std::optional<PacketId> oldest_queued(const NodeState& node) const;
    bool older(PacketId a, PacketId b) const;
    void plan_min(SlotPlan& plan) const;
    void plan_swift_like(SlotPlan& plan) const;
    void enqueue(NodeState& node, PacketId id, std::vector<SlotEvent>& events, GlobalSlot slot, NodeId from);
    void deliver(Packet& p, NodeId from, GlobalSlot slot, std::vector<SlotEvent>& events);
    void pop_planned(const Transmission& tx);
    void track_occupancy();

    SimConfig cfg_;
    AllocationMatrix matrix_;
    GlobalSlot current_slot_ = 0;
    std::optional<RoutingTable> routing_;
    std::vector<NodeState> nodes_;
    std::vector<Packet> packets_;

    std::int64_t slots_run_ = 0;
    std::uint64_t offered_ = 0;
    std::uint64_t delivered_ = 0;
    std::uint64_t dropped_ = 0;
    std::uint64_t data_transmissions_ = 0;
    std::uint64_t backlogged_node_slots_ = 0;
    std::uint64_t busy_backlogged_node_slots_ = 0;
    std::uint64_t steal_attempts_ = 0;
    std::uint64_t steal_grants_ = 0;
    std::uint64_t max_occupancy_ = 0;
    std::vector<std::uint64_t> pair_transmissions_;
    std::vector<std::int64_t> delays_;
    std::map<std::uint32_t, std::uint64_t> hops_;
};

/// Called after each executed slot with the plan and every event of the
/// slot (arrivals, drops, deliveries, relays, steals, acks).
using SlotObserver = std::function<void(const Network&, const SlotPlan&, const std::vector<SlotEvent>&)>;

/// Runs cfg.slots_to_run slots from global slot 1. Dispatches to the
/// stop-and-wait baseline when cfg.baseline says so.
Metrics run(const SimConfig& cfg, const SlotObserver& observer = {});

/// Half-duplex stop-and-wait on the same schedule. Requires
/// cfg.baseline == Baseline::SwiftLike.
Metrics run_baseline_swift_like(const SimConfig& cfg, const SlotObserver& observer = {});

void write_event_header(std::ostream& out);
void write_events(std::ostream& out, const std::vector<SlotEvent>& events);

}  // namespace minnet
