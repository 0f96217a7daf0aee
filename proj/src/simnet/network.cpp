#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "minnet/simnet.hpp"

namespace minnet {

namespace {

AllocationMatrix validated_matrix(const SimConfig& cfg)
{
    validate(cfg);
    return build_allocation_matrix(cfg.n_nodes);
}

[[noreturn]] void inconsistent(const std::string& what)
{
    throw std::logic_error("simulator state inconsistent: " + what);
}

}  // namespace

Network::Network(const SimConfig& cfg) : cfg_(cfg), matrix_(validated_matrix(cfg))
{
    const auto n = cfg_.n_nodes;
    if (cfg_.baseline == Baseline::Min && cfg_.routing_level >= 1)
        routing_ = build_routing_table(matrix_);
    nodes_.resize(n);
    for (std::uint32_t u = 0; u < n; ++u) {
        nodes_[u].id = NodeId(u);
        nodes_[u].queues.resize(n);
        nodes_[u].awaiting_ack.assign(n, false);
        nodes_[u].ack_due.assign(n, std::nullopt);
    }
    pair_transmissions_.assign(std::size_t{n} * n, 0);
}

std::uint64_t Network::in_flight() const
{
    std::uint64_t total = 0;
    for (const auto& node : nodes_)
        total += node.queued;
    return total;
}

void Network::begin_slot(GlobalSlot slot)
{
    if (slot <= current_slot_)
        inconsistent("slot " + std::to_string(slot) + " does not advance past " + std::to_string(current_slot_));
    current_slot_ = slot;
    ++slots_run_;
}

bool Network::has_data_capacity(GlobalSlot slot) const
{
    if (cfg_.routing_level != 2 || cfg_.control_overhead == 0.0)
        return true;
    // The preamble eats a share of every slot; whole packets fit in the
    // slots where the cumulative data time crosses an integer.
    const double share = 1.0 - cfg_.control_overhead;
    return std::floor(static_cast<double>(slot) * share) > std::floor(static_cast<double>(slot - 1) * share);
}

bool Network::can_transmit(GlobalSlot slot) const
{
    if (cfg_.processing_budget && *cfg_.processing_budget < 1)
        return false;
    return has_data_capacity(slot);
}

bool Network::older(PacketId a, PacketId b) const
{
    const auto& pa = packets_[a];
    const auto& pb = packets_[b];
    if (pa.arrival_slot != pb.arrival_slot)
        return pa.arrival_slot < pb.arrival_slot;
    return pa.id < pb.id;
}

std::optional<PacketId> Network::oldest_queued(const NodeState& node) const
{
    std::optional<PacketId> best;
    for (const auto& q : node.queues)
        if (!q.empty() && (!best || older(q.front(), *best)))
            best = q.front();
    return best;
}

std::optional<PacketId> Network::scheduled_choice(const NodeState& node, NodeId partner, SlotIndex phase) const
{
    if (cfg_.routing_level == 0 || cfg_.baseline == Baseline::SwiftLike) {
        const auto& q = node.queues[partner.value];
        if (q.empty())
            return std::nullopt;
        return q.front();
    }

    std::optional<PacketId> best;
    for (std::uint32_t d = 0; d < cfg_.n_nodes; ++d) {
        const auto& q = node.queues[d];
        if (q.empty() || level1_decision(*routing_, node.id, NodeId(d), phase) != Level1Decision::TransmitToPartner)
            continue;
        if (!best || older(q.front(), *best))
            best = q.front();
    }
    return best;
}

SlotPlan Network::plan_slot(GlobalSlot slot) const
{
    SlotPlan plan;
    plan.slot = slot;
    plan.phase = phase_of(slot, matrix_.cycle_length());
    if (cfg_.baseline == Baseline::SwiftLike)
        plan_swift_like(plan);
    else
        plan_min(plan);
    return plan;
}

void Network::plan_min(SlotPlan& plan) const
{
    const auto n = cfg_.n_nodes;
    const bool able = can_transmit(plan.slot);

    // Phase 1: status bits on the control sub-channels.
    std::vector<std::optional<PacketId>> choice(n);
    for (std::uint32_t u = 0; u < n; ++u) {
        const auto partner = partner_of(matrix_, NodeId(u), plan.phase);
        if (partner && able)
            choice[u] = scheduled_choice(nodes_[u], *partner, plan.phase);
    }
    for (std::uint32_t u = 0; u < n; ++u) {
        const auto partner = partner_of(matrix_, NodeId(u), plan.phase);
        if (!partner)
            continue;
        plan.control.push_back({ControlKind::Status, NodeId(u), *partner, choice[u].has_value()});
        if (choice[u])
            plan.scheduled.push_back({NodeId(u), *partner, *choice[u]});
    }
    if (cfg_.routing_level < 2 || !able)
        return;

    // Phase 2: members of mutually idle pairs ask for the destination of
    // their oldest packet.
    struct Request {
        NodeId thief;
        NodeId target;
        PacketId packet;
    };
    std::vector<Request> requests;
    for (std::uint32_t u = 0; u < n; ++u) {
        const auto partner = partner_of(matrix_, NodeId(u), plan.phase);
        if (!partner || partner->value < u || choice[u] || choice[partner->value])
            continue;
        const auto v = partner->value;
        auto want = [&](std::uint32_t x) -> std::optional<Request> {
            const auto oldest = oldest_queued(nodes_[x]);
            if (!oldest)
                return std::nullopt;
            const auto target = packets_[*oldest].destination;
            // A packet for the partner would have claimed the scheduled link.
            if (matrix_.cell(NodeId(x), plan.phase) == static_cast<std::int32_t>(target.value))
                return std::nullopt;
            return Request{NodeId(x), target, *oldest};
        };
        for (const auto& r : {want(u), want(v)}) {
            if (!r)
                continue;
            requests.push_back(*r);
            plan.control.push_back({ControlKind::Request, r->thief, r->target, true});
        }
    }

    // Phase 3: each target grants its secondary receivers, lowest id first.
    // Two members of one idle pair asking for the same target are settled
    // the same way: the higher id is refused.
    std::stable_sort(requests.begin(), requests.end(), [](const Request& a, const Request& b) {
        return a.target != b.target ? a.target < b.target : a.thief < b.thief;
    });
    std::uint32_t granted_here = 0;
    std::vector<NodeId> granted_thieves;
    for (std::size_t i = 0; i < requests.size(); ++i) {
        if (i == 0 || requests[i].target != requests[i - 1].target) {
            granted_here = 0;
            granted_thieves.clear();
        }
        const auto& r = requests[i];
        const auto mate = partner_of(matrix_, r.thief, plan.phase);
        const bool mate_granted =
            mate && std::find(granted_thieves.begin(), granted_thieves.end(), *mate) != granted_thieves.end();
        if (granted_here < cfg_.secondary_receivers && !mate_granted) {
            granted_thieves.push_back(r.thief);
            ++granted_here;
            plan.control.push_back({ControlKind::Grant, r.target, r.thief, true});
            plan.steals.push_back({r.thief, r.target, r.packet});
        } else {
            plan.control.push_back({ControlKind::Deny, r.target, r.thief, false});
        }
    }
    std::sort(plan.steals.begin(), plan.steals.end(),
              [](const Transmission& a, const Transmission& b) { return a.from < b.from; });
}

void Network::plan_swift_like(SlotPlan& plan) const
{
    const bool able = can_transmit(plan.slot);
    for (std::uint32_t u = 0; u < cfg_.n_nodes; ++u) {
        const auto partner = partner_of(matrix_, NodeId(u), plan.phase);
        if (!partner || partner->value < u)
            continue;
        const auto v = partner->value;
        // Half duplex: one transmitter per meeting, an owed acknowledgement
        // first, then the lower id's data, then the higher id's.
        if (const auto due = nodes_[v].ack_due[u]) {
            plan.acks.push_back({NodeId(v), NodeId(u), *due});
            continue;
        }
        if (const auto due = nodes_[u].ack_due[v]) {
            plan.acks.push_back({NodeId(u), NodeId(v), *due});
            continue;
        }
        if (!able)
            continue;
        auto ready = [&](std::uint32_t from, std::uint32_t to) {
            return !nodes_[from].awaiting_ack[to] && !nodes_[from].queues[to].empty();
        };
        if (ready(u, v))
            plan.scheduled.push_back({NodeId(u), NodeId(v), nodes_[u].queues[v].front()});
        else if (ready(v, u))
            plan.scheduled.push_back({NodeId(v), NodeId(u), nodes_[v].queues[u].front()});
    }
}

void Network::enqueue(NodeState& node, PacketId id, std::vector<SlotEvent>& events, GlobalSlot slot, NodeId from)
{
    auto& p = packets_[id];
    if (cfg_.buffer_capacity && node.queued >= *cfg_.buffer_capacity) {
        ++dropped_;
        events.push_back({slot, EventKind::Drop, from, node.id, id});
        return;
    }
    p.holder = node.id;
    node.queues[p.destination.value].push_back(id);
    ++node.queued;
}

void Network::deliver(Packet& p, NodeId from, GlobalSlot slot, std::vector<SlotEvent>& events)
{
    p.delivered_slot = slot;
    p.holder = p.destination;
    ++delivered_;
    delays_.push_back(slot - p.arrival_slot);
    ++hops_[p.hops];
    events.push_back({slot, EventKind::Deliver, from, p.destination, p.id});
}

void Network::pop_planned(const Transmission& tx)
{
    if (tx.packet >= packets_.size())
        inconsistent("unknown packet " + std::to_string(tx.packet));
    auto& node = nodes_.at(tx.from.value);
    const auto& p = packets_[tx.packet];
    auto& q = node.queues[p.destination.value];
    if (p.holder != tx.from || q.empty() || q.front() != tx.packet)
        inconsistent("packet " + std::to_string(tx.packet) + " is not at the head of node " +
                     std::to_string(tx.from.value) + "'s queue");
    q.pop_front();
    --node.queued;
}

void Network::track_occupancy()
{
    for (const auto& node : nodes_)
        max_occupancy_ = std::max(max_occupancy_, node.queued);
}

std::vector<SlotEvent> Network::admit(std::vector<Packet> arrivals)
{
    std::vector<SlotEvent> events;
    for (auto& p : arrivals) {
        if (p.id != packets_.size())
            inconsistent("packet ids must be issued in sequence");
        if (p.arrival_slot != current_slot_)
            inconsistent("packet " + std::to_string(p.id) + " admitted outside its arrival slot");
        const auto id = p.id;
        const auto source = p.source;
        p.holder = source;
        packets_.push_back(std::move(p));
        ++offered_;
        events.push_back({current_slot_, EventKind::Arrive, source, packets_[id].destination, id});
        enqueue(nodes_.at(source.value), id, events, current_slot_, source);
    }
    track_occupancy();
    return events;
}

std::vector<SlotEvent> Network::execute_slot(const SlotPlan& plan)
{
    if (plan.slot != current_slot_)
        inconsistent("plan for slot " + std::to_string(plan.slot) + " executed in slot " +
                     std::to_string(current_slot_));
    const auto n = cfg_.n_nodes;
    const auto slot = plan.slot;
    std::vector<SlotEvent> events;

    std::vector<bool> transmitting(n, false);
    for (const auto* list : {&plan.scheduled, &plan.steals}) {
        for (const auto& tx : *list) {
            if (transmitting.at(tx.from.value))
                inconsistent("node " + std::to_string(tx.from.value) + " transmits twice");
            transmitting[tx.from.value] = true;
        }
    }
    for (const auto& tx : plan.scheduled)
        if (matrix_.cell(tx.from, plan.phase) != static_cast<std::int32_t>(tx.to.value))
            inconsistent("transmission off the schedule");
    for (std::uint32_t u = 0; u < n; ++u) {
        if (nodes_[u].queued == 0 || !partner_of(matrix_, NodeId(u), plan.phase))
            continue;
        ++backlogged_node_slots_;
        if (transmitting[u])
            ++busy_backlogged_node_slots_;
    }

    for (const auto& tx : plan.scheduled)
        pop_planned(tx);
    for (const auto& tx : plan.steals)
        pop_planned(tx);

    for (const auto& tx : plan.acks) {
        auto& owed = nodes_.at(tx.from.value).ack_due.at(tx.to.value);
        if (!owed || *owed != tx.packet)
            inconsistent("acknowledgement not owed");
        owed.reset();
        nodes_.at(tx.to.value).awaiting_ack.at(tx.from.value) = false;
        events.push_back({slot, EventKind::Ack, tx.from, tx.to, tx.packet});
    }

    for (const auto& tx : plan.scheduled) {
        auto& p = packets_[tx.packet];
        ++p.hops;
        ++data_transmissions_;
        ++pair_transmissions_[std::size_t{tx.from.value} * n + tx.to.value];
        if (tx.to == p.destination) {
            deliver(p, tx.from, slot, events);
            if (cfg_.baseline == Baseline::SwiftLike) {
                nodes_[tx.from.value].awaiting_ack[tx.to.value] = true;
                nodes_[tx.to.value].ack_due[tx.from.value] = tx.packet;
            }
            continue;
        }
        if (cfg_.baseline == Baseline::SwiftLike || cfg_.routing_level == 0)
            inconsistent("relay attempted without relay routing");
        p.relay_trace.push_back(tx.to);
        events.push_back({slot, EventKind::Relay, tx.from, tx.to, tx.packet});
        enqueue(nodes_[tx.to.value], tx.packet, events, slot, tx.from);
    }

    for (const auto& tx : plan.steals) {
        auto& p = packets_[tx.packet];
        if (tx.to != p.destination)
            inconsistent("stolen slot used for a relay");
        ++p.hops;
        ++data_transmissions_;
        ++pair_transmissions_[std::size_t{tx.from.value} * n + tx.to.value];
        ++steal_grants_;
        events.push_back({slot, EventKind::Steal, tx.from, tx.to, tx.packet});
        deliver(p, tx.from, slot, events);
    }
    for (const auto& c : plan.control)
        if (c.kind == ControlKind::Request)
            ++steal_attempts_;

    track_occupancy();
    return events;
}

Metrics Network::metrics() const
{
    Metrics m;
    m.slots_run = slots_run_;
    m.packets_offered = offered_;
    m.packets_delivered = delivered_;
    m.packets_dropped = dropped_;
    m.packets_in_flight = in_flight();
    m.data_transmissions = data_transmissions_;
    m.steal_attempts = steal_attempts_;
    m.steal_grants = steal_grants_;
    m.max_buffer_occupancy = max_occupancy_;
    m.hop_histogram = hops_;

    if (!delays_.empty()) {
        auto sorted = delays_;
        std::sort(sorted.begin(), sorted.end());
        long double sum = 0;
        for (const auto d : sorted)
            sum += static_cast<long double>(d);
        m.mean_delay_slots = static_cast<double>(sum / static_cast<long double>(sorted.size()));
        // Nearest-rank percentile.
        const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(sorted.size())));
        m.p95_delay_slots = static_cast<double>(sorted[std::max<std::size_t>(rank, 1) - 1]);
        m.max_delay_slots = sorted.back();
    }
    if (slots_run_ > 0) {
        m.throughput = static_cast<double>(delivered_) / static_cast<double>(slots_run_);
        const auto busiest = *std::max_element(pair_transmissions_.begin(), pair_transmissions_.end());
        m.max_pair_goodput = static_cast<double>(busiest) / static_cast<double>(slots_run_);
    }
    if (backlogged_node_slots_ > 0)
        m.scheduled_slot_utilization =
            static_cast<double>(busy_backlogged_node_slots_) / static_cast<double>(backlogged_node_slots_);
    return m;
}

Metrics run(const SimConfig& cfg, const SlotObserver& observer)
{
    Network net(cfg);
    TrafficSource traffic(cfg);
    for (GlobalSlot s = 1; s <= cfg.slots_to_run; ++s) {
        net.begin_slot(s);
        auto events = net.admit(traffic.generate(s));
        const auto plan = net.plan_slot(s);
        auto executed = net.execute_slot(plan);
        if (observer) {
            events.insert(events.end(), executed.begin(), executed.end());
            observer(net, plan, events);
        }
    }
    return net.metrics();
}

Metrics run_baseline_swift_like(const SimConfig& cfg, const SlotObserver& observer)
{
    if (cfg.baseline != Baseline::SwiftLike)
        throw ConfigError("baseline", "stop-and-wait run requested for a non-baseline config");
    return run(cfg, observer);
}

}  // namespace minnet
