#include "minnet/simnet.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

namespace minnet {
namespace {

struct Arrival {
    std::uint32_t src;
    std::uint32_t dst;
};

// Drives a Network by hand so tests can look at a single slot's plan.
class Harness {
public:
    explicit Harness(const SimConfig& cfg) : net(cfg) {}

    SlotPlan start(GlobalSlot slot, const std::vector<Arrival>& arrivals)
    {
        net.begin_slot(slot);
        std::vector<Packet> packets;
        for (const auto& a : arrivals) {
            Packet p;
            p.id = next_id++;
            p.source = NodeId(a.src);
            p.destination = NodeId(a.dst);
            p.arrival_slot = slot;
            packets.push_back(p);
        }
        net.admit(std::move(packets));
        return net.plan_slot(slot);
    }

    std::vector<SlotEvent> step(GlobalSlot slot, const std::vector<Arrival>& arrivals = {})
    {
        return net.execute_slot(start(slot, arrivals));
    }

    Network net;
    PacketId next_id = 0;
};

SimConfig eight_node_config(int level)
{
    SimConfig cfg;
    cfg.n_nodes = 8;
    cfg.routing_level = level;
    return cfg;
}

std::vector<TraceRecord> trace_of(std::initializer_list<std::array<std::uint32_t, 3>> rows)
{
    std::vector<TraceRecord> out;
    for (const auto& r : rows)
        out.push_back({static_cast<GlobalSlot>(r[0]), NodeId(r[1]), NodeId(r[2])});
    return out;
}

TEST(Simulate, NoTrafficNoMetrics)
{
    auto cfg = eight_node_config(0);
    cfg.slots_to_run = 50;
    const auto m = run(cfg);
    EXPECT_EQ(m.slots_run, 50);
    EXPECT_EQ(m.packets_offered, 0u);
    EXPECT_EQ(m.packets_delivered, 0u);
    EXPECT_EQ(m.throughput, 0.0);
    EXPECT_EQ(m.mean_delay_slots, 0.0);
    EXPECT_EQ(m.data_transmissions, 0u);
}

TEST(Simulate, TraceDrivesArrivals)
{
    auto cfg = eight_node_config(1);
    cfg.traffic_model = TrafficModel::Trace;
    cfg.trace = trace_of({{1, 0, 4}, {2, 3, 6}, {2, 7, 1}});
    cfg.slots_to_run = 30;
    std::vector<SlotEvent> arrivals;
    const auto m = run(cfg, [&](const Network&, const SlotPlan&, const std::vector<SlotEvent>& ev) {
        for (const auto& e : ev)
            if (e.kind == EventKind::Arrive)
                arrivals.push_back(e);
    });
    ASSERT_EQ(arrivals.size(), 3u);
    EXPECT_EQ(arrivals[0].slot, 1);
    EXPECT_EQ(arrivals[0].from, NodeId(0));
    EXPECT_EQ(arrivals[0].to, NodeId(4));
    EXPECT_EQ(arrivals[2].slot, 2);
    EXPECT_EQ(arrivals[2].from, NodeId(7));
    EXPECT_EQ(m.packets_offered, 3u);
    EXPECT_EQ(m.packets_delivered, 3u);
}

TEST(Simulate, OfferedLoadMatchesRate)
{
    auto cfg = eight_node_config(0);
    cfg.arrival_rate = 0.5;
    cfg.slots_to_run = 100000;
    const auto m = run(cfg);
    // Binomial(8e5, 0.5): sigma is about 447.
    EXPECT_NEAR(static_cast<double>(m.packets_offered), 400000.0, 3 * 447.2);
}

TEST(Simulate, Level0WaitsForDesignatedSlot)
{
    Harness h(eight_node_config(0));
    h.step(1, {{0, 4}, {0, 7}});
    EXPECT_EQ(h.net.packet(0).delivered_slot, 1);
    for (GlobalSlot s = 2; s <= 7; ++s)
        h.step(s);
    EXPECT_EQ(h.net.packet(1).delivered_slot, 7);
    EXPECT_EQ(h.net.packet(1).hops, 1u);
}

TEST(Simulate, Level1RelaysThroughSlotPartner)
{
    Harness h(eight_node_config(1));
    h.step(1, {{0, 7}});
    EXPECT_EQ(h.net.packet(0).holder, NodeId(4));
    for (GlobalSlot s = 2; s <= 4; ++s)
        h.step(s);
    EXPECT_EQ(h.net.packet(0).delivered_slot, 4);
    EXPECT_EQ(h.net.packet(0).relay_trace, std::vector<NodeId>{NodeId(4)});
    EXPECT_EQ(h.net.packet(0).hops, 2u);
}

TEST(Simulate, LonePacketDelayIsWaitingDelay)
{
    // With nothing else in the network a level-0 packet waits exactly for
    // its designated slot.
    const auto a = build_allocation_matrix(8);
    for (std::uint32_t src = 0; src < 8; ++src)
        for (std::uint32_t dst = 0; dst < 8; ++dst) {
            if (src == dst)
                continue;
            for (GlobalSlot t = 1; t <= 7; ++t) {
                auto cfg = eight_node_config(0);
                cfg.traffic_model = TrafficModel::Trace;
                cfg.trace = trace_of({{static_cast<std::uint32_t>(t), src, dst}});
                cfg.slots_to_run = t + 7;
                const auto m = run(cfg);
                ASSERT_EQ(m.packets_delivered, 1u);
                const auto wait = waiting_delay(8, phase_of(t, 7), designated_slot(a, NodeId(src), NodeId(dst)));
                EXPECT_EQ(m.max_delay_slots, static_cast<std::int64_t>(wait));
            }
        }
}

TEST(PlanSlot, EmptyNetworkPlansNothing)
{
    for (int level = 0; level <= 2; ++level) {
        Harness h(eight_node_config(level));
        const auto plan = h.start(1, {});
        EXPECT_TRUE(plan.scheduled.empty());
        EXPECT_TRUE(plan.steals.empty());
        EXPECT_EQ(plan.phase, SlotIndex(1));
        ASSERT_EQ(plan.control.size(), 8u);
        for (const auto& c : plan.control) {
            EXPECT_EQ(c.kind, ControlKind::Status);
            EXPECT_FALSE(c.has_traffic);
        }
    }
}

TEST(PlanSlot, IdlePairStealsToThirdNode)
{
    // Slot 1 pairs 0 with 4. Node 0 holds for 2 (no faster route through
    // 4) and node 4 has nothing, so 0 asks node 2's spare receiver.
    Harness h(eight_node_config(2));
    const auto plan = h.start(1, {{0, 2}});
    EXPECT_TRUE(plan.scheduled.empty());
    ASSERT_EQ(plan.steals.size(), 1u);
    EXPECT_EQ(plan.steals[0].from, NodeId(0));
    EXPECT_EQ(plan.steals[0].to, NodeId(2));

    h.net.execute_slot(plan);
    EXPECT_EQ(h.net.packet(0).delivered_slot, 1);
    EXPECT_EQ(h.net.metrics().steal_grants, 1u);
}

TEST(PlanSlot, Level1HoldsWhereLevel2Steals)
{
    Harness h(eight_node_config(1));
    const auto plan = h.start(1, {{0, 2}});
    EXPECT_TRUE(plan.scheduled.empty());
    EXPECT_TRUE(plan.steals.empty());
}

TEST(PlanSlot, BusyPairDoesNotSteal)
{
    // Node 4 has a packet for its partner, so the pair is not mutually idle
    // and node 0 keeps its packet.
    Harness h(eight_node_config(2));
    const auto plan = h.start(1, {{0, 2}, {4, 0}});
    ASSERT_EQ(plan.scheduled.size(), 1u);
    EXPECT_EQ(plan.scheduled[0].from, NodeId(4));
    EXPECT_TRUE(plan.steals.empty());
}

TEST(PlanSlot, TargetGrantsLowestIdsFirst)
{
    // Nodes 0, 5 and 7 all hold for 2 in slot 1 while their partners are
    // empty.
    for (std::uint32_t r : {1u, 2u, 3u}) {
        auto cfg = eight_node_config(2);
        cfg.secondary_receivers = r;
        Harness h(cfg);
        const auto plan = h.start(1, {{0, 2}, {5, 2}, {7, 2}});
        EXPECT_TRUE(plan.scheduled.empty());
        std::vector<std::uint32_t> thieves;
        for (const auto& s : plan.steals)
            thieves.push_back(s.from.value);
        const std::vector<std::uint32_t> all = {0, 5, 7};
        EXPECT_EQ(thieves, std::vector<std::uint32_t>(all.begin(), all.begin() + r)) << "R=" << r;
        const auto denies = std::count_if(plan.control.begin(), plan.control.end(),
                                          [](const ControlRecord& c) { return c.kind == ControlKind::Deny; });
        EXPECT_EQ(static_cast<std::uint32_t>(denies), 3 - r);
    }
}

TEST(PlanSlot, PairMatesNeverShareATarget)
{
    // Five nodes, slot 4: 0 and 2 are paired, both hold for 1, and node 1
    // has two spare receivers. Only the lower id of the pair gets one.
    SimConfig cfg;
    cfg.n_nodes = 5;
    cfg.routing_level = 2;
    cfg.secondary_receivers = 2;
    Harness h(cfg);
    for (GlobalSlot s = 1; s <= 3; ++s)
        h.step(s);
    const auto plan = h.start(4, {{0, 1}, {2, 1}});
    ASSERT_EQ(partner_of(h.net.matrix(), NodeId(0), SlotIndex(4)), NodeId(2));
    EXPECT_TRUE(plan.scheduled.empty());
    ASSERT_EQ(plan.steals.size(), 1u);
    EXPECT_EQ(plan.steals[0].from, NodeId(0));
    const auto denied = std::find_if(plan.control.begin(), plan.control.end(),
                                     [](const ControlRecord& c) { return c.kind == ControlKind::Deny; });
    ASSERT_NE(denied, plan.control.end());
    EXPECT_EQ(denied->to, NodeId(2));
}

TEST(ExecuteSlot, RejectsForgedPlans)
{
    Harness h(eight_node_config(0));
    auto plan = h.start(1, {{0, 7}});
    plan.scheduled.push_back({NodeId(0), NodeId(4), 0});
    EXPECT_THROW(h.net.execute_slot(plan), std::logic_error);

    Harness twice(eight_node_config(0));
    auto p2 = twice.start(1, {{0, 4}});
    p2.steals.push_back({NodeId(0), NodeId(4), 0});
    EXPECT_THROW(twice.net.execute_slot(p2), std::logic_error);

    Harness stale(eight_node_config(0));
    const auto p3 = stale.start(1, {});
    stale.net.execute_slot(p3);
    stale.net.begin_slot(2);
    EXPECT_THROW(stale.net.execute_slot(p3), std::logic_error);
}

TEST(Buffers, TailDropWhenFull)
{
    auto cfg = eight_node_config(0);
    cfg.buffer_capacity = 1;
    Harness h(cfg);
    h.net.begin_slot(1);
    std::vector<Packet> arrivals(2);
    for (PacketId i = 0; i < 2; ++i) {
        arrivals[i].id = i;
        arrivals[i].source = NodeId(0);
        arrivals[i].destination = NodeId(7);
        arrivals[i].arrival_slot = 1;
    }
    const auto events = h.net.admit(arrivals);
    EXPECT_EQ(h.net.dropped(), 1u);
    EXPECT_EQ(h.net.queued_at(NodeId(0)), 1u);
    EXPECT_TRUE(std::any_of(events.begin(), events.end(),
                            [](const SlotEvent& e) { return e.kind == EventKind::Drop && e.packet == 1; }));
}

TEST(ControlOverhead, ThinsDataSlotsAtLevel2Only)
{
    auto cfg = eight_node_config(2);
    cfg.control_overhead = 0.5;
    cfg.traffic_model = TrafficModel::Trace;
    cfg.trace = trace_of({{1, 0, 4}});
    cfg.slots_to_run = 20;
    std::vector<GlobalSlot> delivered;
    run(cfg, [&](const Network&, const SlotPlan& plan, const std::vector<SlotEvent>& ev) {
        // At half overhead only even slots have room for a data packet.
        if (plan.slot % 2 == 1) {
            EXPECT_TRUE(plan.scheduled.empty()) << "slot " << plan.slot;
            EXPECT_TRUE(plan.steals.empty()) << "slot " << plan.slot;
        }
        for (const auto& e : ev)
            if (e.kind == EventKind::Deliver)
                delivered.push_back(e.slot);
    });
    // Slot 1 is lost to the preamble, so the packet relays in slot 2 and
    // lands in slot 4 instead of going straight across in slot 1.
    EXPECT_EQ(delivered, std::vector<GlobalSlot>{4});

    cfg.routing_level = 1;
    cfg.secondary_receivers = 1;
    const auto m = run(cfg);
    EXPECT_EQ(m.max_delay_slots, 0);
}

TEST(ControlOverhead, DataSlotShareTracksOverhead)
{
    for (double eps : {0.1, 0.25, 0.5}) {
        auto cfg = eight_node_config(2);
        cfg.control_overhead = eps;
        cfg.arrival_rate = 1.0;
        cfg.slots_to_run = 2000;
        std::int64_t data_slots = 0;
        run(cfg, [&](const Network&, const SlotPlan& plan, const std::vector<SlotEvent>&) {
            if (!plan.scheduled.empty() || !plan.steals.empty())
                ++data_slots;
        });
        EXPECT_NEAR(static_cast<double>(data_slots) / 2000.0, 1.0 - eps, 0.002) << "eps=" << eps;
    }
}

TEST(ProcessingBudget, ZeroBudgetHaltsTransmission)
{
    auto cfg = eight_node_config(1);
    cfg.processing_budget = 0;
    cfg.arrival_rate = 0.3;
    cfg.slots_to_run = 100;
    const auto m = run(cfg);
    EXPECT_GT(m.packets_offered, 0u);
    EXPECT_EQ(m.packets_delivered, 0u);
    EXPECT_EQ(m.packets_in_flight, m.packets_offered);

    cfg.processing_budget = 1;
    EXPECT_GT(run(cfg).packets_delivered, 0u);
}

TEST(Baseline, AckFollowsAtNextMeeting)
{
    auto cfg = eight_node_config(0);
    cfg.baseline = Baseline::SwiftLike;
    cfg.traffic_model = TrafficModel::Trace;
    cfg.trace = trace_of({{1, 0, 4}, {1, 0, 4}});
    cfg.slots_to_run = 25;
    std::vector<SlotEvent> log;
    const auto m = run_baseline_swift_like(cfg, [&](const Network&, const SlotPlan&, const std::vector<SlotEvent>& ev) {
        for (const auto& e : ev)
            if (e.kind == EventKind::Deliver || e.kind == EventKind::Ack)
                log.push_back(e);
    });
    ASSERT_EQ(log.size(), 4u);
    EXPECT_EQ(log[0].kind, EventKind::Deliver);
    EXPECT_EQ(log[0].slot, 1);
    EXPECT_EQ(log[1].kind, EventKind::Ack);
    EXPECT_EQ(log[1].slot, 8);
    EXPECT_EQ(log[1].from, NodeId(4));
    // The second packet waits for the ack, then for the meeting after it.
    EXPECT_EQ(log[2].kind, EventKind::Deliver);
    EXPECT_EQ(log[2].slot, 15);
    EXPECT_EQ(log[3].kind, EventKind::Ack);
    EXPECT_EQ(log[3].slot, 22);
    EXPECT_EQ(m.packets_delivered, 2u);
}

TEST(Baseline, SustainedPairGoodputIsBounded)
{
    auto cfg = eight_node_config(0);
    cfg.baseline = Baseline::SwiftLike;
    cfg.traffic_model = TrafficModel::Trace;
    for (std::uint32_t s = 1; s <= 500; ++s)
        cfg.trace.push_back({static_cast<GlobalSlot>(s), NodeId(0), NodeId(4)});
    cfg.slots_to_run = 7000;
    const auto m = run_baseline_swift_like(cfg);
    EXPECT_LE(m.max_pair_goodput, 1.0 / (2.0 * 7.0) + 1e-12);
    EXPECT_GT(m.max_pair_goodput, 1.0 / (2.0 * 7.0) - 0.01);

    EXPECT_THROW(run_baseline_swift_like(eight_node_config(0)), ConfigError);
}

TEST(Simulate, ConservationAndLegality)
{
    for (int variant = 0; variant < 5; ++variant) {
        SimConfig cfg;
        cfg.n_nodes = variant == 3 ? 9 : 8;
        cfg.routing_level = std::min(variant, 2);
        cfg.arrival_rate = 0.2 + 0.15 * variant;
        cfg.slots_to_run = 3000;
        cfg.seed = 11 + static_cast<std::uint64_t>(variant);
        cfg.buffer_capacity = variant == 2 ? std::optional<std::uint64_t>(6) : std::nullopt;
        if (variant == 4) {
            cfg.baseline = Baseline::SwiftLike;
            cfg.routing_level = 0;
        }
        std::uint64_t arrivals = 0;
        std::uint64_t terminal = 0;
        run(cfg, [&](const Network& net, const SlotPlan& plan, const std::vector<SlotEvent>& ev) {
            std::set<std::uint32_t> senders;
            std::set<std::uint32_t> receivers;
            for (const auto* list : {&plan.scheduled, &plan.steals, &plan.acks})
                for (const auto& tx : *list)
                    ASSERT_TRUE(senders.insert(tx.from.value).second) << "slot " << plan.slot;
            for (const auto* list : {&plan.scheduled, &plan.acks})
                for (const auto& tx : *list) {
                    ASSERT_EQ(net.matrix().cell(tx.from, plan.phase), static_cast<std::int32_t>(tx.to.value));
                    ASSERT_TRUE(receivers.insert(tx.to.value).second);
                }
            std::map<std::uint32_t, std::uint32_t> secondary;
            for (const auto& tx : plan.steals)
                ASSERT_LE(++secondary[tx.to.value], cfg.secondary_receivers);
            for (const auto& e : ev) {
                if (e.kind == EventKind::Arrive)
                    ++arrivals;
                if (e.kind == EventKind::Deliver || e.kind == EventKind::Drop)
                    ++terminal;
            }
            ASSERT_EQ(net.offered(), net.delivered() + net.dropped() + net.in_flight());
            ASSERT_EQ(arrivals, net.offered());
            ASSERT_EQ(terminal, net.delivered() + net.dropped());
        });
    }
}

TEST(Simulate, SameSeedSameResult)
{
    auto cfg = eight_node_config(2);
    cfg.arrival_rate = 0.4;
    cfg.slots_to_run = 2000;
    const auto a = run(cfg);
    const auto b = run(cfg);
    EXPECT_EQ(a.packets_delivered, b.packets_delivered);
    EXPECT_EQ(a.mean_delay_slots, b.mean_delay_slots);
    EXPECT_EQ(a.hop_histogram, b.hop_histogram);
    cfg.seed = 2;
    EXPECT_NE(run(cfg).packets_offered, a.packets_offered);
}

TEST(Simulate, Level1NeverSlowerAtLightLoad)
{
    auto cfg = eight_node_config(0);
    cfg.arrival_rate = 0.05;
    cfg.slots_to_run = 20000;
    const auto l0 = run(cfg);
    cfg.routing_level = 1;
    const auto l1 = run(cfg);
    EXPECT_LT(l1.mean_delay_slots, l0.mean_delay_slots);
}

}  // namespace
}  // namespace minnet
