#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "minnet/schedule.hpp"

namespace minnet {

/// Slots (modulo the cycle) from slot t until the designated slot comes
/// round. Both slots must lie in 1..cycle_time(n).
std::uint32_t waiting_delay(std::uint32_t n, SlotIndex t, SlotIndex designated);

/// Largest waiting_delay over all slot pairs: cycle_time(n) - 1, which is
/// n - 2 for even n.
std::uint32_t max_waiting_delay(std::uint32_t n);

struct ArrivalResult {
    GlobalSlot delivery_slot = 0;
    std::uint32_t hops = 0;
    /// Intermediate couriers in order, excluding source and destination.
    std::vector<NodeId> relay_path;
};

/// Earliest delivery of a packet held by `source` at the start of global slot
/// `start`. A holder may hand the packet to its partner during a slot; the
/// partner can forward it from the next slot on. Among equally early
/// deliveries the one with fewest hops, then the lexicographically smallest
/// relay path, wins.
ArrivalResult earliest_arrival(const AllocationMatrix& a, NodeId source, NodeId destination, GlobalSlot start);

enum class Level1Decision { TransmitToPartner, Hold };

/// rt[source][destination][slot]: true when handing a packet to the slot's
/// partner gets it delivered strictly earlier than keeping it.
class RoutingTable {
public:
    RoutingTable(std::uint32_t n_nodes, std::uint32_t cycle);

    std::uint32_t n_nodes() const { return n_; }
    std::uint32_t cycle_length() const { return cycle_; }

    bool forward(NodeId source, NodeId destination, SlotIndex slot) const;
    void set(NodeId source, NodeId destination, SlotIndex slot, bool value);

    friend bool operator==(const RoutingTable&, const RoutingTable&) = default;

private:
    std::size_t index(NodeId source, NodeId destination, SlotIndex slot) const;

    std::uint32_t n_;
    std::uint32_t cycle_;
    std::vector<std::uint8_t> bits_;
};

RoutingTable build_routing_table(const AllocationMatrix& a);

Level1Decision level1_decision(const RoutingTable& rt, NodeId source, NodeId destination, SlotIndex slot);

/// CSV rows "source,destination,slot,forward" for every entry, with header.
std::string to_csv(const RoutingTable& rt);

}  // namespace minnet
