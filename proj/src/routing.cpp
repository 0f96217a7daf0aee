#include "minnet/routing.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace minnet {

std::uint32_t waiting_delay(std::uint32_t n, SlotIndex t, SlotIndex designated)
{
    const auto cycle = cycle_time(n);
    if (t.value < 1 || t.value > cycle || designated.value < 1 || designated.value > cycle)
        throw std::out_of_range("waiting delay slots must lie in 1.." + std::to_string(cycle));
    return (designated.value + cycle - t.value) % cycle;
}

std::uint32_t max_waiting_delay(std::uint32_t n)
{
    return cycle_time(n) - 1;
}

namespace {

struct Label {
    std::uint32_t hops = 0;
    std::vector<std::uint32_t> path;

    bool better_than(const Label& other) const
    {
        if (hops != other.hops)
            return hops < other.hops;
        return path < other.path;
    }
};

}  // namespace

ArrivalResult earliest_arrival(const AllocationMatrix& a, NodeId source, NodeId destination, GlobalSlot start)
{
    const auto n = a.n_nodes();
    if (source.value >= n || destination.value >= n)
        throw std::out_of_range("node out of range");
    if (source == destination)
        throw std::invalid_argument("earliest arrival needs distinct source and destination");

    const auto cycle = a.cycle_length();
    const auto dst = static_cast<std::int32_t>(destination.value);
    std::vector<std::optional<Label>> holders(n);
    holders[source.value] = Label{};

    for (GlobalSlot s = start; s < start + 2 * static_cast<GlobalSlot>(cycle); ++s) {
        const auto phase = phase_of(s, cycle);

        std::optional<Label> delivered;
        for (std::uint32_t u = 0; u < n; ++u) {
            if (!holders[u] || a.cell(NodeId(u), phase) != dst)
                continue;
            Label candidate{holders[u]->hops + 1, holders[u]->path};
            if (!delivered || candidate.better_than(*delivered))
                delivered = std::move(candidate);
        }
        if (delivered) {
            ArrivalResult result{s, delivered->hops, {}};
            for (const auto v : delivered->path)
                result.relay_path.emplace_back(v);
            return result;
        }

        auto next = holders;
        for (std::uint32_t u = 0; u < n; ++u) {
            const auto v = a.cell(NodeId(u), phase);
            if (!holders[u] || v == AllocationMatrix::kIdle || v == static_cast<std::int32_t>(u))
                continue;
            Label candidate{holders[u]->hops + 1, holders[u]->path};
            candidate.path.push_back(static_cast<std::uint32_t>(v));
            auto& slot = next[static_cast<std::size_t>(v)];
            if (!slot || candidate.better_than(*slot))
                slot = std::move(candidate);
        }
        holders = std::move(next);
    }
    throw std::logic_error("no delivery within two cycles; schedule never pairs the nodes");
}

RoutingTable::RoutingTable(std::uint32_t n_nodes, std::uint32_t cycle)
    : n_(n_nodes), cycle_(cycle), bits_(std::size_t{n_nodes} * n_nodes * cycle, 0)
{
}

std::size_t RoutingTable::index(NodeId source, NodeId destination, SlotIndex slot) const
{
    if (source.value >= n_ || destination.value >= n_ || slot.value < 1 || slot.value > cycle_)
        throw std::out_of_range("routing table index out of range");
    return (std::size_t{source.value} * n_ + destination.value) * cycle_ + (slot.value - 1);
}

bool RoutingTable::forward(NodeId source, NodeId destination, SlotIndex slot) const
{
    return bits_[index(source, destination, slot)] != 0;
}

void RoutingTable::set(NodeId source, NodeId destination, SlotIndex slot, bool value)
{
    bits_[index(source, destination, slot)] = value ? 1 : 0;
}

RoutingTable build_routing_table(const AllocationMatrix& a)
{
    const auto n = a.n_nodes();
    const auto cycle = a.cycle_length();
    RoutingTable rt(n, cycle);

    // Backward sweep per destination: best[u][s] is the earliest delivery
    // slot for a packet held by u at the start of slot s. Every delivery
    // from slots 1..cycle+1 completes by slot 2*cycle, so a 3*cycle horizon
    // leaves those entries exact.
    constexpr GlobalSlot kNever = std::numeric_limits<GlobalSlot>::max();
    const GlobalSlot horizon = 3 * static_cast<GlobalSlot>(cycle);
    std::vector<GlobalSlot> best(std::size_t{n} * static_cast<std::size_t>(horizon + 2), kNever);
    auto at = [&](std::uint32_t u, GlobalSlot s) -> GlobalSlot& {
        return best[std::size_t{u} * static_cast<std::size_t>(horizon + 2) + static_cast<std::size_t>(s)];
    };

    for (std::uint32_t d = 0; d < n; ++d) {
        std::fill(best.begin(), best.end(), kNever);
        for (GlobalSlot s = horizon; s >= 1; --s) {
            const auto phase = phase_of(s, cycle);
            for (std::uint32_t u = 0; u < n; ++u) {
                const auto v = a.cell(NodeId(u), phase);
                if (v == static_cast<std::int32_t>(d)) {
                    at(u, s) = s;
                    continue;
                }
                auto e = at(u, s + 1);
                if (v != AllocationMatrix::kIdle)
                    e = std::min(e, at(static_cast<std::uint32_t>(v), s + 1));
                at(u, s) = e;
            }
        }

        for (std::uint32_t i = 0; i < n; ++i) {
            if (i == d)
                continue;
            for (std::uint32_t t = 1; t <= cycle; ++t) {
                const auto v = a.cell(NodeId(i), SlotIndex(t));
                if (v == AllocationMatrix::kIdle || v == static_cast<std::int32_t>(i))
                    continue;
                const bool improves = v == static_cast<std::int32_t>(d) ||
                                      at(static_cast<std::uint32_t>(v), t + 1) < at(i, t + 1);
                rt.set(NodeId(i), NodeId(d), SlotIndex(t), improves);
            }
        }
    }
    return rt;
}

Level1Decision level1_decision(const RoutingTable& rt, NodeId source, NodeId destination, SlotIndex slot)
{
    return rt.forward(source, destination, slot) ? Level1Decision::TransmitToPartner : Level1Decision::Hold;
}

std::string to_csv(const RoutingTable& rt)
{
    std::ostringstream out;
    out << "source,destination,slot,forward\n";
    for (std::uint32_t i = 0; i < rt.n_nodes(); ++i)
        for (std::uint32_t d = 0; d < rt.n_nodes(); ++d)
            for (std::uint32_t t = 1; t <= rt.cycle_length(); ++t)
                out << i << ',' << d << ',' << t << ',' << (rt.forward(NodeId(i), NodeId(d), SlotIndex(t)) ? 1 : 0)
                    << '\n';
    return out.str();
}

}  // namespace minnet
