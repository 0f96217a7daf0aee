#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace minnet {

/// Index of a network node, 0..N-1.
struct NodeId {
    std::uint32_t value = 0;

    constexpr NodeId() = default;
    constexpr explicit NodeId(std::uint32_t v) : value(v) {}

    friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

/// Position of a slot within one cycle, 1..T.
struct SlotIndex {
    std::uint32_t value = 1;

    constexpr SlotIndex() = default;
    constexpr explicit SlotIndex(std::uint32_t v) : value(v) {}

    friend constexpr auto operator<=>(SlotIndex, SlotIndex) = default;
};

/// Slot counter of a running network. Global slot 1 is the first slot of
/// the first cycle.
using GlobalSlot = std::int64_t;

/// Cycle phase (1..cycle) of a global slot.
constexpr SlotIndex phase_of(GlobalSlot slot, std::uint32_t cycle)
{
    const auto c = static_cast<GlobalSlot>(cycle);
    return SlotIndex(static_cast<std::uint32_t>(((slot - 1) % c + c) % c + 1));
}

/// Order-(n-1) Latin square b[i][j] = (i + j) mod (n - 1), used to derive the
/// allocation matrix for even n. Rows and columns are residues 0..order-1.
class LatinSquare {
public:
    explicit LatinSquare(std::uint32_t order);

    std::uint32_t order() const { return order_; }

    /// Indices are taken modulo order().
    std::uint32_t at(std::uint32_t i, std::uint32_t j) const;

    bool is_latin() const;

private:
    std::uint32_t order_;
    std::vector<std::uint32_t> cells_;
};

/// Rejects odd n and n < 2.
LatinSquare build_latin_square(std::uint32_t n);

/// Slot/partner table: row per node, column per slot of the cycle. Each
/// cell names the node's full-duplex partner for that slot, or is idle
/// (odd node counts leave one companionless node per slot).
class AllocationMatrix {
public:
    static constexpr std::int32_t kIdle = -1;

    /// Raw table, rows[node][slot-1]. Only the shape is checked here; use
    /// verify_requirements() for the allocation properties.
    explicit AllocationMatrix(std::vector<std::vector<std::int32_t>> rows);

    std::uint32_t n_nodes() const { return n_nodes_; }
    /// Even node count the construction was derived from.
    std::uint32_t base_n() const { return cycle_ + 1; }
    std::uint32_t cycle_length() const { return cycle_; }

    /// kIdle or a node index. Throws std::out_of_range on bad indices.
    std::int32_t cell(NodeId node, SlotIndex slot) const;

    const std::vector<std::vector<std::int32_t>>& rows() const { return rows_; }

    friend bool operator==(const AllocationMatrix&, const AllocationMatrix&) = default;

private:
    std::uint32_t n_nodes_;
    std::uint32_t cycle_;
    std::vector<std::vector<std::int32_t>> rows_;
};

/// Builds the allocation matrix for n >= 2 nodes. Even n uses the Latin
/// square construction; odd n builds for n+1 and drops the last row,
/// leaving its partners idle.
AllocationMatrix build_allocation_matrix(std::uint32_t n);

/// 2*ceil(n/2) - 1.
std::uint32_t cycle_time(std::uint32_t n);

/// nullopt when the node is idle in that slot.
std::optional<NodeId> partner_of(const AllocationMatrix& a, NodeId node, SlotIndex slot);

/// The unique slot in which i and k are paired. Throws std::invalid_argument
/// for i == k and std::out_of_range for unknown nodes or a missing pair.
SlotIndex designated_slot(const AllocationMatrix& a, NodeId i, NodeId k);

enum class Requirement {
    DestinationConflictFree,  // A
    SinglePairPerChannelPair,  // B
    NonOverlappingPairing,     // C
    UniqueDestinationPerRow,   // D
    EquiSpacedCycle,           // E
};

struct RequirementCheck {
    Requirement requirement;
    bool passed = true;
    /// First counterexample; empty when passed.
    std::string detail;
    std::optional<NodeId> node;
    std::optional<SlotIndex> slot;
};

struct VerificationReport {
    std::vector<RequirementCheck> checks;

    bool all_passed() const;
    const RequirementCheck& operator[](Requirement r) const;
};

VerificationReport verify_requirements(const AllocationMatrix& a);

char requirement_letter(Requirement r);
std::string_view requirement_name(Requirement r);

/// CSV dump: header "node,slot1,...,slotT", one row per node, idle as "X".
std::string to_csv(const AllocationMatrix& a);
/// Inverse of to_csv(). Throws std::invalid_argument on malformed input.
AllocationMatrix parse_allocation_csv(std::string_view csv);

}  // namespace minnet
