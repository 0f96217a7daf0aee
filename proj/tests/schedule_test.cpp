#include "minnet/schedule.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <utility>

#include "eight_node.hpp"

namespace minnet {
namespace {

TEST(LatinSquare, SmallOrders)
{
    const auto b4 = build_latin_square(4);
    EXPECT_EQ(b4.order(), 3u);
    EXPECT_EQ(b4.at(1, 1), 2u);
    EXPECT_EQ(b4.at(1, 2), 0u);
    EXPECT_EQ(b4.at(2, 1), 0u);
    EXPECT_EQ(b4.at(3, 3), 0u);

    const auto b2 = build_latin_square(2);
    EXPECT_EQ(b2.order(), 1u);
    EXPECT_EQ(b2.at(0, 0), 0u);
}

TEST(LatinSquare, RejectsOddOrTiny)
{
    EXPECT_THROW(build_latin_square(0), std::invalid_argument);
    EXPECT_THROW(build_latin_square(1), std::invalid_argument);
    EXPECT_THROW(build_latin_square(7), std::invalid_argument);
}

TEST(LatinSquare, LatinPropertyUpTo64)
{
    for (std::uint32_t n = 2; n <= 64; n += 2)
        EXPECT_TRUE(build_latin_square(n).is_latin()) << "n=" << n;
}

TEST(AllocationMatrix, MatchesEightNodeGolden)
{
    const auto a = build_allocation_matrix(8);
    EXPECT_EQ(a.n_nodes(), 8u);
    EXPECT_EQ(a.cycle_length(), 7u);
    EXPECT_EQ(a.rows(), testdata::kEightNode);
}

TEST(AllocationMatrix, TwoNodes)
{
    const auto a = build_allocation_matrix(2);
    ASSERT_EQ(a.cycle_length(), 1u);
    EXPECT_EQ(a.cell(NodeId(0), SlotIndex(1)), 1);
    EXPECT_EQ(a.cell(NodeId(1), SlotIndex(1)), 0);
}

TEST(AllocationMatrix, ThreeNodesDropsRowOfFour)
{
    // n = 4 gives rows [2,1,3] [3,0,2] [0,3,1] [1,2,0]; dropping node 3 idles
    // whoever it was paired with.
    const auto a = build_allocation_matrix(3);
    const std::vector<std::vector<std::int32_t>> expected = {
        {2, 1, AllocationMatrix::kIdle},
        {AllocationMatrix::kIdle, 0, 2},
        {0, AllocationMatrix::kIdle, 1},
    };
    EXPECT_EQ(a.rows(), expected);
    EXPECT_EQ(a.base_n(), 4u);

    std::set<std::pair<int, int>> pairs;
    for (std::uint32_t t = 1; t <= 3; ++t) {
        int idle = 0;
        for (std::uint32_t i = 0; i < 3; ++i) {
            const auto v = a.cell(NodeId(i), SlotIndex(t));
            if (v == AllocationMatrix::kIdle)
                ++idle;
            else
                pairs.emplace(std::min<int>(i, v), std::max<int>(i, v));
        }
        EXPECT_EQ(idle, 1) << "slot " << t;
    }
    EXPECT_EQ(pairs, (std::set<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}}));
}

TEST(AllocationMatrix, RejectsTooFewNodes)
{
    EXPECT_THROW(build_allocation_matrix(0), std::invalid_argument);
    EXPECT_THROW(build_allocation_matrix(1), std::invalid_argument);
}

TEST(AllocationMatrix, StructuralPropertiesUpTo64)
{
    for (std::uint32_t n = 2; n <= 64; ++n) {
        const auto a = build_allocation_matrix(n);
        ASSERT_EQ(a.cycle_length(), cycle_time(n)) << "n=" << n;

        std::vector<std::vector<int>> meetings(n, std::vector<int>(n, 0));
        for (std::uint32_t t = 1; t <= a.cycle_length(); ++t) {
            std::uint32_t pairs_in_column = 0;
            for (std::uint32_t i = 0; i < n; ++i) {
                const auto p = partner_of(a, NodeId(i), SlotIndex(t));
                if (!p)
                    continue;
                ASSERT_EQ(partner_of(a, *p, SlotIndex(t)), NodeId(i)) << "n=" << n << " i=" << i << " t=" << t;
                if (i < p->value) {
                    ++pairs_in_column;
                    ++meetings[i][p->value];
                }
            }
            EXPECT_EQ(pairs_in_column, n / 2) << "n=" << n << " t=" << t;
        }
        for (std::uint32_t i = 0; i < n; ++i)
            for (std::uint32_t k = i + 1; k < n; ++k) {
                ASSERT_EQ(meetings[i][k], 1) << "n=" << n << " pair " << i << "," << k;
                const auto j = designated_slot(a, NodeId(i), NodeId(k));
                EXPECT_EQ(designated_slot(a, NodeId(k), NodeId(i)), j);
                EXPECT_EQ(a.cell(NodeId(i), j), static_cast<std::int32_t>(k));
            }
    }
}

TEST(CycleTime, Values)
{
    EXPECT_EQ(cycle_time(8), 7u);
    EXPECT_EQ(cycle_time(2), 1u);
    EXPECT_EQ(cycle_time(7), 7u);
    for (std::uint32_t n = 2; n <= 64; ++n)
        EXPECT_EQ(cycle_time(n), n % 2 == 0 ? n - 1 : n);
    EXPECT_THROW(cycle_time(1), std::invalid_argument);
}

TEST(PartnerOf, Lookups)
{
    const auto eight = build_allocation_matrix(8);
    EXPECT_EQ(partner_of(eight, NodeId(0), SlotIndex(1)), NodeId(4));
    EXPECT_EQ(partner_of(build_allocation_matrix(2), NodeId(1), SlotIndex(1)), NodeId(0));

    const auto three = build_allocation_matrix(3);
    EXPECT_EQ(partner_of(three, NodeId(1), SlotIndex(1)), std::nullopt);

    EXPECT_THROW(partner_of(eight, NodeId(8), SlotIndex(1)), std::out_of_range);
    EXPECT_THROW(partner_of(eight, NodeId(0), SlotIndex(0)), std::out_of_range);
    EXPECT_THROW(partner_of(eight, NodeId(0), SlotIndex(8)), std::out_of_range);
}

TEST(DesignatedSlot, Lookups)
{
    const auto eight = build_allocation_matrix(8);
    EXPECT_EQ(designated_slot(eight, NodeId(0), NodeId(7)), SlotIndex(7));
    EXPECT_EQ(designated_slot(eight, NodeId(3), NodeId(5)), SlotIndex(1));
    EXPECT_EQ(designated_slot(build_allocation_matrix(2), NodeId(0), NodeId(1)), SlotIndex(1));
    EXPECT_THROW(designated_slot(eight, NodeId(2), NodeId(2)), std::invalid_argument);
    EXPECT_THROW(designated_slot(eight, NodeId(2), NodeId(9)), std::out_of_range);
}

TEST(VerifyRequirements, PassesForConstructedMatrices)
{
    for (std::uint32_t n = 2; n <= 64; ++n) {
        const auto report = verify_requirements(build_allocation_matrix(n));
        ASSERT_EQ(report.checks.size(), 5u);
        for (const auto& c : report.checks)
            EXPECT_TRUE(c.passed) << "n=" << n << " " << requirement_letter(c.requirement) << ": " << c.detail;
    }
}

TEST(VerifyRequirements, SwappedColumnEntriesFailPairing)
{
    auto rows = testdata::kEightNode;
    std::swap(rows[0][0], rows[1][0]);
    const auto report = verify_requirements(AllocationMatrix(rows));
    EXPECT_FALSE(report.all_passed());
    const auto& c = report[Requirement::NonOverlappingPairing];
    EXPECT_FALSE(c.passed);
    ASSERT_TRUE(c.slot.has_value());
    EXPECT_EQ(*c.slot, SlotIndex(1));
    EXPECT_FALSE(report[Requirement::SinglePairPerChannelPair].passed);
    // Rows are still permutations, so no destination is doubled up.
    EXPECT_TRUE(report[Requirement::DestinationConflictFree].passed);
}

TEST(VerifyRequirements, DuplicateDestinationFailsA)
{
    auto rows = testdata::kEightNode;
    rows[1][0] = 4;  // node 4 now addressed by 0 and 1 in slot 1
    const auto report = verify_requirements(AllocationMatrix(rows));
    const auto& a = report[Requirement::DestinationConflictFree];
    EXPECT_FALSE(a.passed);
    EXPECT_EQ(a.slot, SlotIndex(1));
    EXPECT_FALSE(report[Requirement::UniqueDestinationPerRow].passed);  // 4 repeats in row 1
}

TEST(VerifyRequirements, RepeatedPairFailsE)
{
    // Re-pair 0-4 and 1-7 as 0-1 and 4-7 in slot 1: columns stay perfect
    // matchings but pair {0,1} now meets twice.
    auto rows = testdata::kEightNode;
    rows[0][0] = 1;
    rows[1][0] = 0;
    rows[4][0] = 7;
    rows[7][0] = 4;
    const auto report = verify_requirements(AllocationMatrix(rows));
    EXPECT_TRUE(report[Requirement::NonOverlappingPairing].passed);
    EXPECT_FALSE(report[Requirement::EquiSpacedCycle].passed);
    EXPECT_FALSE(report[Requirement::UniqueDestinationPerRow].passed);
}

TEST(VerifyRequirements, WrongCycleLengthFailsE)
{
    auto rows = testdata::kEightNode;
    for (auto& r : rows)
        r.pop_back();
    const auto report = verify_requirements(AllocationMatrix(rows));
    EXPECT_FALSE(report[Requirement::EquiSpacedCycle].passed);
}

TEST(VerifyRequirements, SelfPairing)
{
    auto rows = testdata::kEightNode;
    rows[2][2] = 2;
    const auto report = verify_requirements(AllocationMatrix(rows));
    EXPECT_FALSE(report[Requirement::NonOverlappingPairing].passed);
    EXPECT_FALSE(report[Requirement::UniqueDestinationPerRow].passed);
}

TEST(MatrixCsv, EightNodeGolden)
{
    EXPECT_EQ(to_csv(build_allocation_matrix(8)), testdata::kEightNodeCsv);
}

TEST(MatrixCsv, IdleIsX)
{
    EXPECT_EQ(to_csv(build_allocation_matrix(3)), "node,slot1,slot2,slot3\n0,2,1,X\n1,X,0,2\n2,0,X,1\n");
}

TEST(MatrixCsv, RoundTrip)
{
    for (std::uint32_t n = 2; n <= 40; ++n) {
        const auto a = build_allocation_matrix(n);
        EXPECT_EQ(parse_allocation_csv(to_csv(a)), a) << "n=" << n;
    }
}

TEST(MatrixCsv, RejectsMalformed)
{
    EXPECT_THROW(parse_allocation_csv(""), std::invalid_argument);
    EXPECT_THROW(parse_allocation_csv("id,slot1\n0,1\n1,0\n"), std::invalid_argument);
    EXPECT_THROW(parse_allocation_csv("node,slot2\n0,1\n1,0\n"), std::invalid_argument);
    EXPECT_THROW(parse_allocation_csv("node,slot1\n0,1\n1\n"), std::invalid_argument);
    EXPECT_THROW(parse_allocation_csv("node,slot1\n1,0\n0,1\n"), std::invalid_argument);
    EXPECT_THROW(parse_allocation_csv("node,slot1\n0,y\n1,0\n"), std::invalid_argument);
}

TEST(PhaseOf, WrapsByCycle)
{
    EXPECT_EQ(phase_of(1, 7), SlotIndex(1));
    EXPECT_EQ(phase_of(7, 7), SlotIndex(7));
    EXPECT_EQ(phase_of(8, 7), SlotIndex(1));
    EXPECT_EQ(phase_of(15, 7), SlotIndex(1));
    EXPECT_EQ(phase_of(5, 1), SlotIndex(1));
}

}  // namespace
}  // namespace minnet
