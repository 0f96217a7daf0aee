#include "minnet/schedule.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace minnet {

LatinSquare::LatinSquare(std::uint32_t order) : order_(order), cells_(std::size_t{order} * order)
{
    if (order == 0)
        throw std::invalid_argument("Latin square order must be positive");
    for (std::uint32_t i = 0; i < order; ++i)
        for (std::uint32_t j = 0; j < order; ++j)
            cells_[std::size_t{i} * order + j] = (i + j) % order;
}

std::uint32_t LatinSquare::at(std::uint32_t i, std::uint32_t j) const
{
    return cells_[std::size_t{i % order_} * order_ + j % order_];
}

bool LatinSquare::is_latin() const
{
    for (std::uint32_t line = 0; line < order_; ++line) {
        std::vector<bool> row_seen(order_), col_seen(order_);
        for (std::uint32_t x = 0; x < order_; ++x) {
            const auto r = at(line, x);
            const auto c = at(x, line);
            if (r >= order_ || c >= order_ || row_seen[r] || col_seen[c])
                return false;
            row_seen[r] = col_seen[c] = true;
        }
    }
    return true;
}

LatinSquare build_latin_square(std::uint32_t n)
{
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("Latin square construction needs an even node count >= 2, got " +
                                    std::to_string(n));
    return LatinSquare(n - 1);
}

AllocationMatrix::AllocationMatrix(std::vector<std::vector<std::int32_t>> rows)
    : n_nodes_(static_cast<std::uint32_t>(rows.size())), cycle_(0), rows_(std::move(rows))
{
    if (rows_.size() < 2)
        throw std::invalid_argument("allocation matrix needs at least two nodes");
    cycle_ = static_cast<std::uint32_t>(rows_.front().size());
    if (cycle_ == 0)
        throw std::invalid_argument("allocation matrix needs at least one slot");
    for (const auto& row : rows_)
        if (row.size() != cycle_)
            throw std::invalid_argument("allocation matrix rows have differing slot counts");
}

std::int32_t AllocationMatrix::cell(NodeId node, SlotIndex slot) const
{
    if (node.value >= n_nodes_)
        throw std::out_of_range("node " + std::to_string(node.value) + " out of range");
    if (slot.value < 1 || slot.value > cycle_)
        throw std::out_of_range("slot " + std::to_string(slot.value) + " out of range");
    return rows_[node.value][slot.value - 1];
}

namespace {

AllocationMatrix build_even(std::uint32_t n)
{
    const auto square = build_latin_square(n);
    const std::uint32_t m = n - 1;
    const auto last = static_cast<std::int32_t>(n - 1);
    std::vector<std::vector<std::int32_t>> rows(n, std::vector<std::int32_t>(m, AllocationMatrix::kIdle));

    // b[i][k] = j places k in row i at slot j; residue 0 is slot m. k = 0 is
    // re-routed to the last node and the diagonal k = i to node 0.
    for (std::uint32_t i = 1; i < m; ++i) {
        for (std::uint32_t k = 0; k < m; ++k) {
            const auto j = square.at(i, k);
            const auto slot = j == 0 ? m : j;
            std::int32_t partner = static_cast<std::int32_t>(k);
            if (k == 0)
                partner = last;
            else if (k == i)
                partner = 0;
            rows[i][slot - 1] = partner;
            if (partner == 0)
                rows[0][slot - 1] = static_cast<std::int32_t>(i);
            else if (partner == last)
                rows[n - 1][slot - 1] = static_cast<std::int32_t>(i);
        }
    }
    rows[0][m - 1] = last;
    rows[n - 1][m - 1] = 0;
    return AllocationMatrix(std::move(rows));
}

}  // namespace

AllocationMatrix build_allocation_matrix(std::uint32_t n)
{
    if (n < 2)
        throw std::invalid_argument("allocation matrix needs n >= 2, got " + std::to_string(n));
    if (n % 2 == 0)
        return build_even(n);

    auto rows = build_even(n + 1).rows();
    rows.pop_back();
    for (auto& row : rows)
        std::replace(row.begin(), row.end(), static_cast<std::int32_t>(n), AllocationMatrix::kIdle);
    return AllocationMatrix(std::move(rows));
}

std::uint32_t cycle_time(std::uint32_t n)
{
    if (n < 2)
        throw std::invalid_argument("cycle time needs n >= 2, got " + std::to_string(n));
    return 2 * ((n + 1) / 2) - 1;
}

std::optional<NodeId> partner_of(const AllocationMatrix& a, NodeId node, SlotIndex slot)
{
    const auto v = a.cell(node, slot);
    if (v == AllocationMatrix::kIdle)
        return std::nullopt;
    return NodeId(static_cast<std::uint32_t>(v));
}

SlotIndex designated_slot(const AllocationMatrix& a, NodeId i, NodeId k)
{
    if (i == k)
        throw std::invalid_argument("designated slot needs two distinct nodes");
    if (i.value >= a.n_nodes() || k.value >= a.n_nodes())
        throw std::out_of_range("node out of range");
    for (std::uint32_t t = 1; t <= a.cycle_length(); ++t)
        if (a.cell(i, SlotIndex(t)) == static_cast<std::int32_t>(k.value))
            return SlotIndex(t);
    throw std::out_of_range("nodes " + std::to_string(i.value) + " and " + std::to_string(k.value) +
                            " are never paired");
}

bool VerificationReport::all_passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const RequirementCheck& VerificationReport::operator[](Requirement r) const
{
    for (const auto& c : checks)
        if (c.requirement == r)
            return c;
    throw std::out_of_range("requirement not in report");
}

char requirement_letter(Requirement r)
{
    return static_cast<char>('A' + static_cast<int>(r));
}

std::string_view requirement_name(Requirement r)
{
    switch (r) {
    case Requirement::DestinationConflictFree:
        return "destination-conflict freeness";
    case Requirement::SinglePairPerChannelPair:
        return "single node-pair per sub-channel pair";
    case Requirement::NonOverlappingPairing:
        return "non-overlapping pairing in each slot";
    case Requirement::UniqueDestinationPerRow:
        return "unique destination in each slot";
    case Requirement::EquiSpacedCycle:
        return "equi-spaced allocation per node pair";
    }
    return "unknown";
}

namespace {

class Checker {
public:
    explicit Checker(Requirement r) { check_.requirement = r; }

    void fail(std::string detail, std::optional<std::uint32_t> node, std::optional<std::uint32_t> slot)
    {
        if (!check_.passed)
            return;
        check_.passed = false;
        check_.detail = std::move(detail);
        if (node)
            check_.node = NodeId(*node);
        if (slot)
            check_.slot = SlotIndex(*slot);
    }

    bool failed() const { return !check_.passed; }
    RequirementCheck take() { return std::move(check_); }

private:
    RequirementCheck check_;
};

std::string str(std::uint32_t v)
{
    return std::to_string(v);
}

}  // namespace

VerificationReport verify_requirements(const AllocationMatrix& a)
{
    const auto n = a.n_nodes();
    const auto cycle = a.cycle_length();
    const auto& rows = a.rows();
    auto in_range = [n](std::int32_t v) { return v >= 0 && static_cast<std::uint32_t>(v) < n; };

    Checker conflict(Requirement::DestinationConflictFree);
    Checker symmetric(Requirement::SinglePairPerChannelPair);
    Checker pairing(Requirement::NonOverlappingPairing);
    Checker distinct(Requirement::UniqueDestinationPerRow);
    Checker spacing(Requirement::EquiSpacedCycle);

    for (std::uint32_t t = 1; t <= cycle && !(conflict.failed() && symmetric.failed() && pairing.failed()); ++t) {
        std::vector<std::int32_t> sender(n, -1);
        std::vector<int> membership(n, 0);
        std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
        std::uint32_t idle = 0;

        for (std::uint32_t i = 0; i < n; ++i) {
            const auto v = rows[i][t - 1];
            if (v == AllocationMatrix::kIdle) {
                ++idle;
                continue;
            }
            if (!in_range(v)) {
                pairing.fail("slot " + str(t) + ": node " + str(i) + " paired with unknown node " + std::to_string(v), i,
                             t);
                continue;
            }
            const auto k = static_cast<std::uint32_t>(v);
            if (sender[k] >= 0)
                conflict.fail("slot " + str(t) + ": node " + str(k) + " is destination of both " +
                                  std::to_string(sender[k]) + " and " + str(i),
                              i, t);
            else
                sender[k] = static_cast<std::int32_t>(i);

            if (k == i) {
                pairing.fail("slot " + str(t) + ": node " + str(i) + " paired with itself", i, t);
                continue;
            }
            if (rows[k][t - 1] != static_cast<std::int32_t>(i))
                symmetric.fail("slot " + str(t) + ": node " + str(i) + " sends to " + str(k) + " but " + str(k) +
                                   " sends to " +
                                   (rows[k][t - 1] == AllocationMatrix::kIdle ? std::string("X")
                                                                              : std::to_string(rows[k][t - 1])),
                               i, t);
            pairs.emplace(std::min(i, k), std::max(i, k));
        }

        for (const auto& [x, y] : pairs) {
            ++membership[x];
            ++membership[y];
        }
        for (std::uint32_t i = 0; i < n; ++i) {
            if (membership[i] > 1) {
                pairing.fail("slot " + str(t) + ": node " + str(i) + " belongs to " + std::to_string(membership[i]) +
                                 " pairs",
                             i, t);
                break;
            }
            if (membership[i] == 0 && rows[i][t - 1] != AllocationMatrix::kIdle) {
                pairing.fail("slot " + str(t) + ": node " + str(i) + " has a partner but no pair", i, t);
                break;
            }
        }
        if (idle != n % 2)
            pairing.fail("slot " + str(t) + ": " + str(idle) + " idle nodes, expected " + str(n % 2), std::nullopt, t);
    }

    for (std::uint32_t i = 0; i < n && !distinct.failed(); ++i) {
        std::vector<bool> seen(n, false);
        for (std::uint32_t t = 1; t <= cycle; ++t) {
            const auto v = rows[i][t - 1];
            if (v == AllocationMatrix::kIdle)
                continue;
            if (!in_range(v)) {
                distinct.fail("node " + str(i) + " slot " + str(t) + ": unknown destination " + std::to_string(v), i,
                              t);
                break;
            }
            if (static_cast<std::uint32_t>(v) == i) {
                distinct.fail("node " + str(i) + " slot " + str(t) + ": destination is the node itself", i, t);
                break;
            }
            if (seen[static_cast<std::size_t>(v)]) {
                distinct.fail("node " + str(i) + " slot " + str(t) + ": destination " + std::to_string(v) +
                                  " repeats an earlier slot",
                              i, t);
                break;
            }
            seen[static_cast<std::size_t>(v)] = true;
        }
    }

    if (cycle != cycle_time(n)) {
        spacing.fail("cycle has " + str(cycle) + " slots, expected " + str(cycle_time(n)), std::nullopt, std::nullopt);
    } else {
        // Every unordered pair must meet in exactly one column, so that the
        // repeating schedule brings it together every `cycle` slots.
        std::vector<std::vector<std::uint32_t>> meetings(n, std::vector<std::uint32_t>(n, 0));
        std::vector<std::vector<std::uint32_t>> first_slot(n, std::vector<std::uint32_t>(n, 0));
        for (std::uint32_t t = 1; t <= cycle; ++t) {
            for (std::uint32_t i = 0; i < n; ++i) {
                const auto v = rows[i][t - 1];
                if (!in_range(v) || static_cast<std::uint32_t>(v) == i)
                    continue;
                const auto k = static_cast<std::uint32_t>(v);
                const auto lo = std::min(i, k), hi = std::max(i, k);
                // Count a column once even if only one side names the pair.
                if (first_slot[lo][hi] != t) {
                    ++meetings[lo][hi];
                    first_slot[lo][hi] = t;
                }
            }
        }
        for (std::uint32_t i = 0; i < n && !spacing.failed(); ++i) {
            for (std::uint32_t k = i + 1; k < n; ++k) {
                if (meetings[i][k] != 1) {
                    spacing.fail("pair {" + str(i) + "," + str(k) + "} meets " + str(meetings[i][k]) +
                                     " times per cycle",
                                 i, std::nullopt);
                    break;
                }
            }
        }
    }

    VerificationReport report;
    report.checks.push_back(conflict.take());
    report.checks.push_back(symmetric.take());
    report.checks.push_back(pairing.take());
    report.checks.push_back(distinct.take());
    report.checks.push_back(spacing.take());
    return report;
}

std::string to_csv(const AllocationMatrix& a)
{
    std::ostringstream out;
    out << "node";
    for (std::uint32_t t = 1; t <= a.cycle_length(); ++t)
        out << ",slot" << t;
    out << '\n';
    for (std::uint32_t i = 0; i < a.n_nodes(); ++i) {
        out << i;
        for (const auto v : a.rows()[i]) {
            out << ',';
            if (v == AllocationMatrix::kIdle)
                out << 'X';
            else
                out << v;
        }
        out << '\n';
    }
    return out.str();
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        fields.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return fields;
}

std::int32_t parse_int(std::string_view s, std::size_t line_no)
{
    std::int32_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v < 0)
        throw std::invalid_argument("line " + std::to_string(line_no) + ": bad cell '" + std::string(s) + "'");
    return v;
}

}  // namespace

AllocationMatrix parse_allocation_csv(std::string_view csv)
{
    std::vector<std::string_view> lines;
    for (auto line : split(csv, '\n')) {
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty())
        lines.pop_back();
    if (lines.empty())
        throw std::invalid_argument("empty matrix CSV");

    const auto header = split(lines[0], ',');
    if (header.size() < 2 || header[0] != "node")
        throw std::invalid_argument("matrix CSV header must start with 'node,slot1'");
    for (std::size_t t = 1; t < header.size(); ++t)
        if (header[t] != "slot" + std::to_string(t))
            throw std::invalid_argument("matrix CSV header column " + std::to_string(t) + " must be 'slot" +
                                        std::to_string(t) + "'");

    std::vector<std::vector<std::int32_t>> rows;
    for (std::size_t l = 1; l < lines.size(); ++l) {
        const auto fields = split(lines[l], ',');
        if (fields.size() != header.size())
            throw std::invalid_argument("line " + std::to_string(l + 1) + ": expected " +
                                        std::to_string(header.size()) + " fields");
        if (parse_int(fields[0], l + 1) != static_cast<std::int32_t>(rows.size()))
            throw std::invalid_argument("line " + std::to_string(l + 1) + ": rows must be numbered 0..N-1 in order");
        std::vector<std::int32_t> row;
        for (std::size_t t = 1; t < fields.size(); ++t)
            row.push_back(fields[t] == "X" ? AllocationMatrix::kIdle : parse_int(fields[t], l + 1));
        rows.push_back(std::move(row));
    }
    return AllocationMatrix(std::move(rows));
}

}  // namespace minnet
