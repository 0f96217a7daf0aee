#include <charconv>
#include <cmath>
#include <string>

#include "minnet/simnet.hpp"

namespace minnet {

std::string_view to_string(TrafficModel m)
{
    return m == TrafficModel::Trace ? "trace" : "uniform-random";
}

std::string_view to_string(Baseline b)
{
    return b == Baseline::SwiftLike ? "swift_like" : "min";
}

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

template <typename T>
T field(std::string_view s, std::size_t line_no)
{
    s = trim(s);
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError("trace", "line " + std::to_string(line_no) + ": bad number '" + std::string(s) + "'");
    return v;
}

}  // namespace

std::vector<TraceRecord> parse_trace_csv(std::string_view text, std::uint32_t n_nodes)
{
    std::vector<TraceRecord> records;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        auto line = trim(text.substr(0, eol));
        text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
        ++line_no;

        if (line.empty() || line.front() == '#')
            continue;
        if (records.empty() && line == "arrival_slot,src,dst")
            continue;

        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos)
            throw ConfigError("trace", "line " + std::to_string(line_no) + ": expected arrival_slot,src,dst");

        TraceRecord r;
        r.arrival_slot = field<GlobalSlot>(line.substr(0, c1), line_no);
        r.source = NodeId(field<std::uint32_t>(line.substr(c1 + 1, c2 - c1 - 1), line_no));
        r.destination = NodeId(field<std::uint32_t>(line.substr(c2 + 1), line_no));

        const auto where = "line " + std::to_string(line_no) + ": ";
        if (r.arrival_slot < 1)
            throw ConfigError("trace", where + "arrival slot must be >= 1");
        if (r.source.value >= n_nodes || r.destination.value >= n_nodes)
            throw ConfigError("trace", where + "node out of range for " + std::to_string(n_nodes) + " nodes");
        if (r.source == r.destination)
            throw ConfigError("trace", where + "source equals destination");
        if (!records.empty() && r.arrival_slot < records.back().arrival_slot)
            throw ConfigError("trace", where + "arrival slots must be non-decreasing");
        records.push_back(r);
    }
    return records;
}

void validate(const SimConfig& cfg)
{
    if (cfg.n_nodes < 2)
        throw ConfigError("nodes", "need at least 2 nodes");
    if (cfg.routing_level < 0 || cfg.routing_level > 2)
        throw ConfigError("routing_level", "must be 0, 1 or 2");
    if (cfg.slots_to_run < 0)
        throw ConfigError("slots", "must be >= 0");
    if (!std::isfinite(cfg.arrival_rate) || cfg.arrival_rate < 0.0 || cfg.arrival_rate > 1.0)
        throw ConfigError("arrival_rate", "must lie in [0, 1]");
    if (!std::isfinite(cfg.control_overhead) || cfg.control_overhead < 0.0 || cfg.control_overhead >= 1.0)
        throw ConfigError("control_overhead", "must lie in [0, 1)");
    if (cfg.routing_level == 2 && cfg.secondary_receivers < 1)
        throw ConfigError("secondary_receivers", "routing level 2 needs at least one secondary receiver");
    if (cfg.baseline == Baseline::SwiftLike && cfg.routing_level != 0)
        throw ConfigError("baseline", "the stop-and-wait baseline only supports routing level 0");
    if (cfg.buffer_capacity && *cfg.buffer_capacity == 0)
        throw ConfigError("buffer_capacity", "must be positive or 'unlimited'");
    if (cfg.processing_budget && *cfg.processing_budget < 0)
        throw ConfigError("processing_budget", "must be >= 0");
    for (std::size_t i = 0; i < cfg.trace.size(); ++i) {
        const auto& r = cfg.trace[i];
        if (r.arrival_slot < 1 || r.source.value >= cfg.n_nodes || r.destination.value >= cfg.n_nodes ||
            r.source == r.destination || (i > 0 && r.arrival_slot < cfg.trace[i - 1].arrival_slot))
            throw ConfigError("trace", "record " + std::to_string(i) + " is invalid for this network");
    }
}

TrafficSource::TrafficSource(const SimConfig& cfg)
    : n_(cfg.n_nodes), rate_(cfg.arrival_rate), model_(cfg.traffic_model), trace_(cfg.trace), rng_(cfg.seed)
{
}

// Draws are built from raw 64-bit engine output so that the packet stream
// is identical on every standard library.
bool TrafficSource::bernoulli(double p)
{
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    return u < p;
}

std::uint64_t TrafficSource::below(std::uint64_t bound)
{
    const std::uint64_t reject_under = (0 - bound) % bound;
    std::uint64_t x = rng_();
    while (x < reject_under)
        x = rng_();
    return x % bound;
}

std::vector<Packet> TrafficSource::generate(GlobalSlot slot)
{
    std::vector<Packet> out;
    auto emit = [&](NodeId src, NodeId dst) {
        Packet p;
        p.id = next_id_++;
        p.source = src;
        p.destination = dst;
        p.arrival_slot = slot;
        p.holder = src;
        out.push_back(std::move(p));
    };

    if (model_ == TrafficModel::Trace) {
        while (cursor_ < trace_.size() && trace_[cursor_].arrival_slot < slot)
            ++cursor_;
        for (; cursor_ < trace_.size() && trace_[cursor_].arrival_slot == slot; ++cursor_)
            emit(trace_[cursor_].source, trace_[cursor_].destination);
        return out;
    }

    if (rate_ <= 0.0)
        return out;
    for (std::uint32_t u = 0; u < n_; ++u) {
        if (!bernoulli(rate_))
            continue;
        auto d = static_cast<std::uint32_t>(below(n_ - 1));
        if (d >= u)
            ++d;
        emit(NodeId(u), NodeId(d));
    }
    return out;
}

}  // namespace minnet
