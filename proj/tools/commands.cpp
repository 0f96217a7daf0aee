#include "commands.hpp"

#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "minnet/config.hpp"
#include "minnet/report.hpp"
#include "minnet/routing.hpp"
#include "minnet/schedule.hpp"
#include "minnet/simnet.hpp"

namespace minnet::cli {

namespace {

bool emit(const std::filesystem::path& path, const std::string& text, std::ostream& out, std::ostream& err)
{
    if (path.empty()) {
        out << text;
        return true;
    }
    std::ofstream file(path, std::ios::binary);
    file << text;
    if (!file) {
        err << "error: cannot write " << path.string() << '\n';
        return false;
    }
    return true;
}

std::filesystem::path numbered(const std::filesystem::path& path, int k)
{
    if (path.empty())
        return path;
    auto name = path.stem().string() + "." + std::to_string(k) + path.extension().string();
    return path.parent_path() / name;
}

struct RunOutput {
    std::string record;
    std::string summary;
    std::string error;
};

RunOutput simulate_one(const RunConfig& rc, const std::filesystem::path& events_path)
{
    RunOutput result;
    std::ofstream events;
    SlotObserver observer;
    if (!events_path.empty()) {
        events.open(events_path, std::ios::binary);
        if (!events) {
            result.error = "cannot write " + events_path.string();
            return result;
        }
        write_event_header(events);
        observer = [&events](const Network&, const SlotPlan&, const std::vector<SlotEvent>& ev) {
            write_events(events, ev);
        };
    }

    const auto m = rc.sim.baseline == Baseline::SwiftLike ? run_baseline_swift_like(rc.sim, observer)
                                                          : run(rc.sim, observer);
    result.record = metrics_record(rc.sim, m, rc.pipeline);

    std::ostringstream line;
    line << "seed=" << rc.sim.seed << " nodes=" << rc.sim.n_nodes << " level=" << rc.sim.routing_level
         << " baseline=" << to_string(rc.sim.baseline) << " offered=" << m.packets_offered
         << " delivered=" << m.packets_delivered << " dropped=" << m.packets_dropped
         << " mean_delay=" << m.mean_delay_slots << " throughput=" << m.throughput;
    result.summary = line.str();
    if (events && !events.flush())
        result.error = "cannot write " + events_path.string();
    return result;
}

}  // namespace

int cmd_schedule(std::uint32_t n, const std::filesystem::path& out_path, bool verify, std::ostream& out,
                 std::ostream& err)
{
    if (n < 2) {
        err << "error: --nodes must be at least 2\n";
        return 2;
    }
    const auto a = build_allocation_matrix(n);
    if (!emit(out_path, to_csv(a), out, err))
        return 1;
    if (!verify)
        return 0;

    const auto report = verify_requirements(a);
    for (const auto& c : report.checks) {
        out << requirement_letter(c.requirement) << " (" << requirement_name(c.requirement)
            << "): " << (c.passed ? "pass" : "FAIL");
        if (!c.passed)
            out << " - " << c.detail;
        out << '\n';
    }
    return report.all_passed() ? 0 : 1;
}

int cmd_routes(std::uint32_t n, const std::filesystem::path& out_path, std::ostream& out, std::ostream& err)
{
    if (n < 2) {
        err << "error: --nodes must be at least 2\n";
        return 2;
    }
    const auto rt = build_routing_table(build_allocation_matrix(n));
    return emit(out_path, to_csv(rt), out, err) ? 0 : 1;
}

int cmd_simulate(const std::filesystem::path& config_path, const std::filesystem::path& out_override,
                 const std::filesystem::path& events_override, int repeat, std::ostream& out, std::ostream& err)
{
    RunConfig rc;
    try {
        rc = load_run_config(config_path);
    } catch (const ConfigError& e) {
        err << "error: invalid config key " << e.key() << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    if (repeat < 1) {
        err << "error: --repeat must be at least 1\n";
        return 2;
    }

    const auto metrics_path = out_override.empty() ? std::filesystem::path(rc.metrics_out) : out_override;
    const auto events_path = events_override.empty() ? std::filesystem::path(rc.events_out) : events_override;

    std::vector<RunOutput> outputs;
    if (repeat == 1) {
        outputs.push_back(simulate_one(rc, events_path));
    } else {
        std::vector<std::future<RunOutput>> runs;
        for (int k = 0; k < repeat; ++k) {
            auto cfg = rc;
            cfg.sim.seed = rc.sim.seed + static_cast<std::uint64_t>(k);
            runs.push_back(std::async(std::launch::async, [cfg, path = numbered(events_path, k)] {
                return simulate_one(cfg, path);
            }));
        }
        for (auto& r : runs)
            outputs.push_back(r.get());
    }

    int status = 0;
    for (std::size_t k = 0; k < outputs.size(); ++k) {
        const auto& o = outputs[k];
        if (!o.error.empty()) {
            err << "error: " << o.error << '\n';
            status = 1;
            continue;
        }
        const auto path = repeat == 1 ? metrics_path : numbered(metrics_path, static_cast<int>(k));
        if (!emit(path, o.record, out, err))
            status = 1;
        err << o.summary << '\n';
    }
    return status;
}

int cmd_pipeline(const std::filesystem::path& config_path, const std::filesystem::path& out_path, std::ostream& out,
                 std::ostream& err)
{
    RunConfig rc;
    try {
        rc = load_run_config(config_path);
    } catch (const ConfigError& e) {
        err << "error: invalid config key " << e.key() << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    if (!rc.pipeline) {
        err << "error: config has no stage.* or slot_duration keys\n";
        return 2;
    }
    return emit(out_path, pipeline_record(*rc.pipeline), out, err) ? 0 : 1;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"MIN network schedule, routing and simulation tool"};
    app.require_subcommand(1);

    std::uint32_t nodes = 0;
    std::string out_path;
    std::string config_path;
    std::string events_path;
    bool verify = false;
    int repeat = 1;

    auto* schedule = app.add_subcommand("schedule", "Build the slot allocation matrix and dump it as CSV");
    schedule->add_option("--nodes", nodes, "Number of nodes (>= 2)")->required();
    schedule->add_option("--out", out_path, "Output CSV path (default stdout)");
    schedule->add_flag("--verify", verify, "Check the five allocation requirements");

    auto* routes = app.add_subcommand("routes", "Build the level-1 routing table and dump it as CSV");
    routes->add_option("--nodes", nodes, "Number of nodes (>= 2)")->required();
    routes->add_option("--out", out_path, "Output CSV path (default stdout)");

    auto* simulate = app.add_subcommand("simulate", "Run a simulation from a config file");
    simulate->add_option("--config", config_path, "key=value config file")->required();
    simulate->add_option("--out", out_path, "Metrics JSON path (overrides metrics_out)");
    simulate->add_option("--events", events_path, "Per-slot event log CSV (overrides events_out)");
    simulate->add_option("--repeat", repeat, "Number of seeds to run concurrently");

    auto* pipeline = app.add_subcommand("pipeline", "Evaluate the transmit-section processing model");
    pipeline->add_option("--config", config_path, "key=value config file with stage.* keys")->required();
    pipeline->add_option("--out", out_path, "Output JSON path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*schedule)
            return cmd_schedule(nodes, out_path, verify, out, err);
        if (*routes)
            return cmd_routes(nodes, out_path, out, err);
        if (*simulate)
            return cmd_simulate(config_path, out_path, events_path, repeat, out, err);
        if (*pipeline)
            return cmd_pipeline(config_path, out_path, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace minnet::cli
