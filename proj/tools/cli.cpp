#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "parroute/cost.hpp"
#include "parroute/error.hpp"
#include "parroute/eval.hpp"
#include "parroute/netlist.hpp"
#include "parroute/router.hpp"
#include "parroute/rptt.hpp"
#include "parroute/rrg.hpp"

namespace parroute::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::map<int, int> parse_wire_classes(const std::string &text)
{
    std::map<int, int> classes;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw UsageError("wire class '" + item + "' is not <length>:<count>");
        try {
            classes[std::stoi(item.substr(0, colon))] = std::stoi(item.substr(colon + 1));
        } catch (const std::logic_error &) {
            throw UsageError("wire class '" + item + "' is not <length>:<count>");
        }
    }
    if (classes.empty())
        throw UsageError("no wire classes given");
    return classes;
}

void add_cost_flags(CLI::App *cmd, RouterOptions &opt)
{
    CostConfig &c = opt.cost;
    cmd->add_option("--threads", opt.threads, "Worker threads")->capture_default_str()->envname("PARROUTE_THREADS");
    cmd->add_option("--max-iterations", opt.max_iterations, "Negotiation iteration cap")
        ->capture_default_str()
        ->envname("PARROUTE_MAX_ITERATIONS");
    cmd->add_option("--p0", c.p0, "Present cost scale")->capture_default_str()->envname("PARROUTE_P0");
    cmd->add_option("--pf", c.pf, "Present cost growth factor")->capture_default_str()->envname("PARROUTE_PF");
    cmd->add_option("--hf", c.hf, "Historical cost factor")->capture_default_str()->envname("PARROUTE_HF");
    cmd->add_option("--alpha", c.alpha, "Present factor after the historical-centric switch")
        ->capture_default_str()
        ->envname("PARROUTE_ALPHA");
    cmd->add_option("--beta", c.beta, "Historical factor after the historical-centric switch")
        ->capture_default_str()
        ->envname("PARROUTE_BETA");
    cmd->add_option("--congestion-threshold", c.congestion_threshold,
                    "Overused nodes per connection after iteration 1 that marks a congested design")
        ->capture_default_str()
        ->envname("PARROUTE_CONGESTION_THRESHOLD");
    cmd->add_option("--switch-iteration", c.switch_iteration, "Last present-centric iteration")
        ->capture_default_str()
        ->envname("PARROUTE_SWITCH_ITERATION");
    cmd->add_option("--astar-weight", c.astar_weight, "A* heuristic weight (1 is admissible)")
        ->capture_default_str()
        ->envname("PARROUTE_ASTAR_WEIGHT");
    cmd->add_flag("--legacy-cost", c.legacy_mode, "Use the additive legacy node cost (no sharing discount)")
        ->capture_default_str()
        ->envname("PARROUTE_LEGACY_COST");
    cmd->add_flag("!--no-hus", c.hus_enabled, "Keep present-centric coefficients for the whole run")
        ->capture_default_str()
        ->envname("PARROUTE_HUS");
    cmd->add_flag("!--binary-tree", opt.ternary, "Route cutline-crossing connections serially instead of recursively")
        ->capture_default_str();
}

struct Inputs {
    std::string rrg;
    std::string netlist;
    int margin = kDefaultBboxMargin;
};

void add_input_flags(CLI::App *cmd, Inputs &in)
{
    cmd->add_option("--rrg", in.rrg, "Routing resource graph file")->required();
    cmd->add_option("--netlist", in.netlist, "Netlist file")->required();
    cmd->add_option("--margin", in.margin, "Connection bbox margin in tiles")
        ->capture_default_str()
        ->envname("PARROUTE_MARGIN");
}

std::pair<RoutingGraph, Netlist> load_inputs(const Inputs &in)
{
    if (!std::filesystem::exists(in.rrg))
        throw UsageError("no such file: " + in.rrg);
    if (!std::filesystem::exists(in.netlist))
        throw UsageError("no such file: " + in.netlist);
    RoutingGraph g = load_rrg(in.rrg);
    Netlist nl = load_netlist(in.netlist, g, in.margin);
    return {std::move(g), std::move(nl)};
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double v, int precision = 4)
{
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Parallel negotiation-based router for island-style FPGA routing graphs", "parroute"};
    app.set_config("--config", "", "Read flags from a TOML/INI file (command-line flags take precedence)");
    app.require_subcommand(1);
    app.fallthrough(false);

    // generate
    GridParams grid;
    BenchmarkParams bench_params;
    std::string wires = "1:4,2:2,4:2,12:1";
    std::string gen_rrg, gen_netlist;
    auto *gen = app.add_subcommand("generate", "Write a synthetic routing graph and netlist");
    gen->add_option("--width", grid.width, "Grid width in tiles")->capture_default_str();
    gen->add_option("--height", grid.height, "Grid height in tiles")->capture_default_str();
    gen->add_option("--wires", wires, "Wire classes as <length>:<tracks per direction>,...")->capture_default_str();
    gen->add_option("--switch-density", grid.switch_density, "Fraction of wire-to-wire switches kept")
        ->capture_default_str();
    gen->add_option("--pins-per-tile", grid.pins_per_tile, "Input and output pins per tile")->capture_default_str();
    gen->add_option("--nets", bench_params.num_nets, "Number of nets")->capture_default_str();
    gen->add_option("--fanout", bench_params.fanout_mean, "Mean sinks per net")->capture_default_str();
    gen->add_option("--locality", bench_params.locality, "Max sink offset from the source, per axis")
        ->capture_default_str();
    gen->add_option("--margin", bench_params.margin, "Connection bbox margin in tiles")->capture_default_str();
    gen->add_flag("--quadrants", bench_params.quadrants, "Keep each net inside one grid quadrant")
        ->capture_default_str();
    gen->add_option("--seed", grid.seed, "Random seed")->capture_default_str()->envname("PARROUTE_SEED");
    gen->add_option("--rrg", gen_rrg, "Output routing graph file")->required();
    gen->add_option("--netlist", gen_netlist, "Output netlist file")->required();

    // route
    Inputs route_in;
    RouterOptions route_opt;
    std::string solution_out, report_out, report_format = "json", stats_out, tree_out;
    auto *route = app.add_subcommand("route", "Route a netlist and write the solution");
    add_input_flags(route, route_in);
    add_cost_flags(route, route_opt);
    route->add_option("--solution", solution_out, "Output solution file");
    route->add_option("--report", report_out, "Output report file");
    route->add_option("--report-format", report_format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    route->add_option("--stats", stats_out, "Per-iteration statistics as JSON lines");
    route->add_option("--dump-tree", tree_out, "Write the first iteration's partitioning tree");

    // validate
    Inputs val_in;
    std::string val_solution;
    auto *val = app.add_subcommand("validate", "Check a solution; exit 0 when legal, 1 when not");
    add_input_flags(val, val_in);
    val->add_option("--solution", val_solution, "Solution file")->required();

    // score
    double score_runtime = 0.0;
    std::optional<double> score_wl;
    Inputs score_in;
    std::string score_solution;
    auto *sc = app.add_subcommand("score", "0.9 * runtime + 0.1 * critical-path wirelength");
    sc->add_option("--runtime", score_runtime, "Runtime in seconds")->capture_default_str();
    auto *wl_opt = sc->add_option("--wirelength", score_wl, "Critical-path wirelength");
    sc->add_option("--rrg", score_in.rrg, "Routing graph, to measure the wirelength of --solution");
    sc->add_option("--netlist", score_in.netlist, "Netlist, to measure the wirelength of --solution");
    auto *sol_opt = sc->add_option("--solution", score_solution, "Solution whose wirelength to score");
    wl_opt->excludes(sol_opt);

    // bench
    std::vector<std::pair<std::string, std::string>> bench_inputs;
    std::vector<int> bench_threads{1, 2, 4, 8};
    std::string bench_hus = "on";
    int bench_repeat = 3;
    int bench_margin = kDefaultBboxMargin;
    std::string bench_out;
    RouterOptions bench_opt;
    auto *bench = app.add_subcommand("bench", "Sweep thread counts and HUS on/off, one CSV row per setting");
    bench->add_option("--input", bench_inputs, "Routing graph and netlist pair (repeatable)")->required();
    bench->add_option("--thread-counts", bench_threads, "Thread counts to sweep")->capture_default_str()->delimiter(',');
    bench->add_option("--hus", bench_hus, "HUS setting to sweep")
        ->check(CLI::IsMember({"on", "off", "both"}))
        ->capture_default_str();
    bench->add_option("--repeat", bench_repeat, "Runs per setting; the median runtime is reported")
        ->capture_default_str();
    bench->add_option("--margin", bench_margin, "Connection bbox margin in tiles")->capture_default_str();
    bench->add_option("--out", bench_out, "CSV output file (stdout when omitted)");
    add_cost_flags(bench, bench_opt);
    bench->remove_option(bench->get_option("--threads"));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            grid.wires_per_dir_per_len = parse_wire_classes(wires);
            bench_params.seed = grid.seed;
            RoutingGraph g = generate_grid(grid);
            Netlist nl = generate_benchmark(g, bench_params);
            save_rrg(g, gen_rrg);
            save_netlist(nl, gen_netlist);
            out << "generated " << g.num_nodes() << " nodes, " << g.num_edges() << " edges, " << nl.nets.size()
                << " nets, " << nl.connections.size() << " connections\n";
            return kExitOk;
        }

        if (route->parsed()) {
            auto [g, nl] = load_inputs(route_in);
            route_opt.cost.validate();
            Router router(g, nl, route_opt);
            if (!tree_out.empty()) {
                std::vector<int> all(nl.connections.size());
                for (std::size_t i = 0; i < all.size(); ++i)
                    all[i] = static_cast<int>(i);
                std::ofstream t(tree_out);
                dump_tree(*router.build_iteration_tree(all), t);
            }
            RoutingResult result = router.route_all();
            RoutingReport rep = make_report(g, nl, result);
            if (!solution_out.empty())
                save_solution(nl, result.paths, solution_out);
            if (!report_out.empty())
                emit_report(rep, report_out, report_format == "csv" ? ReportFormat::Csv : ReportFormat::Json);
            if (!stats_out.empty()) {
                std::ofstream s(stats_out);
                write_stats_jsonl(result.stats, s);
            }
            out << (rep.legal ? "legal" : "ILLEGAL") << " after " << rep.iterations << " iterations, "
                << "runtime " << fmt(rep.runtime_s) << " s, critical-path wirelength "
                << rep.critical_path_wirelength << ", total wirelength " << rep.total_wirelength << ", score "
                << fmt(rep.score) << '\n';
            return rep.legal ? kExitOk : kExitIllegal;
        }

        if (val->parsed()) {
            auto [g, nl] = load_inputs(val_in);
            if (!std::filesystem::exists(val_solution))
                throw UsageError("no such file: " + val_solution);
            Solution sol = load_solution(val_solution, g, nl);
            ValidationResult v = validate(g, nl, sol);
            if (v.legal()) {
                out << "legal\n";
                return kExitOk;
            }
            out << "illegal: " << v.overflow_nodes << " overflow nodes, " << v.disconnected_connections
                << " disconnected connections\n";
            for (const std::string &msg : v.violations)
                out << "  " << msg << '\n';
            return kExitIllegal;
        }

        if (sc->parsed()) {
            double wl = 0.0;
            if (score_wl) {
                wl = *score_wl;
            } else if (!score_solution.empty()) {
                if (score_in.rrg.empty() || score_in.netlist.empty())
                    throw UsageError("--solution needs --rrg and --netlist");
                auto [g, nl] = load_inputs(score_in);
                wl = static_cast<double>(wirelength(g, nl, load_solution(score_solution, g, nl)).critical_path);
            } else {
                throw UsageError("give --wirelength or --solution");
            }
            if (score_runtime < 0.0 || wl < 0.0)
                throw UsageError("runtime and wirelength must be non-negative");
            out << fmt(score(score_runtime, wl)) << '\n';
            return kExitOk;
        }

        if (bench->parsed()) {
            if (bench_repeat < 1)
                throw UsageError("--repeat must be at least 1");
            std::vector<bool> hus_settings;
            if (bench_hus != "off")
                hus_settings.push_back(true);
            if (bench_hus != "on")
                hus_settings.push_back(false);
            std::ofstream file;
            if (!bench_out.empty()) {
                file.open(bench_out);
                if (!file)
                    throw std::runtime_error("cannot open " + bench_out + " for writing");
            }
            std::ostream &csv = bench_out.empty() ? out : file;
            csv << "benchmark,hus,threads,median_runtime_s,iterations,critical_wirelength,total_wirelength,score,"
                   "legal,speedup_vs_first,hus_runtime_ratio,hus_iteration_ratio\n";
            for (const auto &[rrg_path, net_path] : bench_inputs) {
                auto [g, nl] = load_inputs({rrg_path, net_path, bench_margin});
                struct Row {
                    double runtime;
                    int iterations;
                    RoutingReport rep;
                };
                std::map<std::pair<bool, int>, Row> rows;
                for (bool hus : hus_settings) {
                    for (int threads : bench_threads) {
                        RouterOptions o = bench_opt;
                        o.threads = threads;
                        o.cost.hus_enabled = hus;
                        std::vector<double> times;
                        Row row{};
                        for (int r = 0; r < bench_repeat; ++r) {
                            RoutingResult res = route_all(g, nl, o);
                            times.push_back(res.runtime_s);
                            row.rep = make_report(g, nl, res);
                            row.iterations = res.iterations;
                        }
                        row.runtime = median(times);
                        rows[{hus, threads}] = row;
                    }
                }
                const std::string name = std::filesystem::path(net_path).stem().string();
                for (bool hus : hus_settings) {
                    for (int threads : bench_threads) {
                        const Row &row = rows.at({hus, threads});
                        const Row &base = rows.at({hus, bench_threads.front()});
                        csv << name << ',' << (hus ? "on" : "off") << ',' << threads << ',' << fmt(row.runtime) << ','
                            << row.iterations << ',' << row.rep.critical_path_wirelength << ','
                            << row.rep.total_wirelength << ',' << fmt(score(row.runtime, double(row.rep.critical_path_wirelength)))
                            << ',' << (row.rep.legal ? 1 : 0) << ',' << fmt(base.runtime / row.runtime) << ',';
                        auto off = rows.find({false, threads});
                        if (hus && off != rows.end())
                            csv << fmt(row.runtime / off->second.runtime) << ','
                                << fmt(double(row.iterations) / off->second.iterations);
                        else
                            csv << ',';
                        csv << '\n';
                    }
                }
            }
            return kExitOk;
        }
    } catch (const UsageError &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError &e) {
        err << "parse error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidParameter &e) {
        err << "invalid parameter: " << e.what() << '\n';
        return kExitUsage;
    } catch (const GenerationError &e) {
        err << "generation failed: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace parroute::cli
