#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "parroute/netlist.hpp"
#include "parroute/router.hpp"
#include "parroute/rrg.hpp"

namespace parroute {

/// Paths indexed by connection id.
using Solution = std::vector<std::vector<NodeId>>;

struct ValidationResult {
    int overflow_nodes = 0;
    int disconnected_connections = 0;
    std::vector<std::string> violations;

    bool legal() const { return overflow_nodes == 0 && disconnected_connections == 0; }
};

/// Recomputes occupancy from the paths alone. A node counts once per net, so
/// connections of one net may share nodes; a node used by two nets overflows.
ValidationResult validate(const RoutingGraph &graph, const Netlist &netlist, const Solution &solution);

struct Wirelength {
    long long total = 0;
    long long critical_path = 0;
};

/// Wirelength in INT tiles: each node contributes its length. The total
/// counts each net's node set once; the critical path is the longest single
/// connection.
Wirelength wirelength(const RoutingGraph &graph, const Netlist &netlist, const Solution &solution);

inline double score(double runtime_s, double critical_path_wl) { return 0.9 * runtime_s + 0.1 * critical_path_wl; }

struct RoutingReport {
    bool legal = false;
    int overflow_nodes = 0;
    int disconnected_connections = 0;
    long long total_wirelength = 0;
    long long critical_path_wirelength = 0;
    double runtime_s = 0.0;
    double score = 0.0;
    int iterations = 0;
    std::vector<IterationStats> per_iteration;

    friend bool operator==(const RoutingReport &, const RoutingReport &) = default;
};

RoutingReport make_report(const RoutingGraph &graph, const Netlist &netlist, const RoutingResult &result);

enum class ReportFormat { Json, Csv };

std::string report_to_json(const RoutingReport &report);
RoutingReport report_from_json(const std::string &text);
/// Header line plus one data row; per-iteration stats are not included.
std::string report_to_csv(const RoutingReport &report);
void emit_report(const RoutingReport &report, const std::filesystem::path &path, ReportFormat format);

/// `PATH <net_id> <conn_idx> <node_id>+` per routed connection, where
/// conn_idx is the sink index within the net.
void write_solution(const Netlist &netlist, const Solution &solution, std::ostream &out);
Solution read_solution(std::istream &in, const RoutingGraph &graph, const Netlist &netlist);
void save_solution(const Netlist &netlist, const Solution &solution, const std::filesystem::path &path);
Solution load_solution(const std::filesystem::path &path, const RoutingGraph &graph, const Netlist &netlist);

} // namespace parroute
