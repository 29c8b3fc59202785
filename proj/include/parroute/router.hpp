#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "parroute/cost.hpp"
#include "parroute/netlist.hpp"
#include "parroute/rptt.hpp"
#include "parroute/rrg.hpp"
#include "parroute/task_pool.hpp"

namespace parroute {

struct RouterOptions {
    int threads = 16;
    int max_iterations = 500;
    /// false schedules crossing connections serially at each cut (binary tree).
    bool ternary = true;
    /// Retries with a doubled bbox margin before searching the whole device.
    int bbox_retries = 3;
    CostConfig cost;
};

struct IterationStats {
    int iteration = 0;
    int overused_nodes = 0;
    int routed_connections = 0;
    Phase phase = Phase::PresentCentric;
    double wall_ms = 0.0;

    friend bool operator==(const IterationStats &, const IterationStats &) = default;
};

struct RoutingResult {
    bool success = false;
    /// Indexed by connection id; empty when unrouted.
    std::vector<std::vector<NodeId>> paths;
    std::vector<IterationStats> stats;
    int iterations = 0;
    int overflow_nodes = 0;
    double runtime_s = 0.0;
};

/// One routed connection as seen by an instrumented run.
struct TraceEvent {
    int connection = 0;
    int net = 0;
    std::int64_t start_ns = 0;
    std::int64_t end_ns = 0;
};

class RouteTrace {
public:
    void record(const TraceEvent &e);
    std::vector<TraceEvent> events() const;
    void clear();

private:
    mutable std::mutex mutex_;
    std::vector<TraceEvent> events_;
};

using RouteFn = std::function<void(int connection)>;

/// Routes the mid subtree to completion, then hands left and right to the
/// group without waiting for them. Leaves route their connections in order.
void parallel_route(const RpttNode &node, TaskGroup &group, const RouteFn &route_one);

/// parallel_route on a fresh group, returning once everything it spawned is done.
void blocked_route(const RpttNode &node, TaskPool &pool, const RouteFn &route_one);

/// Connection-based negotiated-congestion router.
///
/// Per-node occupancy lives in a CongestionMap and is shared by all workers.
/// Per-net usage (share) is touched only by the task routing that net, which
/// the partitioning guarantees is never more than one task at a time.
class Router {
public:
    Router(const RoutingGraph &graph, const Netlist &netlist, RouterOptions options = {});
    ~Router();

    /// A* from source to sink inside the connection's bbox under the current
    /// costs, then installs the path. An already routed connection is ripped
    /// up first. Throws UnroutableError if even the full device fails.
    const std::vector<NodeId> &route_connection(int connection);

    /// Releases the connection's nodes. No-op when unrouted.
    void rip_up(int connection);

    /// Scheduling entry points routing through this router. The group must be
    /// drawn from pool().
    void parallel_route(const RpttNode &node, TaskGroup &group);
    void blocked_route(const RpttNode &node);

    /// The partitioning tree for a set of connections, using net bboxes.
    std::unique_ptr<RpttNode> build_iteration_tree(std::span<const int> connections) const;

    /// Negotiation loop: reroute illegal connections until no node is
    /// overused or max_iterations is reached. Starts from a clean state.
    RoutingResult route_all();

    const std::vector<NodeId> &path(int connection) const { return paths_[static_cast<std::size_t>(connection)]; }
    const std::vector<std::vector<NodeId>> &paths() const { return paths_; }
    int share(int net, NodeId node) const;
    const CongestionMap &congestion() const { return congestion_; }
    const CostState &cost_state() const { return state_; }
    void set_cost_state(const CostState &state);
    const RouterOptions &options() const { return options_; }

    /// Recomputes usage, occupancy and overuse from the installed paths and
    /// compares them with the incrementally maintained counters.
    bool counters_consistent() const;

    /// Discards all routes and congestion history.
    void reset();

    void set_trace(RouteTrace *trace) { trace_ = trace; }
    TaskPool &pool() { return *pool_; }

private:
    struct Scratch;

    std::unique_ptr<Scratch> acquire_scratch();
    void release_scratch(std::unique_ptr<Scratch> scratch);
    bool search(const Connection &conn, const Box &region, Scratch &scratch, std::vector<NodeId> &path) const;
    double node_cost(NodeId node, const std::unordered_map<NodeId, int> &usage) const;
    void install(int connection, std::vector<NodeId> path);
    void route_traced(int connection);
    bool needs_reroute(int connection) const;

    const RoutingGraph &graph_;
    const Netlist &netlist_;
    RouterOptions options_;
    CongestionMap congestion_;
    CostState state_;
    double present_scale_ = 0.0;
    std::vector<std::vector<NodeId>> paths_;
    std::vector<std::unordered_map<NodeId, int>> usage_;
    RouteFn route_fn_;
    std::unique_ptr<TaskPool> pool_;
    RouteTrace *trace_ = nullptr;

    std::mutex scratch_mutex_;
    std::vector<std::unique_ptr<Scratch>> scratch_;
};

RoutingResult route_all(const RoutingGraph &graph, const Netlist &netlist, const RouterOptions &options = {});

/// One JSON object per line: iteration, overused_nodes, routed_connections, phase, wall_ms.
void write_stats_jsonl(std::span<const IterationStats> stats, std::ostream &out);

} // namespace parroute
