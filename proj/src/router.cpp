#include "parroute/router.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <tuple>

#include <json.hpp>

#include "parroute/error.hpp"

namespace parroute {

namespace {

std::int64_t now_ns()
{
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

} // namespace

void RouteTrace::record(const TraceEvent &e)
{
    std::lock_guard lock(mutex_);
    events_.push_back(e);
}

std::vector<TraceEvent> RouteTrace::events() const
{
    std::lock_guard lock(mutex_);
    return events_;
}

void RouteTrace::clear()
{
    std::lock_guard lock(mutex_);
    events_.clear();
}

void parallel_route(const RpttNode &node, TaskGroup &group, const RouteFn &route_one)
{
    if (node.is_leaf()) {
        for (int c : node.connections)
            route_one(c);
        return;
    }
    if (node.mid)
        blocked_route(*node.mid, group.pool(), route_one);
    const RpttNode *left = node.left.get();
    const RpttNode *right = node.right.get();
    group.run([left, &group, &route_one] { parallel_route(*left, group, route_one); });
    group.run([right, &group, &route_one] { parallel_route(*right, group, route_one); });
}

void blocked_route(const RpttNode &node, TaskPool &pool, const RouteFn &route_one)
{
    TaskGroup group(pool);
    parallel_route(node, group, route_one);
    group.wait();
}

struct Router::Scratch {
    struct Entry {
        double f;
        double g;
        NodeId node;
    };
    struct Worse {
        bool operator()(const Entry &a, const Entry &b) const
        {
            if (a.f != b.f)
                return a.f > b.f;
            if (a.g != b.g)
                return a.g < b.g;
            return a.node > b.node;
        }
    };

    explicit Scratch(std::size_t n) : g(n), prev(n), stamp(n, 0) {}

    void begin()
    {
        if (++epoch == 0) {
            std::fill(stamp.begin(), stamp.end(), 0);
            epoch = 1;
        }
        heap.clear();
    }
    bool seen(NodeId n) const { return stamp[static_cast<std::size_t>(n)] == epoch; }
    void set(NodeId n, double cost, NodeId from)
    {
        const auto i = static_cast<std::size_t>(n);
        stamp[i] = epoch;
        g[i] = cost;
        prev[i] = from;
    }

    std::vector<double> g;
    std::vector<NodeId> prev;
    std::vector<std::uint32_t> stamp;
    std::uint32_t epoch = 0;
    std::vector<Entry> heap;
};

Router::Router(const RoutingGraph &graph, const Netlist &netlist, RouterOptions options)
    : graph_(graph),
      netlist_(netlist),
      options_(std::move(options)),
      congestion_(graph.num_nodes()),
      paths_(netlist.connections.size()),
      usage_(netlist.nets.size())
{
    options_.cost.validate();
    if (options_.threads < 1)
        throw InvalidParameter("threads must be at least 1");
    if (options_.max_iterations < 1)
        throw InvalidParameter("max_iterations must be at least 1");
    for (const Connection &c : netlist.connections)
        if (!graph.contains(c.source) || !graph.contains(c.sink))
            throw InvalidParameter("connection " + std::to_string(c.id) + " references a node outside the graph");
    set_cost_state(CostState::initial(options_.cost));
    route_fn_ = [this](int c) { route_traced(c); };
    pool_ = std::make_unique<TaskPool>(options_.threads);
}

Router::~Router() = default;

void Router::set_cost_state(const CostState &state)
{
    state_ = state;
    present_scale_ = options_.cost.p0 * std::pow(state.effective_pf, state.iteration - 1);
}

void Router::reset()
{
    for (auto &p : paths_)
        p.clear();
    for (auto &u : usage_)
        u.clear();
    congestion_.reset();
    set_cost_state(CostState::initial(options_.cost));
}

int Router::share(int net, NodeId node) const
{
    const auto &u = usage_[static_cast<std::size_t>(net)];
    auto it = u.find(node);
    return it == u.end() ? 0 : it->second;
}

std::unique_ptr<Router::Scratch> Router::acquire_scratch()
{
    {
        std::lock_guard lock(scratch_mutex_);
        if (!scratch_.empty()) {
            auto s = std::move(scratch_.back());
            scratch_.pop_back();
            return s;
        }
    }
    return std::make_unique<Scratch>(graph_.num_nodes());
}

void Router::release_scratch(std::unique_ptr<Scratch> scratch)
{
    std::lock_guard lock(scratch_mutex_);
    scratch_.push_back(std::move(scratch));
}

double Router::node_cost(NodeId node, const std::unordered_map<NodeId, int> &usage) const
{
    const RrgNode &n = graph_.node(node);
    auto it = usage.find(node);
    const int share = it == usage.end() ? 0 : it->second;
    // occupancy if this net were to take the node
    const int occ = congestion_.occupancy(node) - (share > 0 ? 1 : 0) + 1;
    const double present = occ > RrgNode::capacity ? 1.0 + present_scale_ * occ : 1.0;
    const double hist = congestion_.historical(node);
    if (options_.cost.legacy_mode)
        return legacy_node_cost(n.base_cost, hist - 1.0, present);
    return node_use_cost(n.base_cost, hist, present, share);
}

bool Router::search(const Connection &conn, const Box &region, Scratch &s, std::vector<NodeId> &path) const
{
    const auto &usage = usage_[static_cast<std::size_t>(conn.net_id)];
    const double weight = options_.cost.astar_weight;
    s.begin();
    s.set(conn.source, 0.0, -1);
    s.heap.push_back({estimate_to_sink(graph_, conn.source, conn.sink, weight), 0.0, conn.source});
    Scratch::Worse worse;
    while (!s.heap.empty()) {
        std::pop_heap(s.heap.begin(), s.heap.end(), worse);
        const Scratch::Entry top = s.heap.back();
        s.heap.pop_back();
        if (top.g > s.g[static_cast<std::size_t>(top.node)])
            continue;
        if (top.node == conn.sink) {
            path.clear();
            for (NodeId n = conn.sink; n != -1; n = s.prev[static_cast<std::size_t>(n)])
                path.push_back(n);
            std::reverse(path.begin(), path.end());
            return true;
        }
        for (NodeId v : graph_.successors(top.node)) {
            const RrgNode &nv = graph_.node(v);
            if (!region.contains(nv.x, nv.y))
                continue;
            if (nv.is_pin() && v != conn.sink)
                continue;
            const double c_n = node_cost(v, usage);
            const double g = top.g + c_n;
            if (s.seen(v) && g >= s.g[static_cast<std::size_t>(v)])
                continue;
            s.set(v, g, top.node);
            const double f = total_cost(top.g, estimate_to_sink(graph_, v, conn.sink, weight), c_n);
            s.heap.push_back({f, g, v});
            std::push_heap(s.heap.begin(), s.heap.end(), worse);
        }
    }
    return false;
}

void Router::install(int connection, std::vector<NodeId> path)
{
    const Connection &conn = netlist_.connections[static_cast<std::size_t>(connection)];
    auto &usage = usage_[static_cast<std::size_t>(conn.net_id)];
    for (NodeId n : path)
        if (++usage[n] == 1)
            congestion_.acquire(n);
    paths_[static_cast<std::size_t>(connection)] = std::move(path);
}

void Router::rip_up(int connection)
{
    auto &path = paths_[static_cast<std::size_t>(connection)];
    if (path.empty())
        return;
    const Connection &conn = netlist_.connections[static_cast<std::size_t>(connection)];
    auto &usage = usage_[static_cast<std::size_t>(conn.net_id)];
    for (NodeId n : path) {
        auto it = usage.find(n);
        if (--it->second == 0) {
            usage.erase(it);
            congestion_.release(n);
        }
    }
    path.clear();
}

const std::vector<NodeId> &Router::route_connection(int connection)
{
    rip_up(connection);
    const Connection &conn = netlist_.connections[static_cast<std::size_t>(connection)];
    if (conn.source == conn.sink)
        return paths_[static_cast<std::size_t>(connection)];

    const RrgNode &src = graph_.node(conn.source);
    const RrgNode &snk = graph_.node(conn.sink);
    const Box span = Box::spanning(src.x, src.y, snk.x, snk.y);
    const Box device{0, 0, graph_.width() - 1, graph_.height() - 1};

    auto scratch = acquire_scratch();
    std::vector<NodeId> path;
    bool found = search(conn, conn.bbox, *scratch, path);
    int margin = std::max(1, netlist_.margin);
    for (int attempt = 0; !found && attempt < options_.bbox_retries; ++attempt) {
        margin *= 2;
        found = search(conn, span.expanded(margin, graph_.width(), graph_.height()), *scratch, path);
    }
    if (!found)
        found = search(conn, device, *scratch, path);
    release_scratch(std::move(scratch));
    if (!found)
        throw UnroutableError("connection " + std::to_string(connection) + " of net " +
                              std::to_string(conn.net_id) + ": sink " + std::to_string(conn.sink) +
                              " unreachable from source " + std::to_string(conn.source));
    install(connection, std::move(path));
    return paths_[static_cast<std::size_t>(connection)];
}

void Router::route_traced(int connection)
{
    if (!trace_) {
        route_connection(connection);
        return;
    }
    TraceEvent e;
    e.connection = connection;
    e.net = netlist_.connections[static_cast<std::size_t>(connection)].net_id;
    e.start_ns = now_ns();
    route_connection(connection);
    e.end_ns = now_ns();
    trace_->record(e);
}

void Router::parallel_route(const RpttNode &node, TaskGroup &group)
{
    parroute::parallel_route(node, group, route_fn_);
}

void Router::blocked_route(const RpttNode &node)
{
    parroute::blocked_route(node, *pool_, route_fn_);
}

std::unique_ptr<RpttNode> Router::build_iteration_tree(std::span<const int> connections) const
{
    std::vector<TreeItem> items;
    items.reserve(connections.size());
    for (int c : connections)
        items.push_back({c, netlist_.connections[static_cast<std::size_t>(c)].net_bbox});
    TreeOptions opts;
    opts.ternary = options_.ternary;
    opts.leaf_order = [this](int a, int b) {
        const Connection &ca = netlist_.connections[static_cast<std::size_t>(a)];
        const Connection &cb = netlist_.connections[static_cast<std::size_t>(b)];
        const auto ka = std::make_tuple(ca.bbox.area(), ca.net_id, ca.id);
        const auto kb = std::make_tuple(cb.bbox.area(), cb.net_id, cb.id);
        return ka < kb;
    };
    return build_tree(items, opts);
}

bool Router::needs_reroute(int connection) const
{
    const Connection &conn = netlist_.connections[static_cast<std::size_t>(connection)];
    const auto &path = paths_[static_cast<std::size_t>(connection)];
    if (path.empty())
        return conn.source != conn.sink;
    return std::any_of(path.begin(), path.end(),
                       [this](NodeId n) { return congestion_.occupancy(n) > RrgNode::capacity; });
}

RoutingResult Router::route_all()
{
    using clock = std::chrono::steady_clock;
    reset();
    RoutingResult result;
    const auto start = clock::now();
    const std::size_t total = netlist_.connections.size();

    std::vector<int> selected;
    for (int it = 1; it <= options_.max_iterations; ++it) {
        const auto iter_start = clock::now();
        selected.clear();
        for (std::size_t c = 0; c < total; ++c)
            if (needs_reroute(static_cast<int>(c)))
                selected.push_back(static_cast<int>(c));
        for (int c : selected)
            rip_up(c);
        if (!selected.empty()) {
            auto tree = build_iteration_tree(selected);
            blocked_route(*tree);
        }

        IterationStats st;
        st.iteration = state_.iteration;
        st.overused_nodes = congestion_.overused();
        st.routed_connections = static_cast<int>(selected.size());
        st.phase = state_.phase;
        st.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - iter_start).count();
        result.stats.push_back(st);
        result.iterations = it;
        result.overflow_nodes = st.overused_nodes;
        if (st.overused_nodes == 0) {
            result.success = true;
            break;
        }
        set_cost_state(advance_iteration(state_, options_.cost, static_cast<std::size_t>(st.overused_nodes), total,
                                         congestion_));
    }
    result.paths = paths_;
    result.runtime_s = std::chrono::duration<double>(clock::now() - start).count();
    return result;
}

bool Router::counters_consistent() const
{
    std::vector<std::unordered_map<NodeId, int>> usage(netlist_.nets.size());
    for (std::size_t c = 0; c < paths_.size(); ++c)
        for (NodeId n : paths_[c])
            ++usage[static_cast<std::size_t>(netlist_.connections[c].net_id)][n];
    if (usage != usage_)
        return false;
    std::vector<int> occ(graph_.num_nodes(), 0);
    for (const auto &u : usage)
        for (const auto &[n, count] : u)
            ++occ[static_cast<std::size_t>(n)];
    int overused = 0;
    for (std::size_t n = 0; n < occ.size(); ++n) {
        if (occ[n] != congestion_.occupancy(static_cast<NodeId>(n)))
            return false;
        if (occ[n] > RrgNode::capacity)
            ++overused;
    }
    return overused == congestion_.overused();
}

RoutingResult route_all(const RoutingGraph &graph, const Netlist &netlist, const RouterOptions &options)
{
    Router router(graph, netlist, options);
    return router.route_all();
}

void write_stats_jsonl(std::span<const IterationStats> stats, std::ostream &out)
{
    for (const IterationStats &s : stats) {
        nlohmann::ordered_json j;
        j["iteration"] = s.iteration;
        j["overused_nodes"] = s.overused_nodes;
        j["routed_connections"] = s.routed_connections;
        j["phase"] = std::string(to_string(s.phase));
        j["wall_ms"] = s.wall_ms;
        out << j.dump() << '\n';
    }
}

} // namespace parroute
