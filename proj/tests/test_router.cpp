#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <stdexcept>

#include "parroute/error.hpp"
#include "parroute/eval.hpp"
#include "parroute/router.hpp"
#include "parroute/task_pool.hpp"
#include "support.hpp"

using namespace parroute;

namespace {

RoutingGraph grid_graph(int w, int h, std::map<int, int> wires = {{1, 2}, {2, 1}, {4, 1}}, int pins = 8,
                        std::uint64_t seed = 1)
{
    GridParams p;
    p.width = w;
    p.height = h;
    p.wires_per_dir_per_len = std::move(wires);
    p.pins_per_tile = pins;
    p.seed = seed;
    return generate_grid(p);
}

Netlist bench(const RoutingGraph &g, int nets, std::uint64_t seed, int locality = 2)
{
    BenchmarkParams bp;
    bp.num_nets = nets;
    bp.seed = seed;
    bp.locality = locality;
    return generate_benchmark(g, bp);
}

NodeId pin_in_tile(const std::vector<NodeId> &pins, const RoutingGraph &g, int x, int y, int nth = 0)
{
    for (NodeId n : pins)
        if (g.node(n).x == x && g.node(n).y == y && nth-- == 0)
            return n;
    return -1;
}

/// Two sources share one tile; two sinks share another. A cheap wire and a
/// slightly dearer one both join them, so both nets want the cheap one.
RoutingGraph bottleneck_graph()
{
    std::vector<RrgNode> nodes{
        {0, 0, 0, 0, 0.5},  // source A
        {1, 0, 0, 0, 0.5},  // source B
        {2, 0, 0, 1, 1.0},  // cheap wire
        {3, 0, 0, 2, 3.0},  // dear wire
        {4, 1, 0, 0, 0.5},  // sink A
        {5, 1, 0, 0, 0.5},  // sink B
    };
    std::vector<std::pair<NodeId, NodeId>> edges{{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 4}, {2, 5}, {3, 4}, {3, 5}};
    return RoutingGraph(2, 1, std::move(nodes), std::move(edges));
}

/// Tree node -> all connections beneath it.
void check_mid_first(const RpttNode &n, const std::map<int, TraceEvent> &ev)
{
    if (n.is_leaf())
        return;
    if (n.mid) {
        std::int64_t mid_end = 0;
        for (int c : n.mid->connections)
            mid_end = std::max(mid_end, ev.at(c).end_ns);
        for (const RpttNode *side : {n.left.get(), n.right.get()})
            for (int c : side->connections)
                CHECK(ev.at(c).start_ns >= mid_end);
        check_mid_first(*n.mid, ev);
    }
    check_mid_first(*n.left, ev);
    check_mid_first(*n.right, ev);
}

int intra_net_overlaps(const std::vector<TraceEvent> &events)
{
    std::map<int, std::vector<TraceEvent>> by_net;
    for (const TraceEvent &e : events)
        by_net[e.net].push_back(e);
    int overlaps = 0;
    for (auto &[net, evs] : by_net) {
        std::sort(evs.begin(), evs.end(), [](const auto &a, const auto &b) { return a.start_ns < b.start_ns; });
        for (std::size_t i = 1; i < evs.size(); ++i)
            if (evs[i].start_ns < evs[i - 1].end_ns)
                ++overlaps;
    }
    return overlaps;
}

} // namespace

TEST_SUITE("router")
{
    TEST_CASE("connection whose source is its sink routes to an empty path")
    {
        const RoutingGraph g = grid_graph(3, 3);
        const auto srcs = testsupport::source_pins(g);
        Netlist nl = make_netlist({Net{0, srcs[0], {srcs[0]}}}, g);
        Router r(g, nl, {.threads = 1});
        CHECK(r.route_connection(0).empty());
        const RoutingResult res = r.route_all();
        CHECK(res.success);
        CHECK(validate(g, nl, res.paths).legal());
    }

    TEST_CASE("zero nets succeed immediately")
    {
        const RoutingGraph g = grid_graph(3, 3);
        const Netlist nl;
        const RoutingResult res = route_all(g, nl, {.threads = 2});
        CHECK(res.success);
        CHECK(res.paths.empty());
        CHECK(res.overflow_nodes == 0);
    }

    TEST_CASE("invalid options are rejected")
    {
        const RoutingGraph g = grid_graph(3, 3);
        const Netlist nl;
        CHECK_THROWS_AS(Router(g, nl, {.threads = 0}), InvalidParameter);
        CHECK_THROWS_AS(Router(g, nl, {.threads = 1, .max_iterations = 0}), InvalidParameter);
        RouterOptions o;
        o.cost.alpha = 3.0;
        CHECK_THROWS_AS(Router(g, nl, o), InvalidParameter);
    }

    TEST_CASE("single connection cost equals Dijkstra inside the search box")
    {
        const RoutingGraph g = grid_graph(8, 8, {{1, 2}, {2, 1}, {4, 1}, {12, 1}}, 4);
        const auto srcs = testsupport::source_pins(g);
        const auto snks = testsupport::sink_pins(g);
        testsupport::Rng rng(17);
        std::vector<Net> nets;
        for (int i = 0; i < 120; ++i) {
            const NodeId s = srcs[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(srcs.size()) - 1))];
            NodeId t;
            do
                t = snks[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(snks.size()) - 1))];
            while (g.node(t).x == g.node(s).x && g.node(t).y == g.node(s).y);
            nets.push_back({i, s, {t}});
        }
        const Netlist nl = make_netlist(nets, g);
        Router r(g, nl, {.threads = 1});
        for (std::size_t c = 0; c < nl.connections.size(); ++c) {
            const Connection &conn = nl.connections[c];
            const auto path = r.route_connection(static_cast<int>(c));
            REQUIRE(path.size() >= 2);
            CHECK(path.front() == conn.source);
            CHECK(path.back() == conn.sink);
            const double oracle = testsupport::dijkstra_cost(g, conn.source, conn.sink, conn.bbox);
            CHECK(testsupport::path_base_cost(g, path) == oracle);
            r.rip_up(static_cast<int>(c));
        }
    }

    TEST_CASE("heavier A* weight still finds a valid path")
    {
        const RoutingGraph g = grid_graph(8, 8);
        const Netlist nl = bench(g, 30, 2);
        RouterOptions o;
        o.threads = 1;
        o.cost.astar_weight = 2.0;
        const RoutingResult res = route_all(g, nl, o);
        CHECK(res.success);
        CHECK(validate(g, nl, res.paths).legal());
    }

    TEST_CASE("connections of one net share a trunk")
    {
        const RoutingGraph g = grid_graph(4, 4, {{1, 2}});
        const auto srcs = testsupport::source_pins(g);
        const auto snks = testsupport::sink_pins(g);
        const NodeId s = pin_in_tile(srcs, g, 0, 0);
        const NodeId a = pin_in_tile(snks, g, 3, 0);
        const NodeId b = pin_in_tile(snks, g, 3, 1);
        const Netlist nl = make_netlist({Net{0, s, {a, b}}}, g);
        Router r(g, nl, {.threads = 1});
        const auto p0 = r.route_connection(0);
        const auto p1 = r.route_connection(1);
        const Wirelength wl = wirelength(g, nl, r.paths());
        long long separate = 0;
        for (const auto *p : {&p0, &p1})
            for (NodeId n : *p)
                separate += g.node(n).length;
        CHECK(wl.total < separate);
        // the shared nodes are counted once per net in occupancy
        for (NodeId n : p0)
            if (std::find(p1.begin(), p1.end(), n) != p1.end()) {
                CHECK(r.share(0, n) == 2);
                CHECK(r.congestion().occupancy(n) == 1);
            }
    }

    TEST_CASE("rip-up restores the previous state and is idempotent")
    {
        const RoutingGraph g = grid_graph(6, 6);
        const Netlist nl = bench(g, 20, 3);
        Router r(g, nl, {.threads = 1});
        for (int c = 0; c < 10; ++c)
            r.route_connection(c);
        std::vector<int> before(g.num_nodes());
        for (std::size_t n = 0; n < g.num_nodes(); ++n)
            before[n] = r.congestion().occupancy(static_cast<NodeId>(n));
        r.route_connection(15);
        r.rip_up(15);
        for (std::size_t n = 0; n < g.num_nodes(); ++n)
            CHECK(r.congestion().occupancy(static_cast<NodeId>(n)) == before[n]);
        CHECK(r.path(15).empty());
        r.rip_up(15);
        CHECK(r.counters_consistent());
        for (int c = 0; c < 10; ++c)
            r.rip_up(c);
        for (std::size_t n = 0; n < g.num_nodes(); ++n)
            CHECK(r.congestion().occupancy(static_cast<NodeId>(n)) == 0);
    }

    TEST_CASE("1000 random route and rip operations keep counters consistent")
    {
        const RoutingGraph g = grid_graph(6, 6, {{1, 1}});
        const Netlist nl = bench(g, 40, 4);
        Router r(g, nl, {.threads = 1});
        testsupport::Rng rng(1000);
        const int conns = static_cast<int>(nl.connections.size());
        for (int op = 0; op < 1000; ++op) {
            const int c = rng.uniform(0, conns - 1);
            if (rng.coin(0.6))
                r.route_connection(c);
            else
                r.rip_up(c);
            REQUIRE(r.counters_consistent());
        }
        CHECK(r.congestion().overused() == r.congestion().count_overused());
    }

    TEST_CASE("bottleneck negotiation reaches a legal assignment")
    {
        const RoutingGraph g = bottleneck_graph();
        const Netlist nl = make_netlist({Net{0, 0, {4}}, Net{1, 1, {5}}}, g);
        // exhaustive oracle: every pair of (wire for A, wire for B)
        int legal_assignments = 0;
        long long best_wl = std::numeric_limits<long long>::max();
        for (NodeId wa : {2, 3})
            for (NodeId wb : {2, 3})
                if (wa != wb) {
                    ++legal_assignments;
                    best_wl = std::min<long long>(best_wl, g.node(wa).length + g.node(wb).length);
                }
        REQUIRE(legal_assignments == 2);

        // first iteration alone leaves both on the cheap wire
        RouterOptions one;
        one.threads = 1;
        one.max_iterations = 1;
        const RoutingResult greedy = route_all(g, nl, one);
        CHECK_FALSE(greedy.success);
        CHECK(greedy.overflow_nodes == 1);

        const RoutingResult res = route_all(g, nl, {.threads = 1});
        CHECK(res.success);
        CHECK(res.iterations > 1);
        CHECK(validate(g, nl, res.paths).legal());
        CHECK(wirelength(g, nl, res.paths).total == best_wl);
    }

    TEST_CASE("unreachable sink raises UnroutableError")
    {
        std::vector<RrgNode> nodes{{0, 0, 0, 0, 0.5}, {1, 0, 0, 1, 1.0}, {2, 1, 0, 0, 0.5}, {3, 1, 0, 0, 0.5}};
        const RoutingGraph g(2, 1, std::move(nodes), {{0, 1}, {1, 2}});
        const Netlist nl = make_netlist({Net{0, 0, {3}}}, g);
        Router r(g, nl, {.threads = 1});
        CHECK_THROWS_AS(r.route_connection(0), UnroutableError);
    }

    TEST_CASE("20x20 with 500 local nets converges")
    {
        const RoutingGraph g = grid_graph(20, 20);
        const Netlist nl = bench(g, 500, 11, 2);
        const RoutingResult res = route_all(g, nl, {.threads = 4});
        CHECK(res.success);
        const ValidationResult v = validate(g, nl, res.paths);
        CHECK(v.legal());
        CHECK(res.stats.size() == static_cast<std::size_t>(res.iterations));
        CHECK(res.stats.front().routed_connections == static_cast<int>(nl.connections.size()));
        CHECK(res.stats.back().overused_nodes == 0);
    }

    TEST_CASE("legal at every thread count")
    {
        const RoutingGraph g = grid_graph(16, 16);
        const Netlist nl = bench(g, 300, 21);
        for (int threads : {1, 2, 4, 8, 16}) {
            CAPTURE(threads);
            const RoutingResult res = route_all(g, nl, {.threads = threads});
            CHECK(res.success);
            CHECK(validate(g, nl, res.paths).legal());
        }
    }

    TEST_CASE("legacy cost and the binary tree variant also converge")
    {
        const RoutingGraph g = grid_graph(14, 14);
        const Netlist nl = bench(g, 200, 8);
        RouterOptions legacy;
        legacy.threads = 2;
        legacy.cost.legacy_mode = true;
        CHECK(route_all(g, nl, legacy).success);
        RouterOptions binary;
        binary.threads = 2;
        binary.ternary = false;
        CHECK(route_all(g, nl, binary).success);
    }

    TEST_CASE("route_all is repeatable on one router")
    {
        const RoutingGraph g = grid_graph(10, 10);
        const Netlist nl = bench(g, 80, 6);
        Router r(g, nl, {.threads = 1});
        const RoutingResult a = r.route_all();
        const RoutingResult b = r.route_all();
        CHECK(a.success);
        CHECK(a.paths == b.paths);
        CHECK(a.iterations == b.iterations);
        CHECK(r.counters_consistent());
    }

    TEST_CASE("per-iteration statistics as JSON lines")
    {
        std::vector<IterationStats> stats{{1, 4, 10, Phase::PresentCentric, 1.5},
                                          {2, 0, 3, Phase::HistoricalCentric, 0.25}};
        std::ostringstream out;
        write_stats_jsonl(stats, out);
        CHECK(out.str() == "{\"iteration\":1,\"overused_nodes\":4,\"routed_connections\":10,"
                           "\"phase\":\"present-centric\",\"wall_ms\":1.5}\n"
                           "{\"iteration\":2,\"overused_nodes\":0,\"routed_connections\":3,"
                           "\"phase\":\"historical-centric\",\"wall_ms\":0.25}\n");
    }

    TEST_CASE("scheduling: crossing connections first, never two of one net at once")
    {
        const RoutingGraph g = grid_graph(16, 16);
        const Netlist nl = bench(g, 250, 13, 3);
        Router r(g, nl, {.threads = 8});
        RouteTrace trace;
        r.set_trace(&trace);
        const auto all = testsupport::iota_ids(nl.connections.size());
        const auto tree = r.build_iteration_tree(all);
        r.blocked_route(*tree);
        const auto events = trace.events();
        REQUIRE(events.size() == nl.connections.size());
        std::map<int, TraceEvent> by_conn;
        for (const TraceEvent &e : events)
            by_conn[e.connection] = e;
        check_mid_first(*tree, by_conn);
        CHECK(intra_net_overlaps(events) == 0);

        // the whole negotiation loop as well
        trace.clear();
        const RoutingResult res = r.route_all();
        CHECK(res.success);
        CHECK(intra_net_overlaps(trace.events()) == 0);
    }

    TEST_CASE("a net's connections always land in one tree node")
    {
        const RoutingGraph g = grid_graph(20, 20);
        const Netlist nl = bench(g, 300, 2, 4);
        Router r(g, nl, {.threads = 1});
        const auto tree = r.build_iteration_tree(testsupport::iota_ids(nl.connections.size()));
        std::map<int, const RpttNode *> owner;
        std::vector<const RpttNode *> stack{tree.get()};
        while (!stack.empty()) {
            const RpttNode *n = stack.back();
            stack.pop_back();
            if (n->is_leaf()) {
                for (int c : n->connections) {
                    const int net = nl.connections[static_cast<std::size_t>(c)].net_id;
                    auto [it, fresh] = owner.emplace(net, n);
                    CHECK(it->second == n);
                }
                continue;
            }
            for (const RpttNode *c : {n->left.get(), n->mid.get(), n->right.get()})
                if (c)
                    stack.push_back(c);
        }
    }
}

TEST_SUITE("task_pool")
{
    TEST_CASE("nested blocking waits on a single thread do not deadlock")
    {
        TaskPool pool(1);
        std::atomic<int> leaves{0};
        std::function<void(int)> spawn = [&](int depth) {
            if (depth == 0) {
                ++leaves;
                return;
            }
            TaskGroup inner(pool);
            inner.run([&, depth] { spawn(depth - 1); });
            inner.run([&, depth] { spawn(depth - 1); });
            inner.wait();
        };
        TaskGroup top(pool);
        top.run([&] { spawn(6); });
        top.wait();
        CHECK(leaves == 64);
    }

    TEST_CASE("nested waits on a multi-thread pool")
    {
        for (int threads : {2, 4, 8}) {
            TaskPool pool(threads);
            std::atomic<int> leaves{0};
            std::function<void(int)> spawn = [&](int depth) {
                if (depth == 0) {
                    ++leaves;
                    return;
                }
                TaskGroup inner(pool);
                for (int k = 0; k < 3; ++k)
                    inner.run([&, depth] { spawn(depth - 1); });
                inner.wait();
            };
            spawn(5);
            CHECK(leaves == 243);
        }
    }

    TEST_CASE("tasks may add tasks to their own group")
    {
        TaskPool pool(3);
        TaskGroup g(pool);
        std::atomic<int> count{0};
        std::function<void(int)> chain = [&](int left) {
            ++count;
            if (left > 0)
                g.run([&, left] { chain(left - 1); });
        };
        g.run([&] { chain(50); });
        g.wait();
        CHECK(count == 51);
    }

    TEST_CASE("the first exception reaches the waiter")
    {
        TaskPool pool(4);
        TaskGroup g(pool);
        std::atomic<int> ran{0};
        for (int i = 0; i < 20; ++i)
            g.run([&, i] {
                ++ran;
                if (i == 7)
                    throw std::runtime_error("task 7 failed");
            });
        CHECK_THROWS_WITH_AS(g.wait(), "task 7 failed", std::runtime_error);
        CHECK(ran == 20);
    }

    TEST_CASE("invalid concurrency")
    {
        CHECK_THROWS(TaskPool(0));
    }
}
