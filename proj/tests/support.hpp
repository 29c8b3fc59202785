// Independent oracles and small generators shared by the test suites. Nothing
// here calls into the code under test beyond reading graph topology.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "parroute/netlist.hpp"
#include "parroute/rptt.hpp"
#include "parroute/rrg.hpp"

namespace testsupport {

using parroute::Axis;
using parroute::Box;
using parroute::NodeId;
using parroute::RoutingGraph;
using parroute::TreeItem;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Rng {
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(engine); }
    std::mt19937_64 engine;
};

inline std::vector<int> in_degrees(const RoutingGraph &g)
{
    std::vector<int> deg(g.num_nodes(), 0);
    for (std::size_t u = 0; u < g.num_nodes(); ++u)
        for (NodeId v : g.successors(static_cast<NodeId>(u)))
            ++deg[static_cast<std::size_t>(v)];
    return deg;
}

/// Output pins drive something; input pins are only driven.
inline std::vector<NodeId> source_pins(const RoutingGraph &g)
{
    std::vector<NodeId> out;
    for (const auto &n : g.nodes())
        if (n.length == 0 && !g.successors(n.id).empty())
            out.push_back(n.id);
    return out;
}

inline std::vector<NodeId> sink_pins(const RoutingGraph &g)
{
    const auto deg = in_degrees(g);
    std::vector<NodeId> out;
    for (const auto &n : g.nodes())
        if (n.length == 0 && g.successors(n.id).empty() && deg[static_cast<std::size_t>(n.id)] > 0)
            out.push_back(n.id);
    return out;
}

/// Plain BFS over all edges.
inline std::vector<bool> reachable_from(const RoutingGraph &g, NodeId start)
{
    std::vector<bool> seen(g.num_nodes(), false);
    std::queue<NodeId> q;
    seen[static_cast<std::size_t>(start)] = true;
    q.push(start);
    while (!q.empty()) {
        const NodeId u = q.front();
        q.pop();
        for (NodeId v : g.successors(u))
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = true;
                q.push(v);
            }
    }
    return seen;
}

/// Textbook Dijkstra where entering node v costs base_cost(v). Only nodes
/// whose anchor tile lies in `region` are entered, and pins other than the
/// target are never passed through. Returns kInf when unreachable.
inline double dijkstra_cost(const RoutingGraph &g, NodeId from, NodeId to, const Box &region)
{
    std::vector<double> dist(g.num_nodes(), kInf);
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[static_cast<std::size_t>(from)] = 0.0;
    pq.push({0.0, from});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[static_cast<std::size_t>(u)])
            continue;
        if (u == to)
            return d;
        for (NodeId v : g.successors(u)) {
            const auto &nv = g.node(v);
            if (!region.contains(nv.x, nv.y))
                continue;
            if (nv.length == 0 && v != to)
                continue;
            const double nd = d + nv.base_cost;
            if (nd < dist[static_cast<std::size_t>(v)]) {
                dist[static_cast<std::size_t>(v)] = nd;
                pq.push({nd, v});
            }
        }
    }
    return kInf;
}

/// Cost of entering every node after the first, at h = p = 1 and no sharing.
inline double path_base_cost(const RoutingGraph &g, const std::vector<NodeId> &path)
{
    double c = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i)
        c += g.node(path[i]).base_cost;
    return c;
}

struct BruteCut {
    bool success = false;
    long diff = std::numeric_limits<long>::max();
    int cutline = 0;
    std::size_t left = 0, mid = 0, right = 0;
};

/// Tries every candidate cutline from 0 to `extent - 1`, counting sides
/// directly. The first cutline with the smallest diff wins; the cut fails
/// when it leaves either side empty.
inline BruteCut brute_force_cut(const std::vector<TreeItem> &items, Axis axis, int extent)
{
    BruteCut best;
    long best_diff = std::numeric_limits<long>::max();
    for (int i = 0; i < extent; ++i) {
        long before = 0, after = 0;
        for (const auto &it : items) {
            if (it.region.hi(axis) <= i)
                ++before;
            if (it.region.lo(axis) > i)
                ++after;
        }
        const long d = before > after ? before - after : after - before;
        if (d < best_diff) {
            best_diff = d;
            best.cutline = i;
        }
    }
    for (const auto &it : items) {
        if (it.region.hi(axis) <= best.cutline)
            ++best.left;
        else if (it.region.lo(axis) > best.cutline)
            ++best.right;
        else
            ++best.mid;
    }
    best.success = best.left > 0 && best.right > 0;
    if (best.success)
        best.diff = best_diff;
    return best;
}

/// Both axes; X only when strictly better.
inline BruteCut brute_force_balance(const std::vector<TreeItem> &items, int width, int height, Axis *chosen = nullptr)
{
    BruteCut x = brute_force_cut(items, Axis::X, width);
    BruteCut y = brute_force_cut(items, Axis::Y, height);
    const bool pick_x = x.diff < y.diff;
    if (chosen)
        *chosen = pick_x ? Axis::X : Axis::Y;
    return pick_x ? x : y;
}

inline std::vector<TreeItem> random_items(Rng &rng, int count, int width, int height, int max_span)
{
    std::vector<TreeItem> items;
    for (int i = 0; i < count; ++i) {
        const int x0 = rng.uniform(0, width - 1);
        const int y0 = rng.uniform(0, height - 1);
        const int x1 = std::min(width - 1, x0 + rng.uniform(0, max_span));
        const int y1 = std::min(height - 1, y0 + rng.uniform(0, max_span));
        items.push_back({i, Box{x0, y0, x1, y1}});
    }
    return items;
}

inline std::vector<int> iota_ids(std::size_t n)
{
    std::vector<int> ids(n);
    for (std::size_t i = 0; i < n; ++i)
        ids[i] = static_cast<int>(i);
    return ids;
}

} // namespace testsupport
