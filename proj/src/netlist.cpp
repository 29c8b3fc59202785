#include "parroute/netlist.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <random>
#include <string>

#include "parroute/error.hpp"
#include "text_io.hpp"

namespace parroute {

Box Box::expanded(int margin, int width, int height) const
{
    return {std::max(0, x_min - margin), std::max(0, y_min - margin), std::min(width - 1, x_max + margin),
            std::min(height - 1, y_max + margin)};
}

Box Box::united(const Box &o) const
{
    return {std::min(x_min, o.x_min), std::min(y_min, o.y_min), std::max(x_max, o.x_max), std::max(y_max, o.y_max)};
}

Box Box::spanning(int x0, int y0, int x1, int y1)
{
    return {std::min(x0, x1), std::min(y0, y1), std::max(x0, x1), std::max(y0, y1)};
}

std::vector<Connection> decompose(std::span<const Net> nets, const RoutingGraph &graph, int margin)
{
    if (margin < 0)
        throw InvalidParameter("bbox margin must be non-negative");
    std::vector<Connection> conns;
    for (const Net &net : nets) {
        if (net.sinks.empty())
            throw InvalidParameter("net " + std::to_string(net.id) + " has no sinks");
        if (!graph.contains(net.source))
            throw InvalidParameter("net " + std::to_string(net.id) + " source outside graph");
        const RrgNode &src = graph.node(net.source);
        const std::size_t first = conns.size();
        Box net_box{src.x, src.y, src.x, src.y};
        for (std::size_t k = 0; k < net.sinks.size(); ++k) {
            if (!graph.contains(net.sinks[k]))
                throw InvalidParameter("net " + std::to_string(net.id) + " sink outside graph");
            const RrgNode &snk = graph.node(net.sinks[k]);
            Connection c;
            c.id = static_cast<int>(conns.size());
            c.net_id = net.id;
            c.sink_index = static_cast<int>(k);
            c.source = net.source;
            c.sink = net.sinks[k];
            c.bbox = Box::spanning(src.x, src.y, snk.x, snk.y).expanded(margin, graph.width(), graph.height());
            net_box = net_box.united(c.bbox);
            conns.push_back(c);
        }
        for (std::size_t i = first; i < conns.size(); ++i)
            conns[i].net_bbox = net_box;
    }
    return conns;
}

Netlist make_netlist(std::vector<Net> nets, const RoutingGraph &graph, int margin)
{
    for (std::size_t i = 0; i < nets.size(); ++i)
        if (nets[i].id != static_cast<int>(i))
            throw InvalidParameter("net ids must equal their position");
    Netlist nl;
    nl.connections = decompose(nets, graph, margin);
    nl.nets = std::move(nets);
    nl.margin = margin;
    return nl;
}

namespace {

struct PinPools {
    int width = 0;
    std::vector<std::vector<NodeId>> sources; // per tile, free output pins
    std::vector<std::vector<NodeId>> sinks;   // per tile, free input pins
    // Distinct nets a tile can still take as source / as sink. One net per
    // wire leaving (entering) the tile, so pin-local demand never exceeds
    // what the fabric can deliver.
    std::vector<int> source_budget;
    std::vector<int> sink_budget;

    std::size_t tile(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

PinPools collect_pins(const RoutingGraph &g)
{
    std::vector<int> indegree(g.num_nodes(), 0);
    for (const RrgNode &n : g.nodes())
        for (NodeId v : g.successors(n.id))
            ++indegree[static_cast<std::size_t>(v)];
    PinPools pools;
    pools.width = g.width();
    const auto tiles = static_cast<std::size_t>(g.width()) * g.height();
    pools.sources.resize(tiles);
    pools.sinks.resize(tiles);
    pools.source_budget.assign(tiles, 0);
    pools.sink_budget.assign(tiles, 0);
    for (const RrgNode &n : g.nodes()) {
        if (!n.is_pin())
            continue;
        const std::size_t t = pools.tile(n.x, n.y);
        const int in = indegree[static_cast<std::size_t>(n.id)];
        const int out = static_cast<int>(g.successors(n.id).size());
        if (out > 0) {
            pools.sources[t].push_back(n.id);
            pools.source_budget[t] = std::max(pools.source_budget[t], out);
        } else if (in > 0) {
            pools.sinks[t].push_back(n.id);
            pools.sink_budget[t] = std::max(pools.sink_budget[t], in);
        }
    }
    // pop_back hands out the lowest id first
    for (auto &v : pools.sources)
        std::reverse(v.begin(), v.end());
    for (auto &v : pools.sinks)
        std::reverse(v.begin(), v.end());
    return pools;
}

/// Tiles a net may use: the whole grid, or one quadrant kept `margin` tiles
/// clear of the mid lines.
Box region_for(const RoutingGraph &g, const BenchmarkParams &p, int quadrant)
{
    if (!p.quadrants)
        return {0, 0, g.width() - 1, g.height() - 1};
    const int mx = g.width() / 2;
    const int my = g.height() / 2;
    Box r;
    r.x_min = (quadrant & 1) ? mx + p.margin : 0;
    r.x_max = (quadrant & 1) ? g.width() - 1 : mx - 1 - p.margin;
    r.y_min = (quadrant & 2) ? my + p.margin : 0;
    r.y_max = (quadrant & 2) ? g.height() - 1 : my - 1 - p.margin;
    if (r.x_min > r.x_max || r.y_min > r.y_max)
        throw GenerationError("grid too small for quadrant placement with this margin");
    return r;
}

} // namespace

Netlist generate_benchmark(const RoutingGraph &g, const BenchmarkParams &p)
{
    if (p.num_nets < 0)
        throw InvalidParameter("num_nets must be non-negative");
    if (p.fanout_mean < 1.0)
        throw InvalidParameter("fanout_mean must be at least 1");
    if (p.locality < 0)
        throw InvalidParameter("locality must be non-negative");

    PinPools pools = collect_pins(g);
    std::mt19937_64 rng(p.seed);
    std::geometric_distribution<int> extra_fanout(1.0 / p.fanout_mean);
    constexpr int kTries = 64;

    std::vector<Net> nets;
    nets.reserve(static_cast<std::size_t>(p.num_nets));
    for (int id = 0; id < p.num_nets; ++id) {
        const Box region = region_for(g, p, id % 4);
        std::uniform_int_distribution<int> rx(region.x_min, region.x_max);
        std::uniform_int_distribution<int> ry(region.y_min, region.y_max);

        auto source_free = [&](int x, int y) {
            const std::size_t t = pools.tile(x, y);
            return !pools.sources[t].empty() && pools.source_budget[t] > 0;
        };
        std::optional<std::pair<int, int>> src_tile;
        for (int t = 0; t < kTries && !src_tile; ++t) {
            int x = rx(rng), y = ry(rng);
            if (source_free(x, y))
                src_tile = {x, y};
        }
        for (int y = region.y_min; y <= region.y_max && !src_tile; ++y)
            for (int x = region.x_min; x <= region.x_max && !src_tile; ++x)
                if (source_free(x, y))
                    src_tile = {x, y};
        if (!src_tile)
            throw GenerationError("no free source pin for net " + std::to_string(id));
        auto [sx, sy] = *src_tile;
        Net net;
        net.id = id;
        net.source = pools.sources[pools.tile(sx, sy)].back();
        pools.sources[pools.tile(sx, sy)].pop_back();
        --pools.source_budget[pools.tile(sx, sy)];
        std::vector<std::size_t> sink_tiles;
        auto sink_free = [&](int x, int y) {
            const std::size_t t = pools.tile(x, y);
            if (pools.sinks[t].empty())
                return false;
            return pools.sink_budget[t] > 0 ||
                   std::find(sink_tiles.begin(), sink_tiles.end(), t) != sink_tiles.end();
        };

        const int fanout = (p.fanout_mean > 1.0 ? 1 + extra_fanout(rng) : 1);
        std::uniform_int_distribution<int> offset(-p.locality, p.locality);
        for (int k = 0; k < fanout; ++k) {
            std::optional<std::size_t> sink_tile;
            for (int t = 0; t < kTries && !sink_tile; ++t) {
                const int x = sx + offset(rng), y = sy + offset(rng);
                if (!region.contains(x, y) || (x == sx && y == sy))
                    continue;
                if (sink_free(x, y))
                    sink_tile = pools.tile(x, y);
            }
            // Fall back to the nearest ring with a free input pin.
            const int max_ring = std::max(g.width(), g.height());
            for (int ring = 1; ring <= max_ring && !sink_tile; ++ring)
                for (int y = sy - ring; y <= sy + ring && !sink_tile; ++y)
                    for (int x = sx - ring; x <= sx + ring && !sink_tile; ++x) {
                        if (std::max(std::abs(x - sx), std::abs(y - sy)) != ring || !region.contains(x, y))
                            continue;
                        if (sink_free(x, y))
                            sink_tile = pools.tile(x, y);
                    }
            if (!sink_tile)
                throw GenerationError("no free sink pin for net " + std::to_string(id));
            net.sinks.push_back(pools.sinks[*sink_tile].back());
            pools.sinks[*sink_tile].pop_back();
            if (std::find(sink_tiles.begin(), sink_tiles.end(), *sink_tile) == sink_tiles.end()) {
                sink_tiles.push_back(*sink_tile);
                --pools.sink_budget[*sink_tile];
            }
        }
        nets.push_back(std::move(net));
    }
    return make_netlist(std::move(nets), g, p.margin);
}

void write_netlist(const Netlist &nl, std::ostream &out)
{
    for (const Net &net : nl.nets) {
        out << "NET " << net.id << ' ' << net.source;
        for (NodeId s : net.sinks)
            out << ' ' << s;
        out << '\n';
    }
}

Netlist read_netlist(std::istream &in, const RoutingGraph &graph, int margin)
{
    detail::LineReader reader(in);
    std::vector<Net> nets;
    while (reader.next()) {
        if (reader.token(0) != "NET")
            throw ParseError(reader.line(), "unknown record '" + std::string(reader.token(0)) + "'");
        if (reader.size() < 4)
            throw ParseError(reader.line(), "expected 'NET <id> <src> <sink>+'");
        Net net;
        const long long id = reader.int_at(1);
        if (id != static_cast<long long>(nets.size()))
            throw ParseError(reader.line(), "net id " + std::to_string(id) + " out of sequence, expected " +
                                                std::to_string(nets.size()));
        net.id = static_cast<int>(id);
        for (std::size_t i = 2; i < reader.size(); ++i) {
            const long long node = reader.int_at(i);
            if (node < 0 || node >= static_cast<long long>(graph.num_nodes()))
                throw ParseError(reader.line(), "unknown node " + std::to_string(node));
            if (!graph.node(static_cast<NodeId>(node)).is_pin())
                throw ParseError(reader.line(), "node " + std::to_string(node) + " is not a pin");
            if (i == 2)
                net.source = static_cast<NodeId>(node);
            else
                net.sinks.push_back(static_cast<NodeId>(node));
        }
        nets.push_back(std::move(net));
    }
    return make_netlist(std::move(nets), graph, margin);
}

void save_netlist(const Netlist &netlist, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_netlist(netlist, out);
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

Netlist load_netlist(const std::filesystem::path &path, const RoutingGraph &graph, int margin)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    return read_netlist(in, graph, margin);
}

} // namespace parroute
