#include "parroute/rrg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "parroute/error.hpp"
#include "text_io.hpp"

namespace parroute {

double default_base_cost(int length)
{
    if (length == 0)
        return 0.5;
    return 1.0 + 0.25 * (length - 1);
}

bool is_valid_wire_length(int length)
{
    return length == 1 || length == 2 || length == 4 || length == 12;
}

RoutingGraph::RoutingGraph(int width, int height, std::vector<RrgNode> nodes,
                           std::vector<std::pair<NodeId, NodeId>> edges)
    : width_(width), height_(height), nodes_(std::move(nodes))
{
    if (width < 1 || height < 1)
        throw InvalidParameter("grid dimensions must be positive");
    const auto n = static_cast<NodeId>(nodes_.size());
    for (NodeId i = 0; i < n; ++i) {
        const RrgNode &nd = nodes_[static_cast<std::size_t>(i)];
        if (nd.id != i)
            throw InvalidParameter("node ids must be dense and ordered");
        if (nd.length != 0 && !is_valid_wire_length(nd.length))
            throw InvalidParameter("invalid wire length " + std::to_string(nd.length));
        if (nd.base_cost < 0.0)
            throw InvalidParameter("negative base cost");
    }
    for (auto [u, v] : edges) {
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw InvalidParameter("edge endpoint out of range");
        if (u == v)
            throw InvalidParameter("self loop on node " + std::to_string(u));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    offsets_.assign(nodes_.size() + 1, 0);
    for (auto [u, v] : edges)
        ++offsets_[static_cast<std::size_t>(u) + 1];
    for (std::size_t i = 1; i < offsets_.size(); ++i)
        offsets_[i] += offsets_[i - 1];
    targets_.reserve(edges.size());
    for (auto [u, v] : edges)
        targets_.push_back(v);

    double best = std::numeric_limits<double>::infinity();
    for (const RrgNode &nd : nodes_)
        if (nd.length > 0)
            best = std::min(best, nd.base_cost / nd.length);
    min_unit_cost_ = std::isinf(best) ? 0.0 : best;
}

std::span<const NodeId> RoutingGraph::successors(NodeId id) const
{
    const auto i = static_cast<std::size_t>(id);
    return {targets_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

bool RoutingGraph::has_edge(NodeId from, NodeId to) const
{
    if (!contains(from) || !contains(to))
        return false;
    auto succ = successors(from);
    return std::binary_search(succ.begin(), succ.end(), to);
}

namespace {

enum Dir { East, West, North, South };

constexpr Dir opposite(Dir d)
{
    switch (d) {
    case East: return West;
    case West: return East;
    case North: return South;
    case South: return North;
    }
    return East;
}

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

bool keep_switch(std::uint64_t seed, NodeId from, NodeId to, double density)
{
    if (density >= 1.0)
        return true;
    std::uint64_t h = splitmix(seed ^ splitmix((static_cast<std::uint64_t>(from) << 32) |
                                               static_cast<std::uint32_t>(to)));
    return static_cast<double>(h >> 11) * 0x1.0p-53 < density;
}

struct TileLayout {
    int pins = 0;
    std::vector<std::pair<int, int>> classes; // (length, tracks)
    int wires_per_dir = 0;

    std::size_t per_tile() const { return static_cast<std::size_t>(2 * pins + 4 * wires_per_dir); }
};

} // namespace

std::size_t nodes_per_tile(const GridParams &p)
{
    std::size_t wires = 0;
    for (auto [len, cnt] : p.wires_per_dir_per_len)
        wires += static_cast<std::size_t>(cnt);
    return static_cast<std::size_t>(2 * p.pins_per_tile) + 4 * wires;
}

RoutingGraph generate_grid(const GridParams &p)
{
    if (p.width < 1 || p.height < 1)
        throw InvalidParameter("grid dimensions must be at least 1x1");
    if (p.pins_per_tile < 1)
        throw InvalidParameter("pins_per_tile must be at least 1");
    if (!(p.switch_density > 0.0 && p.switch_density <= 1.0))
        throw InvalidParameter("switch_density must lie in (0, 1]");
    TileLayout layout;
    layout.pins = p.pins_per_tile;
    for (auto [len, cnt] : p.wires_per_dir_per_len) {
        if (!is_valid_wire_length(len))
            throw InvalidParameter("wire length " + std::to_string(len) + " not in {1,2,4,12}");
        if (cnt < 0)
            throw InvalidParameter("negative track count");
        if (cnt > 0) {
            layout.classes.emplace_back(len, cnt);
            layout.wires_per_dir += cnt;
        }
    }
    if (layout.wires_per_dir == 0)
        throw InvalidParameter("at least one wire class needs a positive track count");

    const std::size_t per_tile = layout.per_tile();
    const std::size_t tiles = static_cast<std::size_t>(p.width) * static_cast<std::size_t>(p.height);
    auto tile_base = [&](int x, int y) {
        return static_cast<NodeId>((static_cast<std::size_t>(y) * p.width + x) * per_tile);
    };
    auto out_pin = [&](int x, int y, int k) { return tile_base(x, y) + k; };
    auto in_pin = [&](int x, int y, int k) { return tile_base(x, y) + layout.pins + k; };
    // class index -> offset of its first track within one direction block
    std::vector<int> class_offset;
    for (int off = 0; auto [len, cnt] : layout.classes) {
        class_offset.push_back(off);
        off += cnt;
    }
    auto wire = [&](int x, int y, Dir d, std::size_t cls, int track) {
        return tile_base(x, y) + 2 * layout.pins + static_cast<int>(d) * layout.wires_per_dir +
               class_offset[cls] + track;
    };

    std::vector<RrgNode> nodes;
    nodes.reserve(tiles * per_tile);
    for (int y = 0; y < p.height; ++y) {
        for (int x = 0; x < p.width; ++x) {
            for (int k = 0; k < 2 * layout.pins; ++k)
                nodes.push_back({static_cast<NodeId>(nodes.size()), x, y, 0, default_base_cost(0)});
            for (int d = 0; d < 4; ++d)
                for (auto [len, cnt] : layout.classes)
                    for (int t = 0; t < cnt; ++t)
                        nodes.push_back({static_cast<NodeId>(nodes.size()), x, y, len, default_base_cost(len)});
        }
    }

    std::vector<std::pair<NodeId, NodeId>> edges;
    for (int y = 0; y < p.height; ++y) {
        for (int x = 0; x < p.width; ++x) {
            for (int k = 0; k < layout.pins; ++k)
                for (int d = 0; d < 4; ++d)
                    for (std::size_t c = 0; c < layout.classes.size(); ++c)
                        for (int t = 0; t < layout.classes[c].second; ++t)
                            edges.emplace_back(out_pin(x, y, k), wire(x, y, Dir(d), c, t));

            for (int d = 0; d < 4; ++d) {
                for (std::size_t c = 0; c < layout.classes.size(); ++c) {
                    const int len = layout.classes[c].first;
                    int ex = x, ey = y;
                    switch (Dir(d)) {
                    case East: ex += len; break;
                    case West: ex -= len; break;
                    case North: ey += len; break;
                    case South: ey -= len; break;
                    }
                    if (ex < 0 || ey < 0 || ex >= p.width || ey >= p.height)
                        continue;
                    for (int t = 0; t < layout.classes[c].second; ++t) {
                        const NodeId from = wire(x, y, Dir(d), c, t);
                        for (int k = 0; k < layout.pins; ++k)
                            edges.emplace_back(from, in_pin(ex, ey, k));
                        for (int d2 = 0; d2 < 4; ++d2) {
                            if (Dir(d2) == opposite(Dir(d)))
                                continue;
                            for (std::size_t c2 = 0; c2 < layout.classes.size(); ++c2) {
                                const int cnt2 = layout.classes[c2].second;
                                for (int t2 : {t % cnt2, (t + 1) % cnt2}) {
                                    const NodeId to = wire(ex, ey, Dir(d2), c2, t2);
                                    if (keep_switch(p.seed, from, to, p.switch_density))
                                        edges.emplace_back(from, to);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    return RoutingGraph(p.width, p.height, std::move(nodes), std::move(edges));
}

void write_rrg(const RoutingGraph &g, std::ostream &out)
{
    out << "RRG v1 " << g.width() << ' ' << g.height() << ' ' << g.num_nodes() << ' ' << g.num_edges() << '\n';
    for (const RrgNode &n : g.nodes())
        out << "N " << n.id << ' ' << n.x << ' ' << n.y << ' ' << n.length << ' ' << detail::format_double(n.base_cost)
            << '\n';
    for (const RrgNode &n : g.nodes())
        for (NodeId v : g.successors(n.id))
            out << "E " << n.id << ' ' << v << '\n';
}

RoutingGraph read_rrg(std::istream &in)
{
    detail::LineReader reader(in);
    if (!reader.next())
        throw ParseError(1, "missing RRG header");
    if (reader.size() != 6 || reader.token(0) != "RRG" || reader.token(1) != "v1")
        throw ParseError(reader.line(), "malformed header, expected 'RRG v1 <width> <height> <nodes> <edges>'");
    const int width = reader.small_int_at(2);
    const int height = reader.small_int_at(3);
    const long long node_count = reader.int_at(4);
    const long long edge_count = reader.int_at(5);
    if (width < 1 || height < 1 || node_count < 0 || edge_count < 0)
        throw ParseError(reader.line(), "malformed header, non-positive dimensions or negative counts");

    std::vector<RrgNode> nodes(static_cast<std::size_t>(node_count));
    std::vector<char> seen(nodes.size(), 0);
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(static_cast<std::size_t>(edge_count));
    long long nodes_read = 0;
    while (reader.next()) {
        const std::string_view kind = reader.token(0);
        if (kind == "N") {
            if (!edges.empty())
                throw ParseError(reader.line(), "node record after edge records");
            if (reader.size() != 6)
                throw ParseError(reader.line(), "expected 'N <id> <x> <y> <len> <base_cost>'");
            const int id = reader.small_int_at(1);
            if (id < 0 || id >= node_count)
                throw ParseError(reader.line(), "node id " + std::to_string(id) + " outside header range");
            if (seen[static_cast<std::size_t>(id)])
                throw ParseError(reader.line(), "duplicate node id " + std::to_string(id));
            seen[static_cast<std::size_t>(id)] = 1;
            RrgNode nd{id, reader.small_int_at(2), reader.small_int_at(3), reader.small_int_at(4), reader.double_at(5)};
            if (nd.x < 0 || nd.y < 0 || nd.x >= width || nd.y >= height)
                throw ParseError(reader.line(), "node tile outside grid");
            if (nd.length != 0 && !is_valid_wire_length(nd.length))
                throw ParseError(reader.line(), "invalid wire length " + std::to_string(nd.length));
            if (nd.base_cost < 0.0)
                throw ParseError(reader.line(), "negative base cost");
            nodes[static_cast<std::size_t>(id)] = nd;
            ++nodes_read;
        } else if (kind == "E") {
            if (reader.size() != 3)
                throw ParseError(reader.line(), "expected 'E <src> <dst>'");
            const int u = reader.small_int_at(1);
            const int v = reader.small_int_at(2);
            for (int id : {u, v})
                if (id < 0 || id >= node_count || !seen[static_cast<std::size_t>(id)])
                    throw ParseError(reader.line(), "unknown node " + std::to_string(id));
            if (u == v)
                throw ParseError(reader.line(), "self loop on node " + std::to_string(u));
            edges.emplace_back(u, v);
        } else {
            throw ParseError(reader.line(), "unknown record '" + std::string(kind) + "'");
        }
    }
    if (nodes_read != node_count)
        throw ParseError(reader.line(), "header declares " + std::to_string(node_count) + " nodes, found " +
                                            std::to_string(nodes_read));
    if (static_cast<long long>(edges.size()) != edge_count)
        throw ParseError(reader.line(), "header declares " + std::to_string(edge_count) + " edges, found " +
                                            std::to_string(edges.size()));
    return RoutingGraph(width, height, std::move(nodes), std::move(edges));
}

void save_rrg(const RoutingGraph &graph, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_rrg(graph, out);
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

RoutingGraph load_rrg(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    return read_rrg(in);
}

} // namespace parroute
