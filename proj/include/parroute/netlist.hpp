#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "parroute/rrg.hpp"

namespace parroute {

enum class Axis : std::uint8_t { X, Y };

/// Inclusive axis-aligned rectangle of tiles.
struct Box {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;

    int lo(Axis a) const { return a == Axis::X ? x_min : y_min; }
    int hi(Axis a) const { return a == Axis::X ? x_max : y_max; }
    long long area() const { return static_cast<long long>(x_max - x_min + 1) * (y_max - y_min + 1); }
    bool contains(int x, int y) const { return x >= x_min && x <= x_max && y >= y_min && y <= y_max; }

    /// Grows by `margin` on every side, clamped to a width x height grid.
    Box expanded(int margin, int width, int height) const;
    Box united(const Box &other) const;

    static Box spanning(int x0, int y0, int x1, int y1);

    friend bool operator==(const Box &, const Box &) = default;
};

struct Net {
    int id = 0;
    NodeId source = 0;
    std::vector<NodeId> sinks;

    friend bool operator==(const Net &, const Net &) = default;
};

/// Two-pin piece of a net. `bbox` bounds the A* search for this connection;
/// `net_bbox` is the union over the whole net and drives partitioning, so all
/// connections of a net always fall on the same side of every cutline.
struct Connection {
    int id = 0;
    int net_id = 0;
    int sink_index = 0;
    NodeId source = 0;
    NodeId sink = 0;
    Box bbox;
    Box net_bbox;

    friend bool operator==(const Connection &, const Connection &) = default;
};

struct Netlist {
    std::vector<Net> nets;
    std::vector<Connection> connections;
    int margin = 3;

    friend bool operator==(const Netlist &, const Netlist &) = default;
};

inline constexpr int kDefaultBboxMargin = 3;

/// One connection per (source, sink) pair, in net order then sink order.
/// Throws InvalidParameter for a net without sinks or a pin outside the graph.
std::vector<Connection> decompose(std::span<const Net> nets, const RoutingGraph &graph,
                                  int margin = kDefaultBboxMargin);

/// Net ids must equal their position.
Netlist make_netlist(std::vector<Net> nets, const RoutingGraph &graph, int margin = kDefaultBboxMargin);

struct BenchmarkParams {
    int num_nets = 100;
    double fanout_mean = 4.0;
    /// Sinks are drawn within this many tiles (per axis) of the source.
    int locality = 2;
    std::uint64_t seed = 1;
    int margin = kDefaultBboxMargin;
    /// Confine every net to one grid quadrant, away from the mid lines.
    bool quadrants = false;
};

/// Places nets on distinct pins: sources on pins with fanout, sinks on pins
/// without. Fanout is 1 + Geometric so that its mean is `fanout_mean`.
/// Throws GenerationError when free pins run out.
Netlist generate_benchmark(const RoutingGraph &graph, const BenchmarkParams &params);

void write_netlist(const Netlist &netlist, std::ostream &out);
Netlist read_netlist(std::istream &in, const RoutingGraph &graph, int margin = kDefaultBboxMargin);
void save_netlist(const Netlist &netlist, const std::filesystem::path &path);
Netlist load_netlist(const std::filesystem::path &path, const RoutingGraph &graph,
                     int margin = kDefaultBboxMargin);

} // namespace parroute
