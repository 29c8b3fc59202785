#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

namespace parroute {

using NodeId = std::int32_t;

/// One routing resource: a wire spanning `length` INT tiles, or an intra-tile
/// pin when `length == 0`. (x, y) is the tile the wire is driven from.
struct RrgNode {
    NodeId id = 0;
    int x = 0;
    int y = 0;
    int length = 0;
    double base_cost = 0.0;

    static constexpr int capacity = 1;

    bool is_pin() const { return length == 0; }
    friend bool operator==(const RrgNode &, const RrgNode &) = default;
};

/// b(n): 0.5 for pins, 1 + 0.25 * (length - 1) for wires.
double default_base_cost(int length);

bool is_valid_wire_length(int length);

/// Immutable routing resource graph. Nodes are wires and pins, edges are PIPs.
/// Adjacency is stored in CSR form with each successor list sorted.
class RoutingGraph {
public:
    RoutingGraph() = default;

    /// Validates ids (dense, 0..n-1 in order), edge endpoints and self loops.
    RoutingGraph(int width, int height, std::vector<RrgNode> nodes,
                 std::vector<std::pair<NodeId, NodeId>> edges);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t num_nodes() const { return nodes_.size(); }
    std::size_t num_edges() const { return targets_.size(); }

    const RrgNode &node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
    std::span<const RrgNode> nodes() const { return nodes_; }
    std::span<const NodeId> successors(NodeId id) const;
    bool has_edge(NodeId from, NodeId to) const;
    bool contains(NodeId id) const { return id >= 0 && static_cast<std::size_t>(id) < nodes_.size(); }

    /// Cheapest base cost per tile over all wires; 0 when the graph has no wires.
    double min_unit_cost() const { return min_unit_cost_; }

    friend bool operator==(const RoutingGraph &, const RoutingGraph &) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<RrgNode> nodes_;
    std::vector<std::size_t> offsets_{0};
    std::vector<NodeId> targets_;
    double min_unit_cost_ = 0.0;
};

struct GridParams {
    int width = 8;
    int height = 8;
    /// wire length -> tracks per direction per tile
    std::map<int, int> wires_per_dir_per_len{{1, 4}};
    double switch_density = 1.0;
    /// Output pins per tile; the same number of input pins is created.
    int pins_per_tile = 8;
    std::uint64_t seed = 1;
};

/// Island-style grid. Per tile, in id order: output pins, input pins, then
/// wires for each direction (E, W, N, S), each length class ascending, each
/// track. Output pins drive every wire of their tile; a wire drives every
/// input pin of the tile it ends in and, subject to `switch_density`, the
/// wires starting there that do not reverse its direction.
RoutingGraph generate_grid(const GridParams &params);

/// Number of nodes generate_grid emits for each tile.
std::size_t nodes_per_tile(const GridParams &params);

void write_rrg(const RoutingGraph &graph, std::ostream &out);
RoutingGraph read_rrg(std::istream &in);
void save_rrg(const RoutingGraph &graph, const std::filesystem::path &path);
RoutingGraph load_rrg(const std::filesystem::path &path);

} // namespace parroute
