#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "parroute/netlist.hpp"

namespace parroute {

/// Something to partition: a connection id and the box that decides which
/// side of a cutline it lies on.
struct TreeItem {
    int id = 0;
    Box region;

    friend bool operator==(const TreeItem &, const TreeItem &) = default;
};

struct AxisCut {
    static constexpr long kNoCut = std::numeric_limits<long>::max();

    bool success = false;
    Axis axis = Axis::X;
    int cutline = 0;
    /// |size_after - size_before| at the cutline; kNoCut when the cut failed.
    long diff = kNoCut;
    std::vector<TreeItem> left;
    std::vector<TreeItem> mid;
    std::vector<TreeItem> right;
};

/// Balance-driven cutline along one axis. size_before[i] counts items ending
/// at or before i and size_after[i] items starting after i, both built with
/// prefix sums; the first i minimising their difference wins. Fails when
/// either side is empty.
AxisCut balance_cut_axis(std::span<const TreeItem> items, Axis axis);

/// Tries both axes and keeps X only when its diff is strictly smaller.
AxisCut balance_cut(std::span<const TreeItem> items);

/// Ternary partitioning tree node. `connections` of an internal node is the
/// union of its children's.
struct RpttNode {
    std::vector<int> connections;
    std::optional<Axis> cut_axis;
    int cut_coord = 0;
    std::unique_ptr<RpttNode> left;
    std::unique_ptr<RpttNode> mid;
    std::unique_ptr<RpttNode> right;

    bool is_leaf() const { return !cut_axis.has_value(); }
};

struct TreeOptions {
    /// false builds the binary-tree variant: crossing items stay in one leaf
    /// instead of being partitioned recursively.
    bool ternary = true;
    /// Routing order inside a leaf; ascending id when empty.
    std::function<bool(int, int)> leaf_order;
};

/// Recursively partitions until balance_cut fails. The mid child is only
/// created when some items cross the cutline.
std::unique_ptr<RpttNode> build_tree(std::span<const TreeItem> items, const TreeOptions &options = {});

int tree_depth(const RpttNode &node);
std::size_t count_leaves(const RpttNode &node);

/// Indented text form, one node per line.
void dump_tree(const RpttNode &node, std::ostream &out);

} // namespace parroute
