#include "parroute/rptt.hpp"

#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <string>

namespace parroute {

AxisCut balance_cut_axis(std::span<const TreeItem> items, Axis axis)
{
    AxisCut cut;
    cut.axis = axis;
    if (items.empty())
        return cut;

    int lo = items.front().region.lo(axis);
    int hi = items.front().region.hi(axis);
    for (const TreeItem &it : items) {
        lo = std::min(lo, it.region.lo(axis));
        hi = std::max(hi, it.region.hi(axis));
    }
    const auto span = static_cast<std::size_t>(hi - lo + 1);
    std::vector<long> size_before(span, 0);
    std::vector<long> starts_upto(span, 0);
    for (const TreeItem &it : items) {
        ++size_before[static_cast<std::size_t>(it.region.hi(axis) - lo)];
        ++starts_upto[static_cast<std::size_t>(it.region.lo(axis) - lo)];
    }
    for (std::size_t i = 1; i < span; ++i) {
        size_before[i] += size_before[i - 1];
        starts_upto[i] += starts_upto[i - 1];
    }
    const auto total = static_cast<long>(items.size());

    long best = AxisCut::kNoCut;
    int cutline = lo;
    for (std::size_t i = 0; i < span; ++i) {
        const long size_after = total - starts_upto[i];
        const long d = std::abs(size_after - size_before[i]);
        if (d < best) {
            best = d;
            cutline = lo + static_cast<int>(i);
        }
    }

    cut.cutline = cutline;
    for (const TreeItem &it : items) {
        if (it.region.hi(axis) <= cutline)
            cut.left.push_back(it);
        else if (it.region.lo(axis) > cutline)
            cut.right.push_back(it);
        else
            cut.mid.push_back(it);
    }
    cut.success = !cut.left.empty() && !cut.right.empty();
    cut.diff = cut.success ? best : AxisCut::kNoCut;
    return cut;
}

AxisCut balance_cut(std::span<const TreeItem> items)
{
    AxisCut x = balance_cut_axis(items, Axis::X);
    AxisCut y = balance_cut_axis(items, Axis::Y);
    if (x.diff < y.diff)
        return x;
    return y;
}

namespace {

std::unique_ptr<RpttNode> make_leaf(std::span<const TreeItem> items, const TreeOptions &options)
{
    auto node = std::make_unique<RpttNode>();
    node->connections.reserve(items.size());
    for (const TreeItem &it : items)
        node->connections.push_back(it.id);
    if (options.leaf_order)
        std::stable_sort(node->connections.begin(), node->connections.end(), options.leaf_order);
    else
        std::sort(node->connections.begin(), node->connections.end());
    return node;
}

} // namespace

std::unique_ptr<RpttNode> build_tree(std::span<const TreeItem> items, const TreeOptions &options)
{
    AxisCut cut = balance_cut(items);
    if (!cut.success)
        return make_leaf(items, options);

    auto node = std::make_unique<RpttNode>();
    node->cut_axis = cut.axis;
    node->cut_coord = cut.cutline;
    node->left = build_tree(cut.left, options);
    if (!cut.mid.empty())
        node->mid = options.ternary ? build_tree(cut.mid, options) : make_leaf(cut.mid, options);
    node->right = build_tree(cut.right, options);

    for (const RpttNode *child : {node->left.get(), node->mid.get(), node->right.get()})
        if (child)
            node->connections.insert(node->connections.end(), child->connections.begin(), child->connections.end());
    return node;
}

int tree_depth(const RpttNode &node)
{
    int depth = 0;
    for (const RpttNode *child : {node.left.get(), node.mid.get(), node.right.get()})
        if (child)
            depth = std::max(depth, 1 + tree_depth(*child));
    return depth;
}

std::size_t count_leaves(const RpttNode &node)
{
    if (node.is_leaf())
        return 1;
    std::size_t n = 0;
    for (const RpttNode *child : {node.left.get(), node.mid.get(), node.right.get()})
        if (child)
            n += count_leaves(*child);
    return n;
}

namespace {

void dump_node(const RpttNode &node, std::ostream &out, const std::string &label, int indent)
{
    out << std::string(static_cast<std::size_t>(indent) * 2, ' ') << label << ' ';
    if (node.is_leaf()) {
        out << "leaf n=" << node.connections.size() << " [";
        for (std::size_t i = 0; i < node.connections.size(); ++i)
            out << (i ? " " : "") << node.connections[i];
        out << "]\n";
        return;
    }
    out << "cut " << (*node.cut_axis == Axis::X ? 'x' : 'y') << '=' << node.cut_coord
        << " n=" << node.connections.size() << '\n';
    if (node.mid)
        dump_node(*node.mid, out, "mid", indent + 1);
    dump_node(*node.left, out, "left", indent + 1);
    dump_node(*node.right, out, "right", indent + 1);
}

} // namespace

void dump_tree(const RpttNode &node, std::ostream &out)
{
    dump_node(node, out, "root", 0);
}

} // namespace parroute
