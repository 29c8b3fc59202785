#include "parroute/cost.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "parroute/error.hpp"

namespace parroute {

void CostConfig::validate() const
{
    if (!(p0 > 0.0))
        throw InvalidParameter("p0 must be positive");
    if (!(pf >= 1.0))
        throw InvalidParameter("pf must be at least 1");
    if (!(hf > 0.0))
        throw InvalidParameter("hf must be positive");
    if (!(alpha < pf))
        throw InvalidParameter("alpha must be smaller than pf");
    if (!(beta > hf))
        throw InvalidParameter("beta must be larger than hf");
    if (!(astar_weight >= 1.0))
        throw InvalidParameter("astar_weight must be at least 1");
    if (!(congestion_threshold >= 0.0))
        throw InvalidParameter("congestion_threshold must be non-negative");
    if (switch_iteration < 1)
        throw InvalidParameter("switch_iteration must be at least 1");
}

std::string_view to_string(Phase phase)
{
    return phase == Phase::PresentCentric ? "present-centric" : "historical-centric";
}

CostState CostState::initial(const CostConfig &config)
{
    CostState s;
    s.effective_pf = config.pf;
    s.effective_hf = config.hf;
    return s;
}

double estimate_to_sink(const RoutingGraph &graph, NodeId node, NodeId sink, double weight)
{
    if (node == sink)
        return 0.0;
    const RrgNode &a = graph.node(node);
    const RrgNode &b = graph.node(sink);
    const int dist = std::abs(a.x - b.x) + std::abs(a.y - b.y);
    const int remaining = std::max(0, dist - a.length);
    return weight * remaining * graph.min_unit_cost();
}

double update_historical(double h_prev, int occupancy, double hf)
{
    if (occupancy > 1)
        return h_prev + hf * (occupancy - 1);
    return h_prev;
}

double present_cost(int iteration, int occupancy, double p0, double pf)
{
    if (occupancy <= RrgNode::capacity)
        return 1.0;
    return 1.0 + p0 * std::pow(pf, iteration - 1) * occupancy;
}

bool classify_congested(std::size_t overused_nodes, std::size_t connections, double threshold)
{
    if (connections == 0)
        return false;
    return static_cast<double>(overused_nodes) / static_cast<double>(connections) > threshold;
}

CongestionMap::CongestionMap(std::size_t num_nodes) : occupancy_(num_nodes), historical_(num_nodes, 1.0) {}

void CongestionMap::acquire(NodeId n)
{
    if (occupancy_[idx(n)].fetch_add(1, std::memory_order_relaxed) == RrgNode::capacity)
        overused_.fetch_add(1, std::memory_order_relaxed);
}

void CongestionMap::release(NodeId n)
{
    if (occupancy_[idx(n)].fetch_sub(1, std::memory_order_relaxed) == RrgNode::capacity + 1)
        overused_.fetch_sub(1, std::memory_order_relaxed);
}

int CongestionMap::count_overused() const
{
    int count = 0;
    for (const auto &occ : occupancy_)
        if (occ.load(std::memory_order_relaxed) > RrgNode::capacity)
            ++count;
    return count;
}

void CongestionMap::accumulate_historical(double hf)
{
    for (std::size_t i = 0; i < historical_.size(); ++i)
        historical_[i] = update_historical(historical_[i], occupancy_[i].load(std::memory_order_relaxed), hf);
}

void CongestionMap::reset()
{
    for (auto &occ : occupancy_)
        occ.store(0, std::memory_order_relaxed);
    std::fill(historical_.begin(), historical_.end(), 1.0);
    overused_.store(0, std::memory_order_relaxed);
}

CostState advance_iteration(const CostState &state, const CostConfig &config, std::size_t overused_nodes,
                            std::size_t connections, CongestionMap &congestion)
{
    CostState next = state;
    if (state.iteration == 1)
        next.congested_design = classify_congested(overused_nodes, connections, config.congestion_threshold);
    congestion.accumulate_historical(state.effective_hf);
    ++next.iteration;
    if (config.hus_enabled && next.congested_design && next.iteration > config.switch_iteration) {
        next.phase = Phase::HistoricalCentric;
        next.effective_pf = config.alpha;
        next.effective_hf = config.beta;
    }
    return next;
}

} // namespace parroute
