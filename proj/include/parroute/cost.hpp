#pragma once

#include <atomic>
#include <cstddef>
#include <string_view>
#include <vector>

#include "parroute/rrg.hpp"

namespace parroute {

struct CostConfig {
    double p0 = 0.5;
    double pf = 2.0;
    double hf = 1.0;
    /// present factor once a congested design switches to historical-centric updates
    double alpha = 1.1;
    /// historical factor after the switch
    double beta = 2.0;
    double congestion_threshold = 0.05;
    int switch_iteration = 3;
    double astar_weight = 1.0;
    bool legacy_mode = false;
    bool hus_enabled = true;

    /// Throws InvalidParameter unless p0 > 0, pf >= 1, hf > 0, alpha < pf,
    /// beta > hf and astar_weight >= 1.
    void validate() const;
};

enum class Phase { PresentCentric, HistoricalCentric };

std::string_view to_string(Phase phase);

struct CostState {
    int iteration = 1;
    Phase phase = Phase::PresentCentric;
    double effective_pf = 2.0;
    double effective_hf = 1.0;
    bool congested_design = false;

    static CostState initial(const CostConfig &config);
};

/// c(n) = b * h * p / (1 + share)
inline double node_use_cost(double base, double historical, double present, int share)
{
    return base * historical * present / (1.0 + share);
}

/// PathFinder's f(n) = (b + h) * p
inline double legacy_node_cost(double base, double historical, double present)
{
    return (base + historical) * present;
}

inline double total_cost(double c_prev, double c_est, double c_n) { return c_prev + c_est + c_n; }

/// weight * max(0, manhattan - length(node)) * min_unit_cost. The node's own
/// span is subtracted because its cost is already paid on arrival.
double estimate_to_sink(const RoutingGraph &graph, NodeId node, NodeId sink, double weight);

double update_historical(double h_prev, int occupancy, double hf);

/// 1 while `occupancy` fits the node's capacity, else 1 + p0 * pf^(i-1) * occ.
double present_cost(int iteration, int occupancy, double p0, double pf);

bool classify_congested(std::size_t overused_nodes, std::size_t connections, double threshold);

/// Mutable per-node routing state: occ(n) counts distinct nets on a node and
/// is updated with atomic read-modify-writes during parallel routing; h(n) is
/// only written at iteration barriers.
class CongestionMap {
public:
    explicit CongestionMap(std::size_t num_nodes);

    int occupancy(NodeId n) const { return occupancy_[idx(n)].load(std::memory_order_relaxed); }
    double historical(NodeId n) const { return historical_[idx(n)]; }
    std::size_t size() const { return historical_.size(); }

    /// A net starts using the node.
    void acquire(NodeId n);
    /// A net stops using the node.
    void release(NodeId n);

    /// Incrementally tracked number of nodes with occupancy above capacity.
    int overused() const { return overused_.load(std::memory_order_relaxed); }
    int count_overused() const;

    /// Applies update_historical with `hf` to every over-occupied node.
    void accumulate_historical(double hf);
    void set_historical(NodeId n, double h) { historical_[idx(n)] = h; }
    void reset();

private:
    static std::size_t idx(NodeId n) { return static_cast<std::size_t>(n); }

    std::vector<std::atomic<int>> occupancy_;
    std::vector<double> historical_;
    std::atomic<int> overused_{0};
};

/// End-of-iteration bookkeeping, run single-threaded at the barrier:
/// classifies the design after iteration 1, accumulates historical cost with
/// the current h_f, advances the iteration and switches to the
/// historical-centric coefficients once a congested design passes
/// `switch_iteration`.
CostState advance_iteration(const CostState &state, const CostConfig &config, std::size_t overused_nodes,
                            std::size_t connections, CongestionMap &congestion);

} // namespace parroute
