#pragma once

#include <cstddef>
#include <vector>

namespace gbmpath {

/// Strictly increasing time partition 0 = t_0 < t_1 < ... < t_M = T shared by
/// all quadrature and sampling. M is the number of intervals; there are M+1 nodes.
class Grid {
public:
    explicit Grid(std::vector<double> nodes);

    static Grid uniform(double horizon, std::size_t intervals);

    std::size_t intervals() const { return nodes_.size() - 1; }
    std::size_t node_count() const { return nodes_.size(); }
    double node(std::size_t i) const { return nodes_[i]; }
    double horizon() const { return nodes_.back(); }
    const std::vector<double>& nodes() const { return nodes_; }

    /// Index of the grid node closest to t (ties resolve to the left node).
    std::size_t nearest_node(double t) const;

    /// Largest i with node(i) <= t, capped at intervals()-1 so that
    /// [node(i), node(i+1)] is always a valid bracketing interval.
    std::size_t interval_of(double t) const;

    bool same_nodes(const Grid& other) const { return nodes_ == other.nodes_; }

private:
    std::vector<double> nodes_;
};

} // namespace gbmpath
