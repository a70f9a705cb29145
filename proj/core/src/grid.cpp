#include "gbmpath/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gbmpath {

Grid::Grid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 3) {
        throw std::invalid_argument("Grid: need at least 2 intervals (3 nodes)");
    }
    if (nodes_.front() != 0.0) {
        throw std::invalid_argument("Grid: first node must be exactly 0");
    }
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        if (!(nodes_[i] > nodes_[i - 1])) {
            throw std::invalid_argument("Grid: nodes must be strictly increasing");
        }
    }
    if (!std::isfinite(nodes_.back()) || nodes_.back() <= 0.0) {
        throw std::invalid_argument("Grid: horizon must be positive and finite");
    }
}

Grid Grid::uniform(double horizon, std::size_t intervals) {
    if (intervals < 2) {
        throw std::invalid_argument("Grid::uniform: need at least 2 intervals");
    }
    std::vector<double> nodes(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) {
        nodes[i] = horizon * static_cast<double>(i) / static_cast<double>(intervals);
    }
    nodes[0] = 0.0;
    nodes[intervals] = horizon;
    return Grid(std::move(nodes));
}

std::size_t Grid::nearest_node(double t) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t);
    if (it == nodes_.end()) return nodes_.size() - 1;
    if (it == nodes_.begin()) return 0;
    std::size_t hi = static_cast<std::size_t>(it - nodes_.begin());
    std::size_t lo = hi - 1;
    return (t - nodes_[lo] <= nodes_[hi] - t) ? lo : hi;
}

std::size_t Grid::interval_of(double t) const {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
    if (it == nodes_.begin()) return 0;
    std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    return std::min(i, nodes_.size() - 2);
}

} // namespace gbmpath
