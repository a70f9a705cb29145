#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gbmpath/grid.hpp"

namespace gbmpath {

/// The pair (a, b) defining a generalized Brownian motion: drift function a
/// with a(0)=0 and square-integrable derivative, and variance function b,
/// strictly increasing with b(0)=0 and b' > 0. Values are sampled once onto
/// the grid at construction; afterwards only the grid samples exist.
///
/// Construction enforces, numerically on the grid:
///   - a(0) = 0 and b(0) = 0,
///   - b(t_j) > b(t_{j-1}) and b'(t_j) > 0 for all j,
///   - finiteness of the drift quadratures: integral of (a')^2 dt and of
///     |a'|^2 d|a| (the latter evaluated as |a'|^3 dt since a is absolutely
///     continuous, so d|a| = |a'| dt).
class KernelPair {
public:
    using ScalarFn = std::function<double(double)>;

    KernelPair(Grid grid,
               const ScalarFn& a, const ScalarFn& a_prime,
               const ScalarFn& b, const ScalarFn& b_prime);

    KernelPair(Grid grid,
               std::vector<double> a, std::vector<double> a_prime,
               std::vector<double> b, std::vector<double> b_prime);

    /// Named presets: "wiener" (a=0, b(t)=t), "drifted" (a(t)=t, b(t)=t),
    /// "curved" (a(t)=t^2, b(t)=t+t^2/2). Throws on unknown names.
    static KernelPair preset(std::string_view name, double horizon, std::size_t intervals);
    static bool is_preset(std::string_view name);

    const Grid& grid() const { return grid_; }
    double horizon() const { return grid_.horizon(); }
    std::size_t intervals() const { return grid_.intervals(); }

    std::span<const double> a() const { return a_; }
    std::span<const double> a_prime() const { return a_prime_; }
    std::span<const double> b() const { return b_; }
    std::span<const double> b_prime() const { return b_prime_; }

    double a_node(std::size_t j) const { return a_[j]; }
    double b_node(std::size_t j) const { return b_[j]; }

    /// Increment over grid interval i, i.e. between nodes i and i+1.
    double delta_a(std::size_t i) const { return a_[i + 1] - a_[i]; }
    double delta_b(std::size_t i) const { return b_[i + 1] - b_[i]; }

    /// Piecewise-linear interpolation between grid nodes; exact at nodes.
    /// Throws std::domain_error for t outside [0, T].
    double a_at(double t) const;
    double b_at(double t) const;

    /// Cameron-Martin norm of the drift, ||a||_{C'} = sqrt(sum da_i^2 / db_i).
    double drift_norm() const;

    nlohmann::json to_json() const;
    static KernelPair from_json(const nlohmann::json& j);

private:
    void validate() const;

    Grid grid_;
    std::vector<double> a_, a_prime_, b_, b_prime_;
};

} // namespace gbmpath
