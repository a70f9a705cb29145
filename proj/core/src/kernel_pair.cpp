#include "gbmpath/kernel_pair.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "gbmpath/camb.hpp"

namespace gbmpath {

namespace {

std::vector<double> sample_nodes(const KernelPair::ScalarFn& f, const Grid& grid) {
    std::vector<double> out(grid.node_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(grid.node(i));
    return out;
}

} // namespace

KernelPair::KernelPair(Grid grid,
                       const ScalarFn& a, const ScalarFn& a_prime,
                       const ScalarFn& b, const ScalarFn& b_prime)
    : grid_(std::move(grid)),
      a_(sample_nodes(a, grid_)),
      a_prime_(sample_nodes(a_prime, grid_)),
      b_(sample_nodes(b, grid_)),
      b_prime_(sample_nodes(b_prime, grid_)) {
    validate();
}

KernelPair::KernelPair(Grid grid,
                       std::vector<double> a, std::vector<double> a_prime,
                       std::vector<double> b, std::vector<double> b_prime)
    : grid_(std::move(grid)),
      a_(std::move(a)), a_prime_(std::move(a_prime)),
      b_(std::move(b)), b_prime_(std::move(b_prime)) {
    validate();
}

void KernelPair::validate() const {
    const std::size_t nodes = grid_.node_count();
    if (a_.size() != nodes || a_prime_.size() != nodes ||
        b_.size() != nodes || b_prime_.size() != nodes) {
        throw std::invalid_argument("KernelPair: sampled array length != grid node count");
    }
    if (a_[0] != 0.0) throw std::invalid_argument("KernelPair: a(0) must be 0");
    if (b_[0] != 0.0) throw std::invalid_argument("KernelPair: b(0) must be 0");
    for (std::size_t j = 1; j < nodes; ++j) {
        if (!(b_[j] > b_[j - 1])) {
            throw std::invalid_argument("KernelPair: b must be strictly increasing on the grid");
        }
    }
    for (std::size_t j = 0; j < nodes; ++j) {
        if (!(b_prime_[j] > 0.0)) {
            throw std::invalid_argument("KernelPair: b' must be positive everywhere");
        }
        if (!std::isfinite(a_[j]) || !std::isfinite(a_prime_[j]) ||
            !std::isfinite(b_[j]) || !std::isfinite(b_prime_[j])) {
            throw std::invalid_argument("KernelPair: non-finite sample");
        }
    }
    // a' in L^2[0,T] and the cubed-derivative condition (|a'|^2 d|a| with
    // d|a| = |a'| dt by absolute continuity).
    std::vector<double> sq(nodes), cube(nodes);
    for (std::size_t j = 0; j < nodes; ++j) {
        const double ap = std::fabs(a_prime_[j]);
        sq[j] = ap * ap;
        cube[j] = ap * ap * ap;
    }
    const double l2 = stieltjes_integral(sq, grid_.nodes());
    const double cc2 = stieltjes_integral(cube, grid_.nodes());
    if (!std::isfinite(l2) || !std::isfinite(cc2)) {
        throw std::invalid_argument("KernelPair: drift quadratures not finite");
    }
}

KernelPair KernelPair::preset(std::string_view name, double horizon, std::size_t intervals) {
    Grid grid = Grid::uniform(horizon, intervals);
    if (name == "wiener") {
        return KernelPair(std::move(grid),
                          [](double) { return 0.0; }, [](double) { return 0.0; },
                          [](double t) { return t; }, [](double) { return 1.0; });
    }
    if (name == "drifted") {
        return KernelPair(std::move(grid),
                          [](double t) { return t; }, [](double) { return 1.0; },
                          [](double t) { return t; }, [](double) { return 1.0; });
    }
    if (name == "curved") {
        return KernelPair(std::move(grid),
                          [](double t) { return t * t; }, [](double t) { return 2.0 * t; },
                          [](double t) { return t + 0.5 * t * t; },
                          [](double t) { return 1.0 + t; });
    }
    throw std::invalid_argument("KernelPair: unknown preset '" + std::string(name) + "'");
}

bool KernelPair::is_preset(std::string_view name) {
    return name == "wiener" || name == "drifted" || name == "curved";
}

namespace {

double interp_at(const Grid& grid, std::span<const double> values, double t,
                 const char* what) {
    const double T = grid.horizon();
    if (!(t >= 0.0 && t <= T)) {
        throw std::domain_error(std::string(what) + ": time outside [0, T]");
    }
    const std::size_t i = grid.interval_of(t);
    const double t0 = grid.node(i), t1 = grid.node(i + 1);
    if (t == t0) return values[i];
    if (t == t1) return values[i + 1];
    const double u = (t - t0) / (t1 - t0);
    return values[i] + u * (values[i + 1] - values[i]);
}

} // namespace

double KernelPair::a_at(double t) const { return interp_at(grid_, a_, t, "a_at"); }
double KernelPair::b_at(double t) const { return interp_at(grid_, b_, t, "b_at"); }

double KernelPair::drift_norm() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < intervals(); ++i) {
        const double da = delta_a(i);
        acc += da * da / delta_b(i);
    }
    return std::sqrt(acc);
}

nlohmann::json KernelPair::to_json() const {
    nlohmann::json j;
    j["T"] = horizon();
    j["grid"] = grid_.nodes();
    j["a"] = a_;
    j["a_prime"] = a_prime_;
    j["b"] = b_;
    j["b_prime"] = b_prime_;
    return j;
}

KernelPair KernelPair::from_json(const nlohmann::json& j) {
    for (const auto& key : {"T", "grid", "a", "a_prime", "b", "b_prime"}) {
        if (!j.contains(key)) {
            throw std::invalid_argument(std::string("KernelPair JSON: missing field '") + key + "'");
        }
    }
    Grid grid(j.at("grid").get<std::vector<double>>());
    if (grid.horizon() != j.at("T").get<double>()) {
        throw std::invalid_argument("KernelPair JSON: T does not match last grid node");
    }
    return KernelPair(std::move(grid),
                      j.at("a").get<std::vector<double>>(),
                      j.at("a_prime").get<std::vector<double>>(),
                      j.at("b").get<std::vector<double>>(),
                      j.at("b_prime").get<std::vector<double>>());
}

} // namespace gbmpath
