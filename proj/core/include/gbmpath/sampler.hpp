#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "gbmpath/camb.hpp"
#include "gbmpath/kernel_pair.hpp"
#include "gbmpath/rng.hpp"

namespace gbmpath {

/// Sample path of the process on the grid, x(0) = 0.
struct SamplePath {
    std::vector<double> x; ///< node values, size M+1
};

/// Draw one path: x(t_j) = a(t_j) + sum_{l<=j} sqrt(b(t_l)-b(t_{l-1})) xi_l
/// with xi_l i.i.d. standard normal, so increments of x - a are independent
/// N(0, db) as in the finite-dimensional distributions of the process.
SamplePath sample_gbmp(const KernelPair& kp, RngStream& rng);

/// Paley-Wiener-Zygmund integral of w against x, realized as the
/// Riemann-Stieltjes sum of the (interval) density against path increments:
/// sum_i z_i (x(t_{i+1}) - x(t_i)). Gaussian with mean (w,a)_{C'} and
/// variance ||w||^2_{C'} under the path measure.
double pwz(const CambElement& w, const SamplePath& x);

SamplePath scale_path(const SamplePath& x, double rho);

/// Monte Carlo check of the function space integration formula
///   E[exp(rho (w,x)~)] = exp(rho^2 ||w||^2 / 2 + rho (w,a)).
struct CharFunctionalReport {
    double estimate = 0.0;
    double closed_form = 0.0;
    double std_error = 0.0;
    double z_score = 0.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    bool pass = false;

    nlohmann::json to_json() const;
};

CharFunctionalReport verify_char_functional(const CambElement& w, double rho,
                                            const KernelPair& kp,
                                            std::size_t n_samples,
                                            RngStream rng);

} // namespace gbmpath
