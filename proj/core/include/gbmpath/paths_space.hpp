#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gbmpath/kernel_pair.hpp"
#include "gbmpath/sampler.hpp"

namespace gbmpath {

/// Strictly increasing paths-times 0 < s_1 < ... < s_n <= T (s_0 = 0 implicit).
/// Paths-times index copies of the function space, so they need not be grid
/// nodes; state-times are snapped to the grid by the callers that need nodes.
struct PathsTuple {
    std::vector<double> s;

    std::size_t size() const { return s.size(); }
};

void validate_tuple(const PathsTuple& tuple, const KernelPair& kp);

/// The n-tuple of function-space values (X(s_1), ..., X(s_n)) of a paths
/// space element at the tuple times.
struct PathsSection {
    std::vector<SamplePath> sections;
    PathsTuple tuple;
};

/// The affine transform realizing the cylinder law: for each k,
///   sections[k] = sum_{l<=k} sqrt(b(s_l) - b(s_{l-1})) (x_l - a) + a,
/// applied pointwise on the grid.
PathsSection transform_T(std::span<const SamplePath> xs, const PathsTuple& tuple,
                         const KernelPair& kp);

/// Draw n i.i.d. paths and apply transform_T; the result is distributed as
/// the section of the paths space measure at the tuple times.
PathsSection sample_section(const PathsTuple& tuple, const KernelPair& kp,
                            RngStream& rng);

PathsSection scale_section(const PathsSection& sec, double rho);

/// Polygonal right inverse of the section map: interpolation in the b-scale,
///   H(x)(s) = x_{j-1} + [(b(s)-b(s_{j-1}))/(b(s_j)-b(s_{j-1}))](x_j - x_{j-1})
/// on [s_{j-1}, s_j], constant x_n on [s_n, T], with x_0 the zero path.
/// At s == s_k the k-th input is returned exactly.
SamplePath polygonal_H(std::span<const SamplePath> xs, const PathsTuple& tuple,
                       const KernelPair& kp, double s);

using PathsFunctional = std::function<std::complex<double>(const PathsSection&)>;

/// Monte Carlo estimate of a paths space integral.
struct McEstimate {
    std::complex<double> mean;
    double stderr_re = 0.0;
    double stderr_im = 0.0;
    std::size_t n = 0;            ///< finite evaluations actually averaged
    std::size_t n_nonfinite = 0;  ///< flagged, excluded from the average
    bool nonfinite_warning = false; ///< set when non-finite fraction > 0.1%
};

/// Estimates the right-hand side of the paths space integration identity,
/// the integral of f(T(x_1,...,x_n)) over n independent copies of the path
/// measure. Sample i draws from stream (seed, stream_base + i), so the result
/// is independent of how samples are sharded over workers; per-shard partial
/// sums are combined in a fixed order.
McEstimate mc_paths_integral(const PathsFunctional& f, const PathsTuple& tuple,
                             const KernelPair& kp, std::size_t n_samples,
                             std::uint64_t seed, std::uint64_t stream_base = 0,
                             unsigned workers = 1);

/// Finite-difference check of the determinant identity for the R^n transform
/// u_k = sum_{l<=k} sqrt(b(t_l)-b(t_{l-1}))(w_l - a(t_l)) + a(t_k):
/// |det J| = prod_j sqrt(b(t_j) - b(t_{j-1})). n <= 8.
struct JacobianReport {
    double det_fd = 0.0;
    double det_closed = 0.0;
    double rel_error = 0.0;
};

JacobianReport jacobian_check(std::span<const double> state_times,
                              const KernelPair& kp,
                              std::span<const double> point);

} // namespace gbmpath
