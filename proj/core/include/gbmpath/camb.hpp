#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gbmpath/kernel_pair.hpp"

namespace gbmpath {

/// Element w of the Cameron-Martin-type space C'_{a,b}: w(t) is the cumulative
/// Stieltjes integral of a density z against b, and z = Dw recovers the
/// density exactly at grid level.
///
/// Discretization: z is piecewise constant per grid interval (z[i] is the
/// value on (t_i, t_{i+1}]), and w holds the node values with w[0] = 0. With
/// this convention the quadrature sum_i z1[i] z2[i] db_i is exact for
/// indicator densities whose step sits on a grid node, which is what makes
/// the beta kernels reproduce node values exactly. Densities of smooth
/// functions are sampled onto intervals by endpoint averaging, which makes
/// the interval sum coincide with the trapezoid rule.
struct CambElement {
    std::vector<double> z; ///< interval densities, size M
    std::vector<double> w; ///< node values, size M+1, w[0] = 0
};

/// Lebesgue-Stieltjes quadrature of a node function f against the increments
/// of a node function g of bounded variation:
///   sum_j (f(t_{j-1}) + f(t_j))/2 * (g(t_j) - g(t_{j-1})).
/// Trapezoid in the integrand, exact in the increments of the integrator.
/// Throws std::invalid_argument when the lengths differ.
double stieltjes_integral(std::span<const double> f, std::span<const double> g);

/// Build an element from interval densities (integrates against b).
CambElement camb_from_density(std::vector<double> z, const KernelPair& kp);

/// Build an element from a density callback; samples onto intervals by
/// endpoint averaging so the cumulative integral matches the trapezoid rule.
CambElement camb_from_density_fn(const std::function<double(double)>& z,
                                 const KernelPair& kp);

CambElement camb_zero(const KernelPair& kp);

/// Reproducing kernel element beta_t: density is the indicator of [0, t]
/// (t snapped to the nearest grid node), values beta_t(s) = min{b(s), b(t)}.
/// Throws std::domain_error for t outside [0, T].
CambElement beta_kernel(double t, const KernelPair& kp);

/// The drift a as an element of C'_{a,b}; density Da per interval is da/db.
CambElement drift_element(const KernelPair& kp);

/// alpha*x + beta*y applied to both the density and the accumulated values.
CambElement camb_axpby(double alpha, const CambElement& x,
                       double beta, const CambElement& y);

/// (w1, w2)_{C'} = integral of Dw1 Dw2 db. Symmetric, bilinear, >= 0 on the
/// diagonal. Throws std::invalid_argument on grid mismatch.
double inner_camb(const CambElement& w1, const CambElement& w2, const KernelPair& kp);

double camb_norm(const CambElement& w, const KernelPair& kp);

/// (w, a)_{C'} = integral of z da (valid under the |a'|^2 d|a| condition).
double pair_with_a(const CambElement& w, const KernelPair& kp);

/// (w, beta_t)_{C'}; equals w at the grid node nearest t.
double reproduce(const CambElement& w, double t, const KernelPair& kp);

/// Modified Gram-Schmidt with a re-orthogonalization pass. Elements whose
/// residual norm falls below 1e-12 times the largest input norm are dropped.
/// Throws std::invalid_argument on an empty input and std::runtime_error when
/// every input is numerically zero.
std::vector<CambElement> gram_schmidt(std::span<const CambElement> ws,
                                      const KernelPair& kp);

} // namespace gbmpath
