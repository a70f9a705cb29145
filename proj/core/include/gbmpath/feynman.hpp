#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gbmpath/camb.hpp"
#include "gbmpath/paths_space.hpp"

namespace gbmpath {

/// One point mass of a complex measure on R^d.
struct Atom {
    std::vector<double> v;
    std::complex<double> weight;
};

/// Thrown when a series over a countable measure fails the ratio test inside
/// an operation whose contract requires absolute convergence.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, double ratio_limit)
        : std::runtime_error(what), ratio_limit_(ratio_limit) {}
    double ratio_limit() const { return ratio_limit_; }

private:
    double ratio_limit_;
};

/// Finite or countable atomic complex measure on R^d. Countable measures are
/// given by a generator producing atom k (k = 0, 1, ...); sums over them are
/// classified by the d'Alembert ratio test and truncated under an atom budget
/// with a tail bound. Densities are out of scope; every measure here is a
/// weighted atom set, which keeps the total variation and Fourier transform
/// exact for the finite case.
class ComplexMeasure {
public:
    using TailGenerator = std::function<Atom(std::size_t)>;

    static ComplexMeasure finite(std::vector<Atom> atoms);
    static ComplexMeasure countable(std::size_t dim, TailGenerator gen);

    /// The measure alpha({m}) = 1/m^2 on the natural numbers (dim 1).
    static ComplexMeasure alpha_inverse_squares();

    bool is_finite() const { return !tail_; }
    std::size_t dim() const { return dim_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    Atom atom(std::size_t k) const; ///< k-th atom, finite list or generator

    /// Total variation of the explicit atoms (lower bound for countable).
    double explicit_total_variation() const;

    std::size_t atom_budget() const { return budget_; }
    void set_atom_budget(std::size_t budget) { budget_ = budget; }

private:
    std::vector<Atom> atoms_;
    TailGenerator tail_;
    std::size_t dim_ = 0;
    std::size_t budget_ = 1'000'000;
};

/// Bounded cylinder functional F(X) = nu^((g_j, X(s_k))~ over j, k): the
/// Fourier transform of a complex measure on R^{m n} evaluated at the PWZ
/// coordinates of the section in an orthonormal set G = {g_1, ..., g_m}.
/// v_{j,k} sits at flat index (j-1)*n + (k-1) of an atom location.
class CylinderFunctional {
public:
    /// Validates |(g_i, g_j) - delta_ij| <= 1e-8 and measure dim == m*n.
    CylinderFunctional(std::vector<CambElement> g, PathsTuple tuple,
                       ComplexMeasure measure, const KernelPair& kp);

    std::size_t m() const { return g_.size(); }
    std::size_t n() const { return tuple_.size(); }
    const std::vector<CambElement>& basis() const { return g_; }
    const PathsTuple& tuple() const { return tuple_; }
    const ComplexMeasure& measure() const { return measure_; }

    /// (g_j, a)_{C'} for each basis element, precomputed at construction.
    std::span<const double> basis_drift_pairings() const { return ga_; }

private:
    std::vector<CambElement> g_;
    PathsTuple tuple_;
    ComplexMeasure measure_;
    std::vector<double> ga_;
};

/// F evaluated on a concrete section. |result| <= ||nu||. For countable
/// measures the total variation must be summable and the atom sum is
/// truncated at the budget (the phases all have modulus one, so only the
/// weight tail bounds the truncation error).
std::complex<double> eval_F(const CylinderFunctional& F, const PathsSection& section);

/// Analytic paths space integral
///   J*(lambda) = integral of exp(-(1/2 lambda) sum_j sum_l
///                    [b(s_l)-b(s_{l-1})] (sum_{k>=l} v_{j,k})^2
///                 + i lambda^{-1/2} sum_{j,k} (g_j, a) v_{j,k}) d nu(v),
/// lambda in the open right half-plane; lambda^{-1/2} takes the branch with
/// positive real part. For real lambda > 0 this equals the Monte Carlo value
/// of E[F(lambda^{-1/2} X)]. Throws std::domain_error for Re(lambda) <= 0 and
/// DivergenceError for an unsummable countable measure.
std::complex<double> analytic_J(const CylinderFunctional& F,
                                std::complex<double> lambda,
                                const KernelPair& kp);

/// Single-time form (n = 1): exp(-b(s)/(2 lambda) sum_j v_j^2
/// + i lambda^{-1/2} sum_j (g_j, a) v_j). Kept as an independent evaluation
/// route for the tuple formula's n = 1 consistency check.
std::complex<double> analytic_J_single(const CylinderFunctional& F,
                                       std::complex<double> lambda,
                                       const KernelPair& kp);

enum class SeriesStatus { converged, divergent, indeterminate };

/// Analytic Feynman integral at parameter q (the lambda -> -iq limit).
struct FeynmanResult {
    SeriesStatus status = SeriesStatus::converged;
    std::complex<double> value{};
    double ratio_limit = 0.0;   ///< d'Alembert limit estimate (countable case)
    std::size_t atoms_used = 0;
};

/// Substitutes lambda = -iq in the analytic integral, with
/// (-iq)^{-1/2} = (1 + i sign(q)) / sqrt(2|q|). Finite measures always
/// evaluate; countable measures are ratio-tested first and a divergent
/// series yields a structured divergence verdict carrying the limit L.
FeynmanResult feynman_limit(const CylinderFunctional& F, double q,
                            const KernelPair& kp);

/// Membership test for the q0-class:
///   integral of exp(||a||_{C'}/sqrt(2 q0) sum_{j,k} |v_{j,k}|) d|nu| finite.
struct Q0Result {
    SeriesStatus verdict = SeriesStatus::indeterminate; ///< converged=true, divergent=false
    double value = 0.0;         ///< the integral when finite
    double ratio_limit = 0.0;
    std::size_t atoms_used = 0;
};

Q0Result q0_condition(const CylinderFunctional& F, double q0, const KernelPair& kp);

/// Convergence report for the defining limit: evaluates J* along
/// lambda_l = -iq + 1/l, l = 1..l_count, against feynman_limit(q).
struct SequenceReport {
    double final_gap = 0.0;
    double max_gap = 0.0;
    bool decreasing = false; ///< gaps shrink decade over decade
    std::complex<double> limit{};
    std::size_t l_count = 0;
};

SequenceReport feynman_sequence_check(const CylinderFunctional& F, double q,
                                      const KernelPair& kp, std::size_t l_count);

/// Axis-aligned rectangle strictly inside the right half-plane.
struct Rectangle {
    double re_lo = 0.0, re_hi = 0.0, im_lo = 0.0, im_hi = 0.0;
};

struct ContourReport {
    std::complex<double> integral{};
    double residual = 0.0;
    std::size_t evaluations = 0;
};

struct ContourOptions {
    std::size_t fixed_panels = 0; ///< 0 = adaptive Simpson to tolerance
    double tolerance = 1e-11;
    int max_depth = 24;
};

/// Numerical substitute for the Morera argument: the closed contour integral
/// of J* around the rectangle, which vanishes when J* is analytic inside.
/// Throws std::domain_error when the rectangle touches Re(lambda) <= 0.
ContourReport contour_analyticity_check(const CylinderFunctional& F,
                                        const Rectangle& rect,
                                        const KernelPair& kp,
                                        const ContourOptions& opt = {});

/// ULP distance between two doubles (monotone total-order walk).
std::uint64_t ulp_distance(double x, double y);

/// Checks sum_{k=1}^n sum_{l=1}^k A_l B_k == sum_{l=1}^n sum_{k=l}^n A_l B_k
/// with both sides computed independently, to within 8 ulps.
bool sum_identity_check(std::span<const double> a, std::span<const double> b);

} // namespace gbmpath
