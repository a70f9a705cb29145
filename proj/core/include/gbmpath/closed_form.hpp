#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gbmpath/camb.hpp"
#include "gbmpath/paths_space.hpp"

namespace gbmpath {

/// Exact values of the paths space integrals with known closed forms; these
/// are the oracles the Monte Carlo estimates are validated against.

/// E[(w, X(s))~] = (w, a)_{C'}, independent of s in (0, T].
double mean_pwz(const CambElement& w, double s, const KernelPair& kp);

/// E[((w, X(s))~)^2] = b(s) ||w||^2 + (w, a)^2.
double second_moment_pwz(const CambElement& w, double s, const KernelPair& kp);

/// E[(w1, X(s1))~ (w2, X(s2))~] = min{b(s1), b(s2)} (w1, w2) + (w1,a)(w2,a).
/// Stated for s1 < s2; symmetry of the covariance extends it to any order
/// through the min, so no ordering precondition is imposed.
double cross_pwz(const CambElement& w1, double s1,
                 const CambElement& w2, double s2, const KernelPair& kp);

/// E[exp(i rho (w, X(s))~)] = exp(-rho^2 b(s) ||w||^2 / 2 + i rho (w, a)).
std::complex<double> char_single(const CambElement& w, double rho, double s,
                                 const KernelPair& kp);

/// E[exp(i rho sum_k (w_k, X(s_k))~)]
///   = exp(-rho^2 sum_k (b(s_k)-b(s_{k-1}))/2 ||sum_{l>=k} w_l||^2
///         + i rho sum_k (w_k, a)).
/// Reduces to char_single at n = 1. Throws on ws/tuple length mismatch.
std::complex<double> char_multi(std::span<const CambElement> ws, double rho,
                                const PathsTuple& tuple, const KernelPair& kp);

/// A closed-form request as data, for the CLI surface. The element specs are
/// either {"beta": t} or {"combination": [[coef, t], ...]} denoting
/// sum coef * beta_t.
struct MomentSpec {
    std::string kind; ///< mean_pwz | second_moment_pwz | cross_pwz | char_single | char_multi | point_product
    std::vector<CambElement> ws;
    std::vector<double> s;
    std::vector<double> t; ///< state-times for point_product
    double rho = 0.0;

    static MomentSpec from_json(const nlohmann::json& j, const KernelPair& kp);
};

/// E[X(s1)(t1) X(s2)(t2)] = min{b(s1),b(s2)} min{b(t1),b(t2)} + a(t1) a(t2).
double point_product(double s1, double t1, double s2, double t2,
                     const KernelPair& kp);

std::complex<double> eval_moment_spec(const MomentSpec& spec, const KernelPair& kp);

/// Parse a Cameron-Martin element description (see MomentSpec).
CambElement camb_from_json(const nlohmann::json& j, const KernelPair& kp);

} // namespace gbmpath
