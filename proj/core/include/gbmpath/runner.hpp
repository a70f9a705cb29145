#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gbmpath/feynman.hpp"
#include "gbmpath/kernel_pair.hpp"

namespace gbmpath::runner {

/// Exit codes shared by all subcommands.
inline constexpr int exit_pass = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_divergent = 2;

/// Reproducible experiment configuration. All randomness flows from the one
/// seed: experiment row e uses stream ids starting at e * 2^32, and Monte
/// Carlo sample i within a row uses stream id (e << 32) + i.
struct ExperimentConfig {
    int schema_version = 1;
    std::string kernel = "wiener"; ///< preset name, or inline JSON via kernel_json
    std::optional<nlohmann::json> kernel_json;
    std::size_t grid_m = 4096;
    std::uint64_t seed = 42;
    std::size_t n = 100'000;
    unsigned workers = 1;
    std::vector<double> tuple;
    std::optional<nlohmann::json> functional;
    std::optional<std::complex<double>> lambda_value; ///< for `feynman eval`
    std::optional<double> q_value;                    ///< for `feynman eval`
    std::string output;

    /// Strict parse: unknown fields are rejected with the offending path.
    static ExperimentConfig from_json(const nlohmann::json& j);
    KernelPair make_kernel(std::size_t grid_m_override = 0) const;
};

/// One line of a verification table.
struct CheckRow {
    std::string id;
    double closed_form = 0.0;
    double mc_estimate = 0.0;
    double std_error = 0.0;
    double z_score = 0.0;
    bool pass = false;
};

void write_csv(std::ostream& os, const std::vector<CheckRow>& rows);

/// The cross-check table: mean, second moment, cross-covariance and point
/// products, single- and two-time characteristic functionals, all as Monte
/// Carlo vs closed form. Complex checks contribute [re]/[im] rows.
std::vector<CheckRow> paths_verify_table(const KernelPair& kp, std::uint64_t seed,
                                         std::size_t n, unsigned workers);

/// paths_verify_table plus function-space level checks (PWZ moments and the
/// characteristic formula).
std::vector<CheckRow> verify_all_table(const KernelPair& kp, std::uint64_t seed,
                                       std::size_t n, unsigned workers);

/// Build the cylinder functional described by a config "functional" object:
/// basis from gram_schmidt over named beta kernels, atoms inline, or the
/// alpha tail measure.
CylinderFunctional functional_from_json(const nlohmann::json& j,
                                        const PathsTuple& tuple,
                                        const KernelPair& kp);

int run_sample(const ExperimentConfig& cfg, std::ostream& diag);
int run_paths_verify(const ExperimentConfig& cfg, std::ostream& diag);
int run_verify_all(const ExperimentConfig& cfg, std::ostream& diag);
int run_closed_form_eval(const ExperimentConfig& cfg, const nlohmann::json& spec,
                         std::ostream& out);
int run_feynman_eval(const ExperimentConfig& cfg, std::ostream& out);
int run_diverge_demo(const ExperimentConfig& cfg, std::ostream& out);
int run_contour(const ExperimentConfig& cfg, std::ostream& out);

} // namespace gbmpath::runner
