#include "gbmpath/runner.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "gbmpath/closed_form.hpp"
#include "gbmpath/paths_space.hpp"
#include "gbmpath/sampler.hpp"

namespace gbmpath::runner {

namespace {

void reject_unknown_fields(const nlohmann::json& j,
                           std::initializer_list<const char*> known,
                           const std::string& path) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (item.key() == k) { ok = true; break; }
        }
        if (!ok) {
            throw std::invalid_argument("config: unknown field '" + path + item.key() + "'");
        }
    }
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    reject_unknown_fields(j,
                          {"schema_version", "kernel", "grid_m", "seed", "n", "workers",
                           "tuple", "functional", "output", "lambda", "q"},
                          "");
    ExperimentConfig cfg;
    if (!j.contains("schema_version")) {
        throw std::invalid_argument("config: missing field 'schema_version'");
    }
    cfg.schema_version = j.at("schema_version").get<int>();
    if (cfg.schema_version != 1) {
        throw std::invalid_argument("config: unsupported schema_version");
    }
    if (j.contains("kernel")) {
        const auto& k = j.at("kernel");
        if (k.is_string()) {
            cfg.kernel = k.get<std::string>();
            if (!KernelPair::is_preset(cfg.kernel)) {
                throw std::invalid_argument("config: field 'kernel' names no preset");
            }
        } else if (k.is_object()) {
            cfg.kernel_json = k;
        } else {
            throw std::invalid_argument("config: field 'kernel' must be a preset name or object");
        }
    }
    if (j.contains("grid_m")) cfg.grid_m = j.at("grid_m").get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("n")) cfg.n = j.at("n").get<std::size_t>();
    if (j.contains("workers")) cfg.workers = j.at("workers").get<unsigned>();
    if (j.contains("tuple")) cfg.tuple = j.at("tuple").get<std::vector<double>>();
    if (j.contains("functional")) cfg.functional = j.at("functional");
    if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
    if (j.contains("lambda")) {
        const auto& l = j.at("lambda");
        if (l.is_array()) {
            cfg.lambda_value = std::complex<double>(l.at(0).get<double>(),
                                                    l.at(1).get<double>());
        } else {
            cfg.lambda_value = std::complex<double>(l.get<double>(), 0.0);
        }
    }
    if (j.contains("q")) cfg.q_value = j.at("q").get<double>();
    if (cfg.grid_m < 2) throw std::invalid_argument("config: field 'grid_m' must be >= 2");
    if (cfg.n < 1) throw std::invalid_argument("config: field 'n' must be positive");
    if (cfg.workers < 1) throw std::invalid_argument("config: field 'workers' must be positive");
    return cfg;
}

KernelPair ExperimentConfig::make_kernel(std::size_t grid_m_override) const {
    const std::size_t m = grid_m_override ? grid_m_override : grid_m;
    if (kernel_json) return KernelPair::from_json(*kernel_json);
    return KernelPair::preset(kernel, 1.0, m);
}

void write_csv(std::ostream& os, const std::vector<CheckRow>& rows) {
    os << "example_id,closed_form,mc_estimate,stderr,z_score,pass\n";
    for (const auto& r : rows) {
        os << r.id << ','
           << fmt_double(r.closed_form) << ','
           << fmt_double(r.mc_estimate) << ','
           << fmt_double(r.std_error) << ','
           << fmt_double(r.z_score) << ','
           << (r.pass ? 1 : 0) << '\n';
    }
}

namespace {

CheckRow make_row(std::string id, double closed, double mc, double se) {
    CheckRow row;
    row.id = std::move(id);
    row.closed_form = closed;
    row.mc_estimate = mc;
    row.std_error = se;
    row.z_score = (se > 0.0) ? (mc - closed) / se : 0.0;
    row.pass = (mc == closed) || std::fabs(mc - closed) <= 4.0 * se;
    return row;
}

void emit_complex_rows(std::vector<CheckRow>& rows, const std::string& id,
                       std::complex<double> closed, const McEstimate& est) {
    rows.push_back(make_row(id + "[re]", closed.real(), est.mean.real(), est.stderr_re));
    rows.push_back(make_row(id + "[im]", closed.imag(), est.mean.imag(), est.stderr_im));
}

/// Monte Carlo over the function space measure itself (not the paths space);
/// sample i draws from stream (seed, base + i).
template <typename Fn>
std::pair<double, double> mc_function_space(const Fn& f, const KernelPair& kp,
                                            std::size_t n, std::uint64_t seed,
                                            std::uint64_t base) {
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        RngStream rng(seed, base + i);
        const SamplePath x = sample_gbmp(kp, rng);
        const double v = f(x);
        sum += v;
        sumsq += v * v;
    }
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    const double var = std::max(0.0, (sumsq - nn * mean * mean) / (nn - 1.0));
    return {mean, std::sqrt(var / nn)};
}

constexpr std::uint64_t row_base(std::size_t row) {
    return static_cast<std::uint64_t>(row) << 32;
}

} // namespace

std::vector<CheckRow> paths_verify_table(const KernelPair& kp, std::uint64_t seed,
                                         std::size_t n, unsigned workers) {
    const double T = kp.horizon();
    const CambElement w_a = beta_kernel(0.5 * T, kp);
    const CambElement w_b = camb_axpby(0.8, beta_kernel(0.25 * T, kp),
                                       -0.3, beta_kernel(0.9 * T, kp));
    const PathsTuple single{{0.6 * T}};
    const PathsTuple pair{{0.25 * T, 0.8 * T}};

    std::vector<CheckRow> rows;
    std::size_t row_id = 0;

    { // first moment of the PWZ coordinate
        const auto est = mc_paths_integral(
            [&](const PathsSection& sec) {
                return std::complex<double>(pwz(w_a, sec.sections[0]), 0.0);
            },
            single, kp, n, seed, row_base(row_id++), workers);
        rows.push_back(make_row("ex1_mean", mean_pwz(w_a, single.s[0], kp),
                                est.mean.real(), est.stderr_re));
    }
    { // second moment of the PWZ coordinate
        const auto est = mc_paths_integral(
            [&](const PathsSection& sec) {
                const double v = pwz(w_a, sec.sections[0]);
                return std::complex<double>(v * v, 0.0);
            },
            single, kp, n, seed, row_base(row_id++), workers);
        rows.push_back(make_row("ex1_second", second_moment_pwz(w_a, single.s[0], kp),
                                est.mean.real(), est.stderr_re));
    }
    { // cross moment of two PWZ coordinates at different paths-times
        const auto est = mc_paths_integral(
            [&](const PathsSection& sec) {
                return std::complex<double>(
                    pwz(w_a, sec.sections[0]) * pwz(w_b, sec.sections[1]), 0.0);
            },
            pair, kp, n, seed, row_base(row_id++), workers);
        rows.push_back(make_row("ex2_cross",
                                cross_pwz(w_a, pair.s[0], w_b, pair.s[1], kp),
                                est.mean.real(), est.stderr_re));
    }
    { // point products against the min-product closed form
        const std::size_t j1 = kp.grid().nearest_node(0.5 * T);
        const std::size_t j2 = kp.grid().nearest_node(0.75 * T);
        const double t1 = kp.grid().node(j1), t2 = kp.grid().node(j2);
        const auto est = mc_paths_integral(
            [&](const PathsSection& sec) {
                return std::complex<double>(
                    sec.sections[0].x[j1] * sec.sections[1].x[j2], 0.0);
            },
            pair, kp, n, seed, row_base(row_id++), workers);
        rows.push_back(make_row("ex2_points",
                                point_product(pair.s[0], t1, pair.s[1], t2, kp),
                                est.mean.real(), est.stderr_re));
    }
    { // single-time characteristic functional
        const double rho = 1.0;
        const auto est = mc_paths_integral(
            [&](const PathsSection& sec) {
                return std::exp(std::complex<double>(0.0, rho * pwz(w_a, sec.sections[0])));
            },
            single, kp, n, seed, row_base(row_id++), workers);
        emit_complex_rows(rows, "ex3_char",
                          char_single(w_a, rho, single.s[0], kp), est);
    }
    { // two-time characteristic functional
        const double rho = 0.7;
        const std::vector<CambElement> ws = {w_a, w_b};
        const auto est = mc_paths_integral(
            [&](const PathsSection& sec) {
                const double phase = pwz(w_a, sec.sections[0]) + pwz(w_b, sec.sections[1]);
                return std::exp(std::complex<double>(0.0, rho * phase));
            },
            pair, kp, n, seed, row_base(row_id++), workers);
        emit_complex_rows(rows, "ex4_char2", char_multi(ws, rho, pair, kp), est);
    }
    return rows;
}

std::vector<CheckRow> verify_all_table(const KernelPair& kp, std::uint64_t seed,
                                       std::size_t n, unsigned workers) {
    std::vector<CheckRow> rows = paths_verify_table(kp, seed, n, workers);
    const double T = kp.horizon();
    const CambElement w_a = beta_kernel(0.5 * T, kp);
    const CambElement w_b = camb_axpby(0.8, beta_kernel(0.25 * T, kp),
                                       -0.3, beta_kernel(0.9 * T, kp));
    std::size_t row_id = 100; // distinct stream block from the paths rows

    {
        const auto [mean, se] = mc_function_space(
            [&](const SamplePath& x) { return pwz(w_a, x); }, kp, n, seed,
            row_base(row_id++));
        rows.push_back(make_row("pwz_mean", pair_with_a(w_a, kp), mean, se));
    }
    {
        const auto [mean, se] = mc_function_space(
            [&](const SamplePath& x) { return pwz(w_a, x) * pwz(w_b, x); }, kp, n,
            seed, row_base(row_id++));
        const double closed = inner_camb(w_a, w_b, kp) +
                              pair_with_a(w_a, kp) * pair_with_a(w_b, kp);
        rows.push_back(make_row("pwz_cross", closed, mean, se));
    }
    for (double rho : {0.5, 1.0}) {
        const auto rep = verify_char_functional(w_a, rho, kp, n,
                                                RngStream(seed, row_base(row_id++)));
        std::ostringstream id;
        id << "char_formula_rho" << rho;
        rows.push_back(make_row(id.str(), rep.closed_form, rep.estimate, rep.std_error));
    }
    return rows;
}

CylinderFunctional functional_from_json(const nlohmann::json& j,
                                        const PathsTuple& tuple,
                                        const KernelPair& kp) {
    reject_unknown_fields(j, {"g_from_betas", "atoms", "measure"}, "functional.");
    if (!j.contains("g_from_betas")) {
        throw std::invalid_argument("config: missing field 'functional.g_from_betas'");
    }
    std::vector<CambElement> raw;
    for (const auto& t : j.at("g_from_betas")) {
        raw.push_back(beta_kernel(t.get<double>(), kp));
    }
    std::vector<CambElement> basis = gram_schmidt(raw, kp);

    ComplexMeasure measure = [&] {
        if (j.contains("measure")) {
            const auto name = j.at("measure").get<std::string>();
            if (name == "alpha") return ComplexMeasure::alpha_inverse_squares();
            throw std::invalid_argument("config: unknown measure '" + name + "'");
        }
        if (!j.contains("atoms")) {
            throw std::invalid_argument("config: functional needs 'atoms' or 'measure'");
        }
        std::vector<Atom> atoms;
        for (const auto& aj : j.at("atoms")) {
            reject_unknown_fields(aj, {"v", "weight"}, "functional.atoms.");
            Atom atom;
            atom.v = aj.at("v").get<std::vector<double>>();
            if (aj.contains("weight")) {
                const auto& wj = aj.at("weight");
                if (wj.is_array()) {
                    atom.weight = {wj.at(0).get<double>(), wj.at(1).get<double>()};
                } else {
                    atom.weight = {wj.get<double>(), 0.0};
                }
            } else {
                atom.weight = 1.0;
            }
            atoms.push_back(std::move(atom));
        }
        return ComplexMeasure::finite(std::move(atoms));
    }();

    return CylinderFunctional(std::move(basis), tuple, std::move(measure), kp);
}

namespace {

int write_or_print(const std::string& text, const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
        fallback << text;
        return exit_pass;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open output file '" + path + "'");
    }
    out << text;
    return exit_pass;
}

int table_command(const std::vector<CheckRow>& rows, const ExperimentConfig& cfg,
                  std::ostream& diag) {
    std::ostringstream csv;
    write_csv(csv, rows);
    write_or_print(csv.str(), cfg.output, diag);
    bool all_pass = true;
    for (const auto& r : rows) all_pass = all_pass && r.pass;
    return all_pass ? exit_pass : exit_error;
}

} // namespace

int run_sample(const ExperimentConfig& cfg, std::ostream& diag) {
    const KernelPair kp = cfg.make_kernel();
    // one CSV column per path; capped so --n meant for Monte Carlo counts
    // does not produce a gigabyte of columns
    const std::size_t paths = std::min<std::size_t>(cfg.n, 1024);
    std::vector<SamplePath> xs;
    xs.reserve(paths);
    for (std::size_t i = 0; i < paths; ++i) {
        RngStream rng(cfg.seed, i);
        xs.push_back(sample_gbmp(kp, rng));
    }
    std::ostringstream csv;
    csv << "t";
    for (std::size_t i = 0; i < paths; ++i) csv << ",x" << i;
    csv << '\n';
    for (std::size_t j = 0; j < kp.grid().node_count(); ++j) {
        csv << fmt_double(kp.grid().node(j));
        for (const auto& x : xs) csv << ',' << fmt_double(x.x[j]);
        csv << '\n';
    }
    return write_or_print(csv.str(), cfg.output, diag);
}

int run_paths_verify(const ExperimentConfig& cfg, std::ostream& diag) {
    const KernelPair kp = cfg.make_kernel();
    return table_command(paths_verify_table(kp, cfg.seed, cfg.n, cfg.workers), cfg, diag);
}

int run_verify_all(const ExperimentConfig& cfg, std::ostream& diag) {
    const KernelPair kp = cfg.make_kernel();
    return table_command(verify_all_table(kp, cfg.seed, cfg.n, cfg.workers), cfg, diag);
}

int run_closed_form_eval(const ExperimentConfig& cfg, const nlohmann::json& spec_json,
                         std::ostream& out) {
    const KernelPair kp = cfg.make_kernel();
    const MomentSpec spec = MomentSpec::from_json(spec_json, kp);
    const std::complex<double> value = eval_moment_spec(spec, kp);
    nlohmann::ordered_json j;
    j["kind"] = spec.kind;
    j["value"] = {{"re", value.real()}, {"im", value.imag()}};
    write_or_print(j.dump(2) + "\n", cfg.output, out);
    return exit_pass;
}

int run_feynman_eval(const ExperimentConfig& cfg, std::ostream& out) {
    if (!cfg.functional) {
        throw std::invalid_argument("config: 'functional' is required for feynman eval");
    }
    const KernelPair kp = cfg.make_kernel();
    PathsTuple tuple{cfg.tuple.empty() ? std::vector<double>{kp.horizon()} : cfg.tuple};
    const CylinderFunctional F = functional_from_json(*cfg.functional, tuple, kp);

    nlohmann::ordered_json j;
    int code = exit_pass;
    // q takes precedence over lambda when both are present
    if (cfg.q_value) {
        const FeynmanResult res = feynman_limit(F, *cfg.q_value, kp);
        j["q"] = *cfg.q_value;
        j["status"] = res.status == SeriesStatus::converged ? "converged"
                      : res.status == SeriesStatus::divergent ? "divergent"
                                                              : "indeterminate";
        j["value"] = {{"re", res.value.real()}, {"im", res.value.imag()}};
        j["ratio_limit"] = res.ratio_limit;
        j["atoms_used"] = res.atoms_used;
        if (res.status == SeriesStatus::divergent) code = exit_divergent;
    } else if (cfg.lambda_value) {
        const std::complex<double> v = analytic_J(F, *cfg.lambda_value, kp);
        j["lambda"] = {{"re", cfg.lambda_value->real()}, {"im", cfg.lambda_value->imag()}};
        j["value"] = {{"re", v.real()}, {"im", v.imag()}};
    } else {
        throw std::invalid_argument("config: feynman eval needs 'lambda' or 'q'");
    }
    write_or_print(j.dump(2) + "\n", cfg.output, out);
    return code;
}

int run_diverge_demo(const ExperimentConfig& cfg, std::ostream& out) {
    // drifted kernel with the drift sign flipped so (g, a) < 0
    const Grid grid = Grid::uniform(1.0, cfg.grid_m);
    const KernelPair flipped(grid,
                             [](double t) { return -t; }, [](double) { return -1.0; },
                             [](double t) { return t; }, [](double) { return 1.0; });
    const KernelPair wiener = KernelPair::preset("wiener", 1.0, cfg.grid_m);

    nlohmann::ordered_json j;
    int code = exit_pass;
    const double q = 1.0;
    for (const auto& [label, kp] : {std::pair<const char*, const KernelPair&>{"flipped_drift", flipped},
                                    {"wiener", wiener}}) {
        const CambElement beta = beta_kernel(kp.horizon(), kp);
        const std::vector<CambElement> basis = gram_schmidt(std::vector{beta}, kp);
        const PathsTuple tuple{{kp.horizon()}};
        const CylinderFunctional F(basis, tuple, ComplexMeasure::alpha_inverse_squares(), kp);
        const double ga = pair_with_a(basis[0], kp);
        const FeynmanResult res = feynman_limit(F, q, kp);

        nlohmann::ordered_json entry;
        entry["q"] = q;
        entry["basis_drift_pairing"] = ga;
        entry["expected_ratio_limit"] = std::exp(-ga / std::sqrt(2.0 * q));
        entry["ratio_limit"] = res.ratio_limit;
        entry["status"] = res.status == SeriesStatus::converged ? "converged"
                          : res.status == SeriesStatus::divergent ? "divergent"
                                                                  : "indeterminate";
        if (res.status == SeriesStatus::converged) {
            entry["value"] = {{"re", res.value.real()}, {"im", res.value.imag()}};
            entry["abs_value"] = std::abs(res.value);
        }
        entry["atoms_used"] = res.atoms_used;
        j[label] = entry;
        if (res.status == SeriesStatus::divergent) code = exit_divergent;
    }
    write_or_print(j.dump(2) + "\n", cfg.output, out);
    return code;
}

int run_contour(const ExperimentConfig& cfg, std::ostream& out) {
    const KernelPair kp = cfg.make_kernel();
    PathsTuple tuple{cfg.tuple.empty() ? std::vector<double>{kp.horizon()} : cfg.tuple};
    const CylinderFunctional F = [&] {
        if (cfg.functional) return functional_from_json(*cfg.functional, tuple, kp);
        const std::vector<CambElement> basis =
            gram_schmidt(std::vector{beta_kernel(kp.horizon(), kp)}, kp);
        std::vector<double> v(tuple.size(), 1.0);
        return CylinderFunctional(basis, tuple,
                                  ComplexMeasure::finite({Atom{v, 1.0}}), kp);
    }();
    const Rectangle rect{1.0, 2.0, -0.5, 0.5};
    const ContourReport rep = contour_analyticity_check(F, rect, kp);
    nlohmann::ordered_json j;
    j["rectangle"] = {{"re_lo", rect.re_lo}, {"re_hi", rect.re_hi},
                      {"im_lo", rect.im_lo}, {"im_hi", rect.im_hi}};
    j["integral"] = {{"re", rep.integral.real()}, {"im", rep.integral.imag()}};
    j["residual"] = rep.residual;
    j["evaluations"] = rep.evaluations;
    write_or_print(j.dump(2) + "\n", cfg.output, out);
    return exit_pass;
}

} // namespace gbmpath::runner
