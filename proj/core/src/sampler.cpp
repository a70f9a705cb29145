#include "gbmpath/sampler.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace gbmpath {

SamplePath sample_gbmp(const KernelPair& kp, RngStream& rng) {
    SamplePath path;
    path.x.resize(kp.grid().node_count());
    path.x[0] = 0.0;
    for (std::size_t i = 0; i < kp.intervals(); ++i) {
        const double incr = kp.delta_a(i) + std::sqrt(kp.delta_b(i)) * rng.normal();
        path.x[i + 1] = path.x[i] + incr;
    }
    return path;
}

double pwz(const CambElement& w, const SamplePath& x) {
    if (w.z.size() + 1 != x.x.size()) {
        throw std::invalid_argument("pwz: element and path live on different grids");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < w.z.size(); ++i) {
        acc += w.z[i] * (x.x[i + 1] - x.x[i]);
    }
    return acc;
}

SamplePath scale_path(const SamplePath& x, double rho) {
    SamplePath out;
    out.x.resize(x.x.size());
    for (std::size_t i = 0; i < x.x.size(); ++i) out.x[i] = rho * x.x[i];
    return out;
}

nlohmann::json CharFunctionalReport::to_json() const {
    nlohmann::json j;
    j["estimate"] = estimate;
    j["closed_form"] = closed_form;
    j["stderr"] = std_error;
    j["z_score"] = z_score;
    j["n"] = n;
    j["seed"] = seed;
    j["stream"] = stream_id;
    j["pass"] = pass;
    return j;
}

CharFunctionalReport verify_char_functional(const CambElement& w, double rho,
                                            const KernelPair& kp,
                                            std::size_t n_samples,
                                            RngStream rng) {
    if (n_samples < 2) {
        throw std::invalid_argument("verify_char_functional: need at least 2 samples");
    }
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const SamplePath x = sample_gbmp(kp, rng);
        const double v = std::exp(rho * pwz(w, x));
        sum += v;
        sumsq += v * v;
    }
    const double n = static_cast<double>(n_samples);
    const double mean = sum / n;
    const double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0));
    const double se = std::sqrt(var / n);

    const double norm2 = inner_camb(w, w, kp);
    const double drift = pair_with_a(w, kp);

    CharFunctionalReport rep;
    rep.estimate = mean;
    rep.closed_form = std::exp(0.5 * rho * rho * norm2 + rho * drift);
    rep.std_error = se;
    rep.z_score = (se > 0.0) ? (mean - rep.closed_form) / se : 0.0;
    rep.n = n_samples;
    rep.seed = rng.seed();
    rep.stream_id = rng.stream_id();
    rep.pass = std::fabs(rep.estimate - rep.closed_form) <= 4.0 * se ||
               rep.estimate == rep.closed_form;
    return rep;
}

} // namespace gbmpath
