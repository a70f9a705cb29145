#include "gbmpath/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace gbmpath {

namespace {

void check_paths_time(double s, const KernelPair& kp, const char* who) {
    if (!(s > 0.0 && s <= kp.horizon())) {
        throw std::domain_error(std::string(who) + ": s must lie in (0, T]");
    }
}

} // namespace

double mean_pwz(const CambElement& w, double s, const KernelPair& kp) {
    check_paths_time(s, kp, "mean_pwz");
    return pair_with_a(w, kp);
}

double second_moment_pwz(const CambElement& w, double s, const KernelPair& kp) {
    check_paths_time(s, kp, "second_moment_pwz");
    const double drift = pair_with_a(w, kp);
    return kp.b_at(s) * inner_camb(w, w, kp) + drift * drift;
}

double cross_pwz(const CambElement& w1, double s1,
                 const CambElement& w2, double s2, const KernelPair& kp) {
    check_paths_time(s1, kp, "cross_pwz");
    check_paths_time(s2, kp, "cross_pwz");
    const double b_min = std::min(kp.b_at(s1), kp.b_at(s2));
    return b_min * inner_camb(w1, w2, kp) +
           pair_with_a(w1, kp) * pair_with_a(w2, kp);
}

std::complex<double> char_single(const CambElement& w, double rho, double s,
                                 const KernelPair& kp) {
    check_paths_time(s, kp, "char_single");
    const double norm2 = inner_camb(w, w, kp);
    const double drift = pair_with_a(w, kp);
    return std::exp(std::complex<double>(-0.5 * rho * rho * kp.b_at(s) * norm2,
                                         rho * drift));
}

std::complex<double> char_multi(std::span<const CambElement> ws, double rho,
                                const PathsTuple& tuple, const KernelPair& kp) {
    validate_tuple(tuple, kp);
    const std::size_t n = tuple.size();
    if (ws.size() != n) {
        throw std::invalid_argument("char_multi: ws length != tuple size");
    }
    // sum_k (b(s_k) - b(s_{k-1}))/2 ||sum_{l>=k} w_l||^2, built from the tail
    double quad = 0.0;
    CambElement tail = camb_zero(kp);
    std::vector<double> db(n);
    double b_prev = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double b_cur = kp.b_at(tuple.s[k]);
        db[k] = b_cur - b_prev;
        b_prev = b_cur;
    }
    double drift = 0.0;
    for (std::size_t k = n; k-- > 0;) {
        tail = camb_axpby(1.0, tail, 1.0, ws[k]);
        quad += 0.5 * db[k] * inner_camb(tail, tail, kp);
        drift += pair_with_a(ws[k], kp);
    }
    return std::exp(std::complex<double>(-rho * rho * quad, rho * drift));
}

double point_product(double s1, double t1, double s2, double t2,
                     const KernelPair& kp) {
    check_paths_time(s1, kp, "point_product");
    check_paths_time(s2, kp, "point_product");
    const double b_s = std::min(kp.b_at(s1), kp.b_at(s2));
    const double b_t = std::min(kp.b_at(t1), kp.b_at(t2));
    return b_s * b_t + kp.a_at(t1) * kp.a_at(t2);
}

CambElement camb_from_json(const nlohmann::json& j, const KernelPair& kp) {
    if (j.contains("beta")) {
        return beta_kernel(j.at("beta").get<double>(), kp);
    }
    if (j.contains("combination")) {
        CambElement acc = camb_zero(kp);
        for (const auto& term : j.at("combination")) {
            if (!term.is_array() || term.size() != 2) {
                throw std::invalid_argument(
                    "element spec: combination entries must be [coef, t] pairs");
            }
            const double coef = term[0].get<double>();
            const double t = term[1].get<double>();
            acc = camb_axpby(1.0, acc, coef, beta_kernel(t, kp));
        }
        return acc;
    }
    throw std::invalid_argument("element spec: expected 'beta' or 'combination'");
}

MomentSpec MomentSpec::from_json(const nlohmann::json& j, const KernelPair& kp) {
    MomentSpec spec;
    spec.kind = j.at("kind").get<std::string>();
    if (j.contains("w")) spec.ws.push_back(camb_from_json(j.at("w"), kp));
    if (j.contains("ws")) {
        for (const auto& wj : j.at("ws")) spec.ws.push_back(camb_from_json(wj, kp));
    }
    if (j.contains("s")) {
        const auto& sj = j.at("s");
        if (sj.is_array()) spec.s = sj.get<std::vector<double>>();
        else spec.s.push_back(sj.get<double>());
    }
    if (j.contains("t")) spec.t = j.at("t").get<std::vector<double>>();
    if (j.contains("rho")) spec.rho = j.at("rho").get<double>();
    return spec;
}

std::complex<double> eval_moment_spec(const MomentSpec& spec, const KernelPair& kp) {
    if (spec.kind == "mean_pwz") {
        return mean_pwz(spec.ws.at(0), spec.s.at(0), kp);
    }
    if (spec.kind == "second_moment_pwz") {
        return second_moment_pwz(spec.ws.at(0), spec.s.at(0), kp);
    }
    if (spec.kind == "cross_pwz") {
        return cross_pwz(spec.ws.at(0), spec.s.at(0), spec.ws.at(1), spec.s.at(1), kp);
    }
    if (spec.kind == "char_single") {
        return char_single(spec.ws.at(0), spec.rho, spec.s.at(0), kp);
    }
    if (spec.kind == "char_multi") {
        PathsTuple tuple{spec.s};
        return char_multi(spec.ws, spec.rho, tuple, kp);
    }
    if (spec.kind == "point_product") {
        return point_product(spec.s.at(0), spec.t.at(0), spec.s.at(1), spec.t.at(1), kp);
    }
    throw std::invalid_argument("eval_moment_spec: unknown kind '" + spec.kind + "'");
}

} // namespace gbmpath
