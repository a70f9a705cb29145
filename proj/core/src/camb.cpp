#include "gbmpath/camb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gbmpath {

double stieltjes_integral(std::span<const double> f, std::span<const double> g) {
    if (f.size() != g.size()) {
        throw std::invalid_argument("stieltjes_integral: grid length mismatch");
    }
    double acc = 0.0;
    for (std::size_t j = 1; j < f.size(); ++j) {
        acc += 0.5 * (f[j - 1] + f[j]) * (g[j] - g[j - 1]);
    }
    return acc;
}

namespace {

std::vector<double> accumulate_against_b(const std::vector<double>& z,
                                         const KernelPair& kp) {
    std::vector<double> w(z.size() + 1);
    w[0] = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        w[i + 1] = w[i] + z[i] * kp.delta_b(i);
    }
    return w;
}

void check_sizes(const CambElement& e, const KernelPair& kp, const char* who) {
    if (e.z.size() != kp.intervals() || e.w.size() != kp.grid().node_count()) {
        throw std::invalid_argument(std::string(who) + ": element/grid size mismatch");
    }
}

} // namespace

CambElement camb_from_density(std::vector<double> z, const KernelPair& kp) {
    if (z.size() != kp.intervals()) {
        throw std::invalid_argument("camb_from_density: density length != interval count");
    }
    CambElement e;
    e.w = accumulate_against_b(z, kp);
    e.z = std::move(z);
    return e;
}

CambElement camb_from_density_fn(const std::function<double(double)>& z,
                                 const KernelPair& kp) {
    const Grid& grid = kp.grid();
    std::vector<double> zi(kp.intervals());
    double prev = z(grid.node(0));
    for (std::size_t i = 0; i < zi.size(); ++i) {
        const double next = z(grid.node(i + 1));
        zi[i] = 0.5 * (prev + next);
        prev = next;
    }
    return camb_from_density(std::move(zi), kp);
}

CambElement camb_zero(const KernelPair& kp) {
    CambElement e;
    e.z.assign(kp.intervals(), 0.0);
    e.w.assign(kp.grid().node_count(), 0.0);
    return e;
}

CambElement beta_kernel(double t, const KernelPair& kp) {
    if (!(t >= 0.0 && t <= kp.horizon())) {
        throw std::domain_error("beta_kernel: t outside [0, T]");
    }
    const std::size_t k = kp.grid().nearest_node(t);
    std::vector<double> z(kp.intervals(), 0.0);
    for (std::size_t i = 0; i < k; ++i) z[i] = 1.0;
    return camb_from_density(std::move(z), kp);
}

CambElement drift_element(const KernelPair& kp) {
    std::vector<double> z(kp.intervals());
    for (std::size_t i = 0; i < z.size(); ++i) {
        z[i] = kp.delta_a(i) / kp.delta_b(i);
    }
    return camb_from_density(std::move(z), kp);
}

CambElement camb_axpby(double alpha, const CambElement& x,
                       double beta, const CambElement& y) {
    if (x.z.size() != y.z.size() || x.w.size() != y.w.size()) {
        throw std::invalid_argument("camb_axpby: element size mismatch");
    }
    CambElement out;
    out.z.resize(x.z.size());
    out.w.resize(x.w.size());
    for (std::size_t i = 0; i < x.z.size(); ++i) {
        out.z[i] = alpha * x.z[i] + beta * y.z[i];
    }
    for (std::size_t i = 0; i < x.w.size(); ++i) {
        out.w[i] = alpha * x.w[i] + beta * y.w[i];
    }
    return out;
}

double inner_camb(const CambElement& w1, const CambElement& w2, const KernelPair& kp) {
    check_sizes(w1, kp, "inner_camb");
    check_sizes(w2, kp, "inner_camb");
    double acc = 0.0;
    for (std::size_t i = 0; i < kp.intervals(); ++i) {
        acc += w1.z[i] * w2.z[i] * kp.delta_b(i);
    }
    return acc;
}

double camb_norm(const CambElement& w, const KernelPair& kp) {
    return std::sqrt(inner_camb(w, w, kp));
}

double pair_with_a(const CambElement& w, const KernelPair& kp) {
    check_sizes(w, kp, "pair_with_a");
    double acc = 0.0;
    for (std::size_t i = 0; i < kp.intervals(); ++i) {
        acc += w.z[i] * kp.delta_a(i);
    }
    return acc;
}

double reproduce(const CambElement& w, double t, const KernelPair& kp) {
    return inner_camb(w, beta_kernel(t, kp), kp);
}

std::vector<CambElement> gram_schmidt(std::span<const CambElement> ws,
                                      const KernelPair& kp) {
    if (ws.empty()) {
        throw std::invalid_argument("gram_schmidt: empty input");
    }
    double max_norm = 0.0;
    for (const auto& w : ws) max_norm = std::max(max_norm, camb_norm(w, kp));
    if (max_norm == 0.0) {
        throw std::runtime_error("gram_schmidt: all inputs numerically zero");
    }
    const double drop_tol = 1e-12 * max_norm;

    std::vector<CambElement> out;
    out.reserve(ws.size());
    for (const auto& w : ws) {
        CambElement v = w;
        // two MGS passes; the second repairs cancellation against nearly
        // dependent inputs like overlapping beta kernels
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& g : out) {
                const double c = inner_camb(v, g, kp);
                v = camb_axpby(1.0, v, -c, g);
            }
        }
        const double nrm = camb_norm(v, kp);
        if (nrm <= drop_tol) continue;
        out.push_back(camb_axpby(1.0 / nrm, v, 0.0, camb_zero(kp)));
    }
    if (out.empty()) {
        throw std::runtime_error("gram_schmidt: no element survived the drop tolerance");
    }
    return out;
}

} // namespace gbmpath
