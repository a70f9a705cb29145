#include "gbmpath/paths_space.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace gbmpath {

void validate_tuple(const PathsTuple& tuple, const KernelPair& kp) {
    if (tuple.s.empty()) {
        throw std::invalid_argument("PathsTuple: empty tuple");
    }
    double prev = 0.0;
    for (double s : tuple.s) {
        if (!(s > prev)) {
            throw std::invalid_argument("PathsTuple: times must satisfy 0 < s_1 < ... < s_n");
        }
        prev = s;
    }
    if (!(tuple.s.back() <= kp.horizon())) {
        throw std::invalid_argument("PathsTuple: s_n exceeds the horizon");
    }
}

namespace {

std::vector<double> tuple_sqrt_increments(const PathsTuple& tuple, const KernelPair& kp) {
    std::vector<double> c(tuple.size());
    double b_prev = 0.0;
    for (std::size_t l = 0; l < tuple.size(); ++l) {
        const double b_cur = kp.b_at(tuple.s[l]);
        c[l] = std::sqrt(b_cur - b_prev);
        b_prev = b_cur;
    }
    return c;
}

} // namespace

PathsSection transform_T(std::span<const SamplePath> xs, const PathsTuple& tuple,
                         const KernelPair& kp) {
    validate_tuple(tuple, kp);
    if (xs.size() != tuple.size()) {
        throw std::invalid_argument("transform_T: path count != tuple size");
    }
    const std::size_t nodes = kp.grid().node_count();
    for (const auto& x : xs) {
        if (x.x.size() != nodes) {
            throw std::invalid_argument("transform_T: path not on the kernel grid");
        }
    }
    const std::vector<double> coef = tuple_sqrt_increments(tuple, kp);
    const auto a = kp.a();

    PathsSection out;
    out.tuple = tuple;
    out.sections.resize(tuple.size());
    std::vector<double> acc(nodes, 0.0); // running sum of coef_l (x_l - a)
    for (std::size_t k = 0; k < tuple.size(); ++k) {
        auto& sec = out.sections[k];
        sec.x.resize(nodes);
        for (std::size_t j = 0; j < nodes; ++j) {
            acc[j] += coef[k] * (xs[k].x[j] - a[j]);
            sec.x[j] = acc[j] + a[j];
        }
    }
    return out;
}

PathsSection sample_section(const PathsTuple& tuple, const KernelPair& kp,
                            RngStream& rng) {
    validate_tuple(tuple, kp);
    std::vector<SamplePath> xs(tuple.size());
    for (auto& x : xs) x = sample_gbmp(kp, rng);
    return transform_T(xs, tuple, kp);
}

PathsSection scale_section(const PathsSection& sec, double rho) {
    PathsSection out;
    out.tuple = sec.tuple;
    out.sections.reserve(sec.sections.size());
    for (const auto& s : sec.sections) out.sections.push_back(scale_path(s, rho));
    return out;
}

SamplePath polygonal_H(std::span<const SamplePath> xs, const PathsTuple& tuple,
                       const KernelPair& kp, double s) {
    validate_tuple(tuple, kp);
    if (xs.size() != tuple.size()) {
        throw std::invalid_argument("polygonal_H: path count != tuple size");
    }
    if (!(s >= 0.0 && s <= kp.horizon())) {
        throw std::domain_error("polygonal_H: s outside [0, T]");
    }
    const std::size_t nodes = kp.grid().node_count();
    SamplePath out;
    if (s == 0.0) {
        out.x.assign(nodes, 0.0);
        return out;
    }
    // the polygonal path passes through the knots
    for (std::size_t k = 0; k < tuple.size(); ++k) {
        if (s == tuple.s[k]) return xs[k];
    }
    if (s >= tuple.s.back()) return xs.back();

    std::size_t j = 0;
    while (tuple.s[j] < s) ++j; // s in (s_{j-1}, s_j)
    const double b_lo = (j == 0) ? 0.0 : kp.b_at(tuple.s[j - 1]);
    const double b_hi = kp.b_at(tuple.s[j]);
    const double frac = (kp.b_at(s) - b_lo) / (b_hi - b_lo);

    out.x.resize(nodes);
    if (j == 0) {
        for (std::size_t i = 0; i < nodes; ++i) out.x[i] = frac * xs[0].x[i];
    } else {
        const auto& lo = xs[j - 1].x;
        const auto& hi = xs[j].x;
        for (std::size_t i = 0; i < nodes; ++i) {
            out.x[i] = lo[i] + frac * (hi[i] - lo[i]);
        }
    }
    return out;
}

namespace {

struct ShardAccum {
    double sum_re = 0.0, sum_im = 0.0;
    double sumsq_re = 0.0, sumsq_im = 0.0;
    std::size_t n = 0;
    std::size_t nonfinite = 0;
};

ShardAccum run_shard(const PathsFunctional& f, const PathsTuple& tuple,
                     const KernelPair& kp, std::uint64_t seed,
                     std::uint64_t stream_base, std::size_t first, std::size_t last) {
    ShardAccum acc;
    for (std::size_t i = first; i < last; ++i) {
        RngStream rng(seed, stream_base + i);
        const PathsSection sec = sample_section(tuple, kp, rng);
        const std::complex<double> v = f(sec);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            ++acc.nonfinite;
            continue;
        }
        acc.sum_re += v.real();
        acc.sum_im += v.imag();
        acc.sumsq_re += v.real() * v.real();
        acc.sumsq_im += v.imag() * v.imag();
        ++acc.n;
    }
    return acc;
}

} // namespace

McEstimate mc_paths_integral(const PathsFunctional& f, const PathsTuple& tuple,
                             const KernelPair& kp, std::size_t n_samples,
                             std::uint64_t seed, std::uint64_t stream_base,
                             unsigned workers) {
    validate_tuple(tuple, kp);
    if (n_samples < 1) {
        throw std::invalid_argument("mc_paths_integral: need at least one sample");
    }
    if (workers == 0) workers = 1;

    std::vector<ShardAccum> partial(workers);
    if (workers == 1) {
        partial[0] = run_shard(f, tuple, kp, seed, stream_base, 0, n_samples);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned wi = 0; wi < workers; ++wi) {
            const std::size_t first = n_samples * wi / workers;
            const std::size_t last = n_samples * (wi + 1) / workers;
            pool.emplace_back([&, wi, first, last] {
                partial[wi] = run_shard(f, tuple, kp, seed, stream_base, first, last);
            });
        }
        for (auto& th : pool) th.join();
    }

    ShardAccum total;
    for (const auto& p : partial) { // fixed combination order
        total.sum_re += p.sum_re;
        total.sum_im += p.sum_im;
        total.sumsq_re += p.sumsq_re;
        total.sumsq_im += p.sumsq_im;
        total.n += p.n;
        total.nonfinite += p.nonfinite;
    }

    McEstimate est;
    est.n = total.n;
    est.n_nonfinite = total.nonfinite;
    est.nonfinite_warning =
        total.nonfinite > 0 &&
        static_cast<double>(total.nonfinite) > 0.001 * static_cast<double>(n_samples);
    if (total.n == 0) {
        est.mean = {std::nan(""), std::nan("")};
        return est;
    }
    const double n = static_cast<double>(total.n);
    const double mean_re = total.sum_re / n;
    const double mean_im = total.sum_im / n;
    est.mean = {mean_re, mean_im};
    if (total.n > 1) {
        const double var_re = std::max(0.0, (total.sumsq_re - n * mean_re * mean_re) / (n - 1.0));
        const double var_im = std::max(0.0, (total.sumsq_im - n * mean_im * mean_im) / (n - 1.0));
        est.stderr_re = std::sqrt(var_re / n);
        est.stderr_im = std::sqrt(var_im / n);
    }
    return est;
}

namespace {

// |det| by Gaussian elimination with partial pivoting; n <= 8 so no library.
double abs_det(std::vector<std::vector<double>>& m) {
    const std::size_t n = m.size();
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
        }
        if (m[piv][col] == 0.0) return 0.0;
        if (piv != col) std::swap(m[piv], m[col]);
        det *= m[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double fac = m[r][col] / m[col][col];
            for (std::size_t c = col; c < n; ++c) m[r][c] -= fac * m[col][c];
        }
    }
    return std::fabs(det);
}

} // namespace

JacobianReport jacobian_check(std::span<const double> state_times,
                              const KernelPair& kp,
                              std::span<const double> point) {
    const std::size_t n = state_times.size();
    if (n == 0 || n > 8) {
        throw std::invalid_argument("jacobian_check: need 1 <= n <= 8 times");
    }
    if (point.size() != n) {
        throw std::invalid_argument("jacobian_check: point dimension != n");
    }
    double prev = 0.0;
    for (double t : state_times) {
        if (!(t > prev)) {
            throw std::invalid_argument("jacobian_check: times must be strictly increasing from 0");
        }
        prev = t;
    }
    if (!(state_times.back() <= kp.horizon())) {
        throw std::invalid_argument("jacobian_check: time exceeds the horizon");
    }

    // u_k(w) = sum_{l<=k} sqrt(b(t_l)-b(t_{l-1})) (w_l - a(t_l)) + a(t_k)
    std::vector<double> coef(n), a_at(n);
    double b_prev = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        const double b_cur = kp.b_at(state_times[l]);
        coef[l] = std::sqrt(b_cur - b_prev);
        b_prev = b_cur;
        a_at[l] = kp.a_at(state_times[l]);
    }
    const auto apply = [&](std::span<const double> w, std::vector<double>& u) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            acc += coef[k] * (w[k] - a_at[k]);
            u[k] = acc + a_at[k];
        }
    };

    std::vector<std::vector<double>> jac(n, std::vector<double>(n));
    std::vector<double> wp(point.begin(), point.end());
    std::vector<double> wm(point.begin(), point.end());
    std::vector<double> up(n), um(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double h = 1e-5 * (1.0 + std::fabs(point[i]));
        wp[i] = point[i] + h;
        wm[i] = point[i] - h;
        apply(wp, up);
        apply(wm, um);
        for (std::size_t k = 0; k < n; ++k) {
            jac[k][i] = (up[k] - um[k]) / (2.0 * h);
        }
        wp[i] = point[i];
        wm[i] = point[i];
    }

    JacobianReport rep;
    rep.det_fd = abs_det(jac);
    rep.det_closed = 1.0;
    for (double c : coef) rep.det_closed *= c;
    rep.rel_error = std::fabs(rep.det_fd - rep.det_closed) / rep.det_closed;
    return rep;
}

} // namespace gbmpath
