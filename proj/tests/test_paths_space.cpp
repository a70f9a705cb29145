#include <doctest.h>

#include <cmath>
#include <vector>

#include "gbmpath/closed_form.hpp"
#include "gbmpath/paths_space.hpp"

using namespace gbmpath;

namespace {

SamplePath constant_shift(const KernelPair& kp, double c) {
    SamplePath p;
    p.x.resize(kp.grid().node_count());
    for (std::size_t j = 0; j < p.x.size(); ++j) p.x[j] = kp.a()[j] + c;
    return p;
}

SamplePath drift_path(const KernelPair& kp) { return constant_shift(kp, 0.0); }

} // namespace

TEST_CASE("tuple validation") {
    const KernelPair kp = KernelPair::preset("wiener", 1.0, 64);
    CHECK_THROWS_AS(validate_tuple(PathsTuple{{}}, kp), std::invalid_argument);
    CHECK_THROWS_AS(validate_tuple(PathsTuple{{0.0, 0.5}}, kp), std::invalid_argument);
    CHECK_THROWS_AS(validate_tuple(PathsTuple{{0.5, 0.5}}, kp), std::invalid_argument);
    CHECK_THROWS_AS(validate_tuple(PathsTuple{{0.5, 1.5}}, kp), std::invalid_argument);
    CHECK_NOTHROW(validate_tuple(PathsTuple{{0.25, 1.0}}, kp));
}

TEST_CASE("transform of the deterministic mean path is the mean path") {
    const KernelPair kp = KernelPair::preset("curved", 1.0, 64);
    const std::vector<SamplePath> xs = {drift_path(kp)};
    const PathsSection sec = transform_T(xs, PathsTuple{{0.5}}, kp);
    for (std::size_t j = 0; j < kp.grid().node_count(); ++j) {
        CHECK(sec.sections[0].x[j] == kp.a()[j]);
    }
}

TEST_CASE("wiener transform at s = 1 is the identity") {
    const KernelPair kp = KernelPair::preset("wiener", 1.0, 64);
    RngStream rng(4, 0);
    const std::vector<SamplePath> xs = {sample_gbmp(kp, rng)};
    const PathsSection sec = transform_T(xs, PathsTuple{{1.0}}, kp);
    for (std::size_t j = 0; j < kp.grid().node_count(); ++j) {
        CHECK(sec.sections[0].x[j] == xs[0].x[j]);
    }
}

TEST_CASE("transform coefficients for a two-time tuple") {
    const KernelPair kp = KernelPair::preset("wiener", 1.0, 64);
    const PathsTuple tuple{{0.25, 1.0}};
    // probe the affine map with unit bumps in the (x - a) coordinates
    const PathsSection bump1 =
        transform_T(std::vector{constant_shift(kp, 1.0), drift_path(kp)}, tuple, kp);
    const PathsSection bump2 =
        transform_T(std::vector{drift_path(kp), constant_shift(kp, 1.0)}, tuple, kp);
    CHECK(bump1.sections[1].x[10] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(bump2.sections[1].x[10]
          == doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));
    CHECK(bump2.sections[1].x[10]
          == doctest::Approx(0.8660254037844386).epsilon(1e-12));
    CHECK(bump2.sections[0].x[10] == 0.0); // x_2 does not enter section 1
}

TEST_CASE("transform is affine in the centered coordinates") {
    const KernelPair kp = KernelPair::preset("drifted", 1.0, 64);
    const PathsTuple tuple{{0.3, 0.8}};
    RngStream rng(6, 0);
    std::vector<SamplePath> xs = {sample_gbmp(kp, rng), sample_gbmp(kp, rng)};
    std::vector<SamplePath> ys = {sample_gbmp(kp, rng), sample_gbmp(kp, rng)};
    const double lam = 0.31;
    std::vector<SamplePath> mix(2);
    for (int l = 0; l < 2; ++l) {
        mix[l].x.resize(xs[l].x.size());
        for (std::size_t j = 0; j < mix[l].x.size(); ++j) {
            const double a = kp.a()[j];
            mix[l].x[j] = a + lam * (xs[l].x[j] - a) + (1.0 - lam) * (ys[l].x[j] - a);
        }
    }
    const PathsSection tx = transform_T(xs, tuple, kp);
    const PathsSection ty = transform_T(ys, tuple, kp);
    const PathsSection tm = transform_T(mix, tuple, kp);
    for (int k = 0; k < 2; ++k) {
        for (std::size_t j = 0; j < tm.sections[k].x.size(); j += 13) {
            const double a = kp.a()[j];
            const double combo = a + lam * (tx.sections[k].x[j] - a) +
                                 (1.0 - lam) * (ty.sections[k].x[j] - a);
            CHECK(tm.sections[k].x[j] == doctest::Approx(combo).epsilon(1e-12));
        }
    }
}

TEST_CASE("sampled sections vanish at time zero") {
    const KernelPair kp = KernelPair::preset("curved", 1.0, 64);
    RngStream rng(23, 0);
    const PathsSection sec = sample_section(PathsTuple{{0.3, 0.7, 1.0}}, kp, rng);
    for (const auto& s : sec.sections) CHECK(s.x[0] == 0.0);
}

TEST_CASE("section moments match the single-time marginal") {
    const KernelPair kp = KernelPair::preset("drifted", 1.0, 64);
    const PathsTuple tuple{{0.6}};
    const std::size_t node = 48;
    const double t = kp.grid().node(node);
    const std::size_t n = 40000;

    double sum = 0.0, sumsq = 0.0, sumc2 = 0.0, sumc4 = 0.0;
    const double a_t = kp.a_at(t);
    for (std::size_t i = 0; i < n; ++i) {
        RngStream rng(17, i);
        const PathsSection sec = sample_section(tuple, kp, rng);
        const double v = sec.sections[0].x[node];
        sum += v;
        sumsq += v * v;
        const double c = v - a_t;
        sumc2 += c * c;
        sumc4 += c * c * c * c;
    }
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    const double mean_se = std::sqrt((sumsq / nn - mean * mean) / nn);
    CHECK(std::fabs(mean - a_t) <= 4.0 * mean_se);

    // Var[X(s)(t)] = b(s) b(t); SE of the centered second moment from its
    // fourth moment
    const double m2 = sumc2 / nn;
    const double se_m2 = std::sqrt((sumc4 / nn - m2 * m2) / nn);
    CHECK(std::fabs(m2 - kp.b_at(tuple.s[0]) * kp.b_at(t)) <= 4.0 * se_m2);
}

TEST_CASE("two-time point products on the wiener kernel") {
    const KernelPair kp = KernelPair::preset("wiener", 1.0, 64);
    const PathsTuple tuple{{0.4, 0.9}};
    const std::size_t n1 = 16, n2 = 56;
    const double t1 = kp.grid().node(n1), t2 = kp.grid().node(n2);
    const std::size_t n = 40000;
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        RngStream rng(18, i);
        const PathsSection sec = sample_section(tuple, kp, rng);
        const double v = sec.sections[0].x[n1] * sec.sections[1].x[n2];
        sum += v;
        sumsq += v * v;
    }
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    const double se = std::sqrt((sumsq / nn - mean * mean) / nn);
    const double expected = std::min(tuple.s[0], tuple.s[1]) * std::min(t1, t2);
    CHECK(std::fabs(mean - expected) <= 4.0 * se);
}

TEST_CASE("polygonal path properties") {
    const KernelPair kp = KernelPair::preset("wiener", 1.0, 64);
    const PathsTuple tuple{{0.4, 0.8}};
    RngStream rng(5, 9);
    const std::vector<SamplePath> xs = {sample_gbmp(kp, rng), sample_gbmp(kp, rng)};

    // section property: H passes through the inputs exactly
    for (std::size_t k = 0; k < tuple.size(); ++k) {
        const SamplePath at_knot = polygonal_H(xs, tuple, kp, tuple.s[k]);
        for (std::size_t j = 0; j < at_knot.x.size(); ++j) {
            CHECK(at_knot.x[j] == xs[k].x[j]);
        }
    }

    const SamplePath at_zero = polygonal_H(xs, tuple, kp, 0.0);
    for (double v : at_zero.x) CHECK(v == 0.0);

    // linear b makes the b-interpolation an arithmetic midpoint
    const SamplePath mid = polygonal_H(xs, tuple, kp, 0.6);
    for (std::size_t j = 0; j < mid.x.size(); j += 11) {
        CHECK(mid.x[j]
              == doctest::Approx(0.5 * (xs[0].x[j] + xs[1].x[j])).epsilon(1e-12));
    }

    // constant on [s_n, T]
    const SamplePath late = polygonal_H(xs, tuple, kp, 0.95);
    for (std::size_t j = 0; j < late.x.size(); ++j) CHECK(late.x[j] == xs[1].x[j]);

    CHECK_THROWS_AS(polygonal_H(xs, tuple, kp, 1.5), std::domain_error);
}

TEST_CASE("monte carlo integrator basics") {
    const KernelPair kp = KernelPair::preset("drifted", 1.0, 64);
    const PathsTuple tuple{{0.7}};

    const McEstimate one = mc_paths_integral(
        [](const PathsSection&) { return std::complex<double>(1.0, 0.0); },
        tuple, kp, 5000, 42, 0);
    CHECK(one.mean.real() == 1.0);
    CHECK(one.mean.imag() == 0.0);
    CHECK(one.stderr_re == 0.0);
    CHECK(one.n == 5000);
    CHECK(one.n_nonfinite == 0);

    const CambElement w = beta_kernel(0.5, kp);
    const McEstimate mean_est = mc_paths_integral(
        [&](const PathsSection& sec) {
            return std::complex<double>(pwz(w, sec.sections[0]), 0.0);
        },
        tuple, kp, 50000, 42, 1ull << 32);
    CHECK(std::fabs(mean_est.mean.real() - mean_pwz(w, tuple.s[0], kp))
          <= 4.0 * mean_est.stderr_re);

    const double rho = 0.8;
    const McEstimate char_est = mc_paths_integral(
        [&](const PathsSection& sec) {
            return std::exp(std::complex<double>(0.0, rho * pwz(w, sec.sections[0])));
        },
        tuple, kp, 50000, 42, 2ull << 32);
    const std::complex<double> closed = char_single(w, rho, tuple.s[0], kp);
    CHECK(std::fabs(char_est.mean.real() - closed.real()) <= 4.0 * char_est.stderr_re);
    CHECK(std::fabs(char_est.mean.imag() - closed.imag()) <= 4.0 * char_est.stderr_im);
}

TEST_CASE("monte carlo results do not depend on the worker split") {
    const KernelPair kp = KernelPair::preset("wiener", 1.0, 64);
    const PathsTuple tuple{{0.5}};
    const CambElement w = beta_kernel(1.0, kp);
    const PathsFunctional f = [&](const PathsSection& sec) {
        return std::complex<double>(pwz(w, sec.sections[0]), 0.0);
    };
    const McEstimate serial = mc_paths_integral(f, tuple, kp, 20000, 9, 0, 1);
    const McEstimate threaded = mc_paths_integral(f, tuple, kp, 20000, 9, 0, 4);
    CHECK(serial.mean.real() == doctest::Approx(threaded.mean.real()).epsilon(1e-12));
    CHECK(serial.n == threaded.n);
}

TEST_CASE("non-finite functional values are flagged, not fatal") {
    const KernelPair kp = KernelPair::preset("wiener", 1.0, 64);
    const PathsTuple tuple{{0.5}};
    const CambElement w = beta_kernel(1.0, kp);
    const McEstimate est = mc_paths_integral(
        [&](const PathsSection& sec) {
            // log of a Gaussian is NaN about half the time
            return std::complex<double>(std::log(pwz(w, sec.sections[0])), 0.0);
        },
        tuple, kp, 4000, 42, 0);
    CHECK(est.n_nonfinite > 1000);
    CHECK(est.n + est.n_nonfinite == 4000);
    CHECK(est.nonfinite_warning);
    CHECK(std::isfinite(est.mean.real()));
}

TEST_CASE("jacobian determinant identity") {
    const KernelPair kp = KernelPair::preset("wiener", 1.0, 64);

    const std::vector<double> point1 = {0.3};
    const auto rep1 = jacobian_check(std::vector<double>{0.25}, kp, point1);
    CHECK(rep1.det_closed == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep1.rel_error <= 1e-6);

    const std::vector<double> point2 = {0.3, -0.6};
    const auto rep2 = jacobian_check(std::vector<double>{0.25, 1.0}, kp, point2);
    CHECK(rep2.det_closed == doctest::Approx(0.4330127018922193).epsilon(1e-12));
    CHECK(rep2.rel_error <= 1e-6);

    // affine map: the determinant does not depend on the expansion point
    const KernelPair curved = KernelPair::preset("curved", 1.0, 64);
    const std::vector<double> times = {0.2, 0.5, 0.75, 1.0};
    const std::vector<double> p1 = {0.1, -0.4, 2.0, 0.7};
    const std::vector<double> p2 = {-1.2, 0.9, -0.3, 1.5};
    const auto ra = jacobian_check(times, curved, p1);
    const auto rb = jacobian_check(times, curved, p2);
    CHECK(ra.det_fd == doctest::Approx(rb.det_fd).epsilon(1e-10));

    CHECK_THROWS_AS(jacobian_check(std::vector<double>{}, kp, std::vector<double>{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(jacobian_check(std::vector<double>{0.5, 0.25}, kp, point2),
                    std::invalid_argument);
}
