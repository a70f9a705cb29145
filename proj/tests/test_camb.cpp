#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gbmpath/camb.hpp"
#include "gbmpath/rng.hpp"

using namespace gbmpath;

namespace {

CambElement random_element(const KernelPair& kp, RngStream& rng) {
    std::vector<double> z(kp.intervals());
    for (auto& v : z) v = 2.0 * rng.uniform() - 1.0;
    return camb_from_density(std::move(z), kp);
}

} // namespace

TEST_CASE("stieltjes quadrature examples") {
    const Grid g100 = Grid::uniform(1.0, 100);
    std::vector<double> ones(g100.node_count(), 1.0);
    // f = 1 against g = b = t telescopes to b(T) exactly
    CHECK(stieltjes_integral(ones, g100.nodes()) == 1.0);

    const Grid g1000 = Grid::uniform(1.0, 1000);
    // f(t) = t against g(t) = t: the trapezoid rule is exact for this pair
    CHECK(stieltjes_integral(g1000.nodes(), g1000.nodes())
          == doctest::Approx(0.5).epsilon(1e-6));

    // f(t) = t^2 against b(t) = t + t^2/2: closed form 7/12
    std::vector<double> f(g1000.node_count()), b(g1000.node_count());
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double t = g1000.node(j);
        f[j] = t * t;
        b[j] = t + 0.5 * t * t;
    }
    CHECK(stieltjes_integral(f, b) == doctest::Approx(7.0 / 12.0).epsilon(1e-4));

    CHECK_THROWS_AS(stieltjes_integral(ones, g1000.nodes()), std::invalid_argument);
}

TEST_CASE("inner product examples on the Wiener kernel") {
    const KernelPair kp = KernelPair::preset("wiener", 1.0, 1000);
    const CambElement b_half = beta_kernel(0.5, kp);
    CHECK(inner_camb(b_half, b_half, kp) == doctest::Approx(0.5).epsilon(1e-6));

    const CambElement b3 = beta_kernel(0.3, kp);
    const CambElement b7 = beta_kernel(0.7, kp);
    CHECK(inner_camb(b3, b7, kp) == doctest::Approx(0.3).epsilon(1e-6));

    CHECK(inner_camb(camb_zero(kp), b_half, kp) == 0.0);
}

TEST_CASE("pairing against the drift") {
    const KernelPair drifted = KernelPair::preset("drifted", 1.0, 1000);
    CHECK(pair_with_a(beta_kernel(0.5, drifted), drifted)
          == doctest::Approx(0.5).epsilon(1e-6));

    const KernelPair wiener = KernelPair::preset("wiener", 1.0, 1000);
    CHECK(pair_with_a(beta_kernel(0.5, wiener), wiener) == 0.0);

    // z = 1, a(t) = t^2: integral of da telescopes to a(1) = 1
    const Grid g = Grid::uniform(1.0, 500);
    const KernelPair kp(g,
                        [](double t) { return t * t; }, [](double t) { return 2.0 * t; },
                        [](double t) { return t; }, [](double) { return 1.0; });
    const CambElement one = camb_from_density(std::vector<double>(kp.intervals(), 1.0), kp);
    CHECK(pair_with_a(one, kp) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("beta kernel values") {
    const KernelPair kp = KernelPair::preset("curved", 1.0, 100);
    const CambElement full = beta_kernel(1.0, kp);
    for (std::size_t j = 0; j < kp.grid().node_count(); j += 7) {
        CHECK(full.w[j] == doctest::Approx(kp.b_node(j)).epsilon(1e-12));
    }
    const CambElement none = beta_kernel(0.0, kp);
    for (double v : none.w) CHECK(v == 0.0);

    // b(t) = t + t^2/2: beta_{0.5}(0.8) = b(0.5) = 0.625
    const CambElement b_half = beta_kernel(0.5, kp);
    CHECK(b_half.w[kp.grid().nearest_node(0.8)] == doctest::Approx(0.625).epsilon(1e-12));

    CHECK_THROWS_AS(beta_kernel(1.5, kp), std::domain_error);
    CHECK_THROWS_AS(beta_kernel(-0.1, kp), std::domain_error);
}

TEST_CASE("reproducing property") {
    const KernelPair kp = KernelPair::preset("wiener", 1.0, 1000);
    CHECK(reproduce(beta_kernel(0.7, kp), 0.5, kp) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(reproduce(camb_zero(kp), 0.5, kp) == 0.0);

    RngStream rng(2024, 0);
    const CambElement w = random_element(kp, rng);
    const std::size_t node = 317;
    CHECK(reproduce(w, kp.grid().node(node), kp)
          == doctest::Approx(w.w[node]).epsilon(1e-12));
}

TEST_CASE("reproducing property over random elements and kernels") {
    // acceptance criterion 1 shape, at reduced resolution for the unit suite
    for (const char* name : {"wiener", "drifted", "curved"}) {
        const KernelPair kp = KernelPair::preset(name, 1.0, 512);
        RngStream rng(7, 11);
        for (int rep = 0; rep < 10; ++rep) {
            const CambElement w = random_element(kp, rng);
            const double norm = camb_norm(w, kp);
            for (int k = 0; k < 5; ++k) {
                const std::size_t node =
                    static_cast<std::size_t>(rng.uniform() * kp.intervals());
                const double t = kp.grid().node(node);
                CHECK(std::fabs(reproduce(w, t, kp) - w.w[node])
                      <= 1e-3 * (1.0 + norm));
            }
        }
    }
}

TEST_CASE("density round trip is exact") {
    const KernelPair kp = KernelPair::preset("curved", 1.0, 256);
    RngStream rng(5, 1);
    std::vector<double> z(kp.intervals());
    for (auto& v : z) v = 2.0 * rng.uniform() - 1.0;
    const CambElement e = camb_from_density(z, kp);
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(e.z[i] == z[i]);
    // and the accumulated values match the increments they were built from
    for (std::size_t i = 0; i < z.size(); ++i) {
        CHECK(e.w[i + 1] - e.w[i] == doctest::Approx(z[i] * kp.delta_b(i)).epsilon(1e-12));
    }
}

TEST_CASE("beta inner products equal the covariance") {
    const KernelPair kp = KernelPair::preset("curved", 1.0, 128);
    for (std::size_t i = 8; i <= 128; i += 24) {
        for (std::size_t j = 16; j <= 128; j += 32) {
            const double s = kp.grid().node(i), t = kp.grid().node(j);
            const double expected = std::min(kp.b_node(i), kp.b_node(j));
            CHECK(inner_camb(beta_kernel(s, kp), beta_kernel(t, kp), kp)
                  == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("inner product symmetry and bilinearity") {
    const KernelPair kp = KernelPair::preset("drifted", 1.0, 256);
    RngStream rng(99, 3);
    const CambElement x = random_element(kp, rng);
    const CambElement y = random_element(kp, rng);
    const CambElement z = random_element(kp, rng);
    CHECK(inner_camb(x, y, kp) == inner_camb(y, x, kp)); // termwise commutative
    const double alpha = 0.37;
    const double lhs = inner_camb(camb_axpby(alpha, x, 1.0, y), z, kp);
    const double rhs = alpha * inner_camb(x, z, kp) + inner_camb(y, z, kp);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(inner_camb(x, x, kp) >= 0.0);
}

TEST_CASE("gram schmidt") {
    const KernelPair kp = KernelPair::preset("wiener", 1.0, 1000);

    const auto single = gram_schmidt(std::vector{beta_kernel(1.0, kp)}, kp);
    REQUIRE(single.size() == 1);
    CHECK(camb_norm(single[0], kp) == doctest::Approx(1.0).epsilon(1e-8));

    const CambElement g = beta_kernel(0.5, kp);
    const auto deduped = gram_schmidt(std::vector{g, g}, kp);
    CHECK(deduped.size() == 1);

    const auto pair = gram_schmidt(std::vector{beta_kernel(0.5, kp), beta_kernel(1.0, kp)}, kp);
    REQUIRE(pair.size() == 2);
    CHECK(std::fabs(inner_camb(pair[0], pair[1], kp)) <= 1e-8);
    for (const auto& e : pair) {
        CHECK(std::fabs(inner_camb(e, e, kp) - 1.0) <= 1e-8);
    }

    CHECK_THROWS_AS(gram_schmidt(std::vector<CambElement>{}, kp), std::invalid_argument);
    CHECK_THROWS_AS(gram_schmidt(std::vector{camb_zero(kp), camb_zero(kp)}, kp),
                    std::runtime_error);
}

TEST_CASE("gram schmidt orthonormality on crowded beta sets") {
    const KernelPair kp = KernelPair::preset("curved", 1.0, 512);
    std::vector<CambElement> ws;
    for (double t : {0.2, 0.4, 0.6, 0.8, 1.0}) ws.push_back(beta_kernel(t, kp));
    const auto basis = gram_schmidt(ws, kp);
    REQUIRE(basis.size() == 5);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
            const double target = (i == j) ? 1.0 : 0.0;
            CHECK(std::fabs(inner_camb(basis[i], basis[j], kp) - target) <= 1e-8);
        }
    }

    // span preserved: every input is recovered by its basis expansion
    for (const auto& w : ws) {
        CambElement residual = w;
        for (const auto& g : basis) {
            residual = camb_axpby(1.0, residual, -inner_camb(w, g, kp), g);
        }
        CHECK(camb_norm(residual, kp) <= 1e-8 * camb_norm(w, kp));
    }
}

TEST_CASE("smooth densities sampled onto intervals reproduce the trapezoid rule") {
    const KernelPair kp = KernelPair::preset("wiener", 1.0, 2000);
    const CambElement w = camb_from_density_fn([](double t) { return t; }, kp);
    // ||w||^2 = integral of t^2 dt = 1/3 at trapezoid order
    CHECK(inner_camb(w, w, kp) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
    // and the accumulated field is the running integral of t dt
    const std::size_t node = 1600;
    const double t = kp.grid().node(node);
    CHECK(w.w[node] == doctest::Approx(0.5 * t * t).epsilon(1e-6));
}
