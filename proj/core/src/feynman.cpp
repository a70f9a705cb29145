#include "gbmpath/feynman.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>

namespace gbmpath {

// ---------------------------------------------------------------------------
// ComplexMeasure

ComplexMeasure ComplexMeasure::finite(std::vector<Atom> atoms) {
    if (atoms.empty()) {
        throw std::invalid_argument("ComplexMeasure: need at least one atom");
    }
    ComplexMeasure m;
    m.dim_ = atoms.front().v.size();
    for (const auto& a : atoms) {
        if (a.v.size() != m.dim_) {
            throw std::invalid_argument("ComplexMeasure: atoms of mixed dimension");
        }
    }
    m.atoms_ = std::move(atoms);
    return m;
}

ComplexMeasure ComplexMeasure::countable(std::size_t dim, TailGenerator gen) {
    if (!gen) {
        throw std::invalid_argument("ComplexMeasure: null tail generator");
    }
    ComplexMeasure m;
    m.dim_ = dim;
    m.tail_ = std::move(gen);
    return m;
}

ComplexMeasure ComplexMeasure::alpha_inverse_squares() {
    return countable(1, [](std::size_t k) {
        const double m = static_cast<double>(k + 1);
        return Atom{{m}, {1.0 / (m * m), 0.0}};
    });
}

Atom ComplexMeasure::atom(std::size_t k) const {
    if (tail_) return tail_(k);
    return atoms_.at(k);
}

double ComplexMeasure::explicit_total_variation() const {
    double tv = 0.0;
    for (const auto& a : atoms_) tv += std::abs(a.weight);
    return tv;
}

// ---------------------------------------------------------------------------
// CylinderFunctional

CylinderFunctional::CylinderFunctional(std::vector<CambElement> g, PathsTuple tuple,
                                       ComplexMeasure measure, const KernelPair& kp)
    : g_(std::move(g)), tuple_(std::move(tuple)), measure_(std::move(measure)) {
    if (g_.empty()) {
        throw std::invalid_argument("CylinderFunctional: empty orthonormal set");
    }
    validate_tuple(tuple_, kp);
    for (std::size_t i = 0; i < g_.size(); ++i) {
        for (std::size_t j = i; j < g_.size(); ++j) {
            const double ip = inner_camb(g_[i], g_[j], kp);
            const double target = (i == j) ? 1.0 : 0.0;
            if (std::fabs(ip - target) > 1e-8) {
                throw std::invalid_argument(
                    "CylinderFunctional: basis is not orthonormal to 1e-8");
            }
        }
    }
    if (measure_.dim() != g_.size() * tuple_.size()) {
        throw std::invalid_argument(
            "CylinderFunctional: measure dimension != m * n");
    }
    ga_.reserve(g_.size());
    for (const auto& gj : g_) ga_.push_back(pair_with_a(gj, kp));
}

// ---------------------------------------------------------------------------
// Series engine for atom sums. Terms are weight * exp(exponent); magnitudes
// are handled in log space so divergent tails never overflow. Classification
// follows the d'Alembert ratio estimated over the last 100 ratio samples.

namespace {

struct TermParts {
    std::complex<double> exponent;
    std::complex<double> weight;
};

using TermGen = std::function<TermParts(std::size_t)>;

struct SeriesOutcome {
    SeriesStatus status = SeriesStatus::indeterminate;
    std::complex<double> value{};
    double ratio_limit = 0.0;
    std::size_t terms_used = 0;
    double tail_bound = std::numeric_limits<double>::infinity();
};

double log_magnitude(const TermParts& t) {
    const double aw = std::abs(t.weight);
    if (aw == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(aw) + t.exponent.real();
}

struct RatioEstimate {
    double limit = 0.0;
    double spread = 0.0; ///< relative max-min spread of the sampled ratios
};

RatioEstimate estimate_ratio(const TermGen& gen, std::size_t probe_at) {
    constexpr std::size_t window = 100;
    RatioEstimate est;
    double lm_prev = log_magnitude(gen(probe_at));
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= window; ++i) {
        const double lm = log_magnitude(gen(probe_at + i));
        const bool prev_zero = std::isinf(lm_prev) && lm_prev < 0.0;
        const bool cur_zero = std::isinf(lm) && lm < 0.0;
        const double r = cur_zero ? 0.0
                          : prev_zero ? std::numeric_limits<double>::infinity()
                                      : std::exp(lm - lm_prev);
        lm_prev = lm;
        sum += r;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    est.limit = sum / window;
    est.spread = (est.limit > 0.0) ? (hi - lo) / est.limit : 0.0;
    return est;
}

/// Decaying-power-law tail estimate past index last (inclusive of nothing):
/// Euler-Maclaurin against t(x) ~ c x^{-p}. Returns {correction, residual}.
struct TailEstimate {
    double correction = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    bool valid = false;
};

TailEstimate power_law_tail(double term_half, double term_last, std::size_t last) {
    TailEstimate te;
    if (!(term_last > 0.0) || !(term_half > term_last)) return te;
    const double k = static_cast<double>(last);
    const double p = std::log(term_half / term_last) / std::log(2.0);
    if (!(p > 1.1) || !(p < 60.0)) return te;
    te.correction = term_last * (k / (p - 1.0) - 0.5 + p / (12.0 * k));
    te.residual = term_last * (p + 1.0) / k;
    te.valid = true;
    return te;
}

SeriesOutcome sum_atom_series(const TermGen& gen, std::size_t budget, double tail_tol) {
    SeriesOutcome out;
    const auto ratio = estimate_ratio(gen, budget);
    out.ratio_limit = ratio.limit;

    if (ratio.limit > 1.0 &&
        ratio.limit - 1.0 > 3.0 * ratio.spread * ratio.limit + 1e-9) {
        out.status = SeriesStatus::divergent;
        return out;
    }

    const bool asymptotically_geometric =
        ratio.limit < 1.0 - std::max(1e-3, 3.0 * ratio.spread * ratio.limit);

    // early stop needs a LOCAL ratio bound: decaying heads can sit near
    // ratio 1 long before the asymptotic regime the probe saw
    constexpr std::size_t ratio_window = 10;
    std::array<double, ratio_window> recent{};
    recent.fill(1.0);
    double prev_mag = -1.0;

    std::complex<double> sum = 0.0;
    double mag_half = 0.0;
    double mag_last = 0.0;
    bool positive_real = true;
    for (std::size_t k = 0; k < budget; ++k) {
        const TermParts t = gen(k);
        const std::complex<double> term = t.weight * std::exp(t.exponent);
        sum += term;
        mag_last = std::abs(term);
        if (k == budget / 2) mag_half = mag_last;
        if (std::fabs(term.imag()) > 1e-13 * (std::fabs(term.real()) + 1e-300) ||
            term.real() < 0.0) {
            positive_real = false;
        }
        if (prev_mag > 0.0) {
            recent[k % ratio_window] = mag_last / prev_mag;
        } else {
            recent[k % ratio_window] =
                (mag_last > 0.0) ? std::numeric_limits<double>::infinity() : 0.0;
        }
        prev_mag = mag_last;
        if (asymptotically_geometric && k >= ratio_window) {
            const double r_local =
                std::max(*std::max_element(recent.begin(), recent.end()),
                         ratio.limit);
            if (r_local < 0.99) {
                const double tail = mag_last * r_local / (1.0 - r_local);
                if (tail < tail_tol) {
                    out.status = SeriesStatus::converged;
                    out.value = sum;
                    out.terms_used = k + 1;
                    out.tail_bound = tail;
                    return out;
                }
            }
        }
    }
    out.terms_used = budget;
    out.value = sum;

    const TailEstimate te = power_law_tail(mag_half, mag_last, budget);
    if (te.valid) {
        if (positive_real) {
            // tail of a smooth positive decreasing series: apply the
            // correction and report the leftover as the bound
            out.value += te.correction;
            out.tail_bound = te.residual;
            out.status = (te.residual < tail_tol) ? SeriesStatus::converged
                                                  : SeriesStatus::indeterminate;
        } else {
            // oscillating but absolutely convergent: the absolute tail is
            // the honest bound, no correction is possible
            out.tail_bound = te.correction;
            out.status = SeriesStatus::converged;
        }
        return out;
    }
    out.status = SeriesStatus::indeterminate;
    return out;
}

// ---------------------------------------------------------------------------
// Exponent assembly shared by the analytic integral and the Feynman limit.

struct ExponentTerms {
    double quad = 0.0; ///< sum_j sum_l [b(s_l)-b(s_{l-1})] (sum_{k>=l} v_{j,k})^2
    double mean = 0.0; ///< sum_{j,k} (g_j, a) v_{j,k}
};

struct FunctionalGeometry {
    std::vector<double> db; ///< b increments over the tuple
    std::span<const double> ga;
    std::size_t m = 0, n = 0;

    FunctionalGeometry(const CylinderFunctional& F, const KernelPair& kp)
        : ga(F.basis_drift_pairings()), m(F.m()), n(F.n()) {
        db.resize(n);
        double b_prev = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
            const double b_cur = kp.b_at(F.tuple().s[l]);
            db[l] = b_cur - b_prev;
            b_prev = b_cur;
        }
    }

    ExponentTerms terms(std::span<const double> v) const {
        ExponentTerms t;
        for (std::size_t j = 0; j < m; ++j) {
            double suffix = 0.0;
            for (std::size_t l = n; l-- > 0;) {
                suffix += v[j * n + l];
                t.quad += db[l] * suffix * suffix;
            }
            for (std::size_t k = 0; k < n; ++k) {
                t.mean += ga[j] * v[j * n + k];
            }
        }
        return t;
    }
};

std::complex<double> inv_sqrt_positive_branch(std::complex<double> lambda) {
    return 1.0 / std::sqrt(lambda); // principal sqrt keeps Re > 0 on C+
}

} // namespace

// ---------------------------------------------------------------------------

std::complex<double> eval_F(const CylinderFunctional& F, const PathsSection& section) {
    if (section.tuple.size() != F.n()) {
        throw std::invalid_argument("eval_F: section tuple size != functional tuple size");
    }
    const std::size_t m = F.m(), n = F.n();
    std::vector<double> u(m * n);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            u[j * n + k] = pwz(F.basis()[j], section.sections[k]);
        }
    }
    const auto phase_sum = [&](const Atom& atom) {
        if (atom.v.size() != m * n) {
            throw std::invalid_argument("eval_F: atom dimension mismatch");
        }
        double phase = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) phase += u[i] * atom.v[i];
        return phase;
    };

    std::complex<double> sum = 0.0;
    if (F.measure().is_finite()) {
        for (const auto& atom : F.measure().atoms()) {
            sum += atom.weight * std::exp(std::complex<double>(0.0, phase_sum(atom)));
        }
        return sum;
    }
    // countable: the summability of the total variation must hold before a
    // bounded evaluation makes sense; the phases have modulus one, so the
    // weight tail is the only truncation error
    const std::size_t budget = F.measure().atom_budget();
    const auto weight_gen = [&](std::size_t k) {
        return TermParts{{0.0, 0.0}, F.measure().atom(k).weight};
    };
    const auto ratio = estimate_ratio(weight_gen, budget);
    if (ratio.limit >= 1.0 - 1e-9) {
        const double w_half = std::abs(F.measure().atom(budget / 2).weight);
        const double w_last = std::abs(F.measure().atom(budget).weight);
        const double p = (w_half > w_last && w_last > 0.0)
                             ? std::log(w_half / w_last) / std::log(2.0)
                             : 0.0;
        if (!(p > 1.05)) {
            throw DivergenceError("eval_F: measure total variation is not summable",
                                  ratio.limit);
        }
    }
    for (std::size_t k = 0; k < budget; ++k) {
        const Atom atom = F.measure().atom(k);
        sum += atom.weight * std::exp(std::complex<double>(0.0, phase_sum(atom)));
    }
    return sum;
}

std::complex<double> analytic_J(const CylinderFunctional& F,
                                std::complex<double> lambda,
                                const KernelPair& kp) {
    if (!(lambda.real() > 0.0)) {
        throw std::domain_error("analytic_J: lambda must lie in the open right half-plane");
    }
    const FunctionalGeometry geom(F, kp);
    const std::complex<double> inv_sqrt = inv_sqrt_positive_branch(lambda);
    const auto exponent_of = [&](const Atom& atom) {
        const ExponentTerms t = geom.terms(atom.v);
        return -t.quad / (2.0 * lambda) +
               std::complex<double>(0.0, 1.0) * inv_sqrt * t.mean;
    };

    if (F.measure().is_finite()) {
        std::complex<double> sum = 0.0;
        for (const auto& atom : F.measure().atoms()) {
            sum += atom.weight * std::exp(exponent_of(atom));
        }
        return sum;
    }
    const auto gen = [&](std::size_t k) {
        const Atom atom = F.measure().atom(k);
        return TermParts{exponent_of(atom), atom.weight};
    };
    const SeriesOutcome out = sum_atom_series(gen, F.measure().atom_budget(), 1e-12);
    if (out.status == SeriesStatus::divergent) {
        throw DivergenceError("analytic_J: atom series diverges", out.ratio_limit);
    }
    if (out.status == SeriesStatus::indeterminate) {
        throw std::runtime_error("analytic_J: atom series undecided within budget");
    }
    return out.value;
}

std::complex<double> analytic_J_single(const CylinderFunctional& F,
                                       std::complex<double> lambda,
                                       const KernelPair& kp) {
    if (F.n() != 1) {
        throw std::invalid_argument("analytic_J_single: functional has n != 1");
    }
    if (!(lambda.real() > 0.0)) {
        throw std::domain_error("analytic_J_single: lambda must lie in the open right half-plane");
    }
    const double b_s = kp.b_at(F.tuple().s[0]);
    const auto ga = F.basis_drift_pairings();
    const std::complex<double> inv_sqrt = inv_sqrt_positive_branch(lambda);
    if (!F.measure().is_finite()) {
        return analytic_J(F, lambda, kp);
    }
    std::complex<double> sum = 0.0;
    for (const auto& atom : F.measure().atoms()) {
        double quad = 0.0, mean = 0.0;
        for (std::size_t j = 0; j < F.m(); ++j) {
            quad += b_s * atom.v[j] * atom.v[j];
            mean += ga[j] * atom.v[j];
        }
        sum += atom.weight * std::exp(-quad / (2.0 * lambda) +
                                      std::complex<double>(0.0, 1.0) * inv_sqrt * mean);
    }
    return sum;
}

FeynmanResult feynman_limit(const CylinderFunctional& F, double q,
                            const KernelPair& kp) {
    if (q == 0.0) {
        throw std::invalid_argument("feynman_limit: q must be nonzero");
    }
    const FunctionalGeometry geom(F, kp);
    // (-iq)^{-1/2} = (1 + i sign(q)) / sqrt(2|q|), the positive-real branch
    const double root = 1.0 / std::sqrt(2.0 * std::fabs(q));
    const std::complex<double> inv_sqrt(root, (q > 0.0 ? root : -root));
    const auto exponent_of = [&](const Atom& atom) {
        const ExponentTerms t = geom.terms(atom.v);
        return std::complex<double>(0.0, -t.quad / (2.0 * q)) +
               std::complex<double>(0.0, 1.0) * inv_sqrt * t.mean;
    };

    FeynmanResult res;
    if (F.measure().is_finite()) {
        std::complex<double> sum = 0.0;
        for (const auto& atom : F.measure().atoms()) {
            sum += atom.weight * std::exp(exponent_of(atom));
        }
        res.status = SeriesStatus::converged;
        res.value = sum;
        res.atoms_used = F.measure().atoms().size();
        return res;
    }
    const auto gen = [&](std::size_t k) {
        const Atom atom = F.measure().atom(k);
        return TermParts{exponent_of(atom), atom.weight};
    };
    const SeriesOutcome out = sum_atom_series(gen, F.measure().atom_budget(), 1e-12);
    res.status = out.status;
    res.value = out.value;
    res.ratio_limit = out.ratio_limit;
    res.atoms_used = out.terms_used;
    return res;
}

Q0Result q0_condition(const CylinderFunctional& F, double q0, const KernelPair& kp) {
    if (!(q0 > 0.0)) {
        throw std::invalid_argument("q0_condition: q0 must be positive");
    }
    const double scale = kp.drift_norm() / std::sqrt(2.0 * q0);
    const auto exponent_of = [&](const Atom& atom) {
        double abs_sum = 0.0;
        for (double v : atom.v) abs_sum += std::fabs(v);
        return std::complex<double>(scale * abs_sum, 0.0);
    };

    Q0Result res;
    if (F.measure().is_finite()) {
        double sum = 0.0;
        for (const auto& atom : F.measure().atoms()) {
            double abs_sum = 0.0;
            for (double v : atom.v) abs_sum += std::fabs(v);
            sum += std::abs(atom.weight) * std::exp(scale * abs_sum);
        }
        res.verdict = SeriesStatus::converged;
        res.value = sum;
        res.atoms_used = F.measure().atoms().size();
        return res;
    }
    const auto gen = [&](std::size_t k) {
        const Atom atom = F.measure().atom(k);
        return TermParts{exponent_of(atom), std::abs(atom.weight)};
    };
    const SeriesOutcome out = sum_atom_series(gen, F.measure().atom_budget(), 1e-12);
    res.verdict = out.status;
    res.value = out.value.real();
    res.ratio_limit = out.ratio_limit;
    res.atoms_used = out.terms_used;
    return res;
}

SequenceReport feynman_sequence_check(const CylinderFunctional& F, double q,
                                      const KernelPair& kp, std::size_t l_count) {
    if (l_count == 0) {
        throw std::invalid_argument("feynman_sequence_check: l_count must be positive");
    }
    const FeynmanResult limit = feynman_limit(F, q, kp);
    if (limit.status != SeriesStatus::converged) {
        throw std::runtime_error("feynman_sequence_check: the Feynman limit does not exist");
    }
    SequenceReport rep;
    rep.limit = limit.value;
    rep.l_count = l_count;
    // decade samples gauge the decrease without storing every gap
    std::vector<double> decade_gaps;
    std::size_t next_decade = 1;
    for (std::size_t l = 1; l <= l_count; ++l) {
        const std::complex<double> lambda(1.0 / static_cast<double>(l), -q);
        const double gap = std::abs(analytic_J(F, lambda, kp) - limit.value);
        rep.max_gap = std::max(rep.max_gap, gap);
        if (l == l_count) rep.final_gap = gap;
        if (l == next_decade) {
            decade_gaps.push_back(gap);
            next_decade *= 10;
        }
    }
    rep.decreasing = true;
    for (std::size_t i = 1; i < decade_gaps.size(); ++i) {
        if (decade_gaps[i] > decade_gaps[i - 1] * 1.05 + 1e-15) rep.decreasing = false;
    }
    if (rep.final_gap > decade_gaps.front() * 1.05 + 1e-15) rep.decreasing = false;
    return rep;
}

// ---------------------------------------------------------------------------
// Contour integration

namespace {

struct SimpsonWork {
    const std::function<std::complex<double>(double)>* f = nullptr;
    std::size_t evals = 0;

    std::complex<double> eval(double u) {
        ++evals;
        return (*f)(u);
    }

    std::complex<double> adaptive(double a, double b, std::complex<double> fa,
                                  std::complex<double> fm, std::complex<double> fb,
                                  std::complex<double> whole, double tol, int depth) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const std::complex<double> flm = eval(lm);
        const std::complex<double> frm = eval(rm);
        const std::complex<double> left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const std::complex<double> right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const std::complex<double> split = left + right;
        if (depth <= 0 || std::abs(split - whole) <= 15.0 * tol) {
            return split + (split - whole) / 15.0;
        }
        return adaptive(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
               adaptive(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
};

} // namespace

ContourReport contour_analyticity_check(const CylinderFunctional& F,
                                        const Rectangle& rect,
                                        const KernelPair& kp,
                                        const ContourOptions& opt) {
    if (!(rect.re_lo > 0.0)) {
        throw std::domain_error(
            "contour_analyticity_check: rectangle must lie strictly in Re > 0");
    }
    if (!(rect.re_hi > rect.re_lo) || !(rect.im_hi > rect.im_lo)) {
        throw std::invalid_argument("contour_analyticity_check: degenerate rectangle");
    }

    const std::complex<double> c0(rect.re_lo, rect.im_lo);
    const std::complex<double> c1(rect.re_hi, rect.im_lo);
    const std::complex<double> c2(rect.re_hi, rect.im_hi);
    const std::complex<double> c3(rect.re_lo, rect.im_hi);
    const std::array<std::pair<std::complex<double>, std::complex<double>>, 4> edges = {
        std::pair{c0, c1}, {c1, c2}, {c2, c3}, {c3, c0}};

    ContourReport rep;
    for (const auto& [z0, z1] : edges) {
        const std::complex<double> dz = z1 - z0;
        const std::function<std::complex<double>(double)> integrand =
            [&](double u) { return analytic_J(F, z0 + u * dz, kp); };
        SimpsonWork work;
        work.f = &integrand;
        std::complex<double> edge;
        if (opt.fixed_panels > 0) {
            const std::size_t p = opt.fixed_panels;
            edge = 0.0;
            for (std::size_t i = 0; i < p; ++i) {
                const double a = static_cast<double>(i) / p;
                const double b = static_cast<double>(i + 1) / p;
                const double m = 0.5 * (a + b);
                edge += (b - a) / 6.0 *
                        (work.eval(a) + 4.0 * work.eval(m) + work.eval(b));
            }
        } else {
            const std::complex<double> fa = work.eval(0.0);
            const std::complex<double> fm = work.eval(0.5);
            const std::complex<double> fb = work.eval(1.0);
            const std::complex<double> whole = 1.0 / 6.0 * (fa + 4.0 * fm + fb);
            edge = work.adaptive(0.0, 1.0, fa, fm, fb, whole, opt.tolerance,
                                 opt.max_depth);
        }
        rep.integral += dz * edge;
        rep.evaluations += work.evals;
    }
    rep.residual = std::abs(rep.integral);
    return rep;
}

// ---------------------------------------------------------------------------

std::uint64_t ulp_distance(double x, double y) {
    if (x == y) return 0;
    const auto key = [](double v) {
        auto i = std::bit_cast<std::int64_t>(v);
        if (i < 0) i = std::numeric_limits<std::int64_t>::min() - i;
        return static_cast<std::uint64_t>(i) + (1ull << 63);
    };
    const std::uint64_t kx = key(x), ky = key(y);
    return kx > ky ? kx - ky : ky - kx;
}

namespace {

// Neumaier-compensated accumulator; keeps each summation route accurate to
// about one ulp so the reordering identity can be held to an 8-ulp budget
// even under heavy cancellation.
struct CompensatedSum {
    double sum = 0.0, comp = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }

    double value() const { return sum + comp; }
};

} // namespace

bool sum_identity_check(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("sum_identity_check: length mismatch");
    }
    const std::size_t n = a.size();
    CompensatedSum lhs;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l <= k; ++l) lhs.add(a[l] * b[k]);
    }
    CompensatedSum rhs;
    for (std::size_t l = 0; l < n; ++l) {
        for (std::size_t k = l; k < n; ++k) rhs.add(a[l] * b[k]);
    }
    return ulp_distance(lhs.value(), rhs.value()) <= 8;
}

} // namespace gbmpath
