#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "catspread/errors.hpp"
#include "catspread/majorization.hpp"
#include "catspread/measure_descriptor.hpp"
#include "catspread/pmf.hpp"
#include "catspread/rng.hpp"

namespace catspread {

enum class CheckStatus { Pass, Fail, Skipped };

[[nodiscard]] constexpr const char* to_string(CheckStatus s) noexcept {
    switch (s) {
        case CheckStatus::Pass: return "Pass";
        case CheckStatus::Fail: return "Fail";
        case CheckStatus::Skipped: return "Skipped";
    }
    return "?";
}

/// Tally of one family of probes. `skipped` counts probes whose evaluation
/// raised (reported, never fatal); `note` keeps the first violation or skip
/// reason verbatim.
struct CheckOutcome {
    CheckStatus status = CheckStatus::Skipped;
    long checked = 0;
    long violations = 0;
    long skipped = 0;
    std::string note;

    void count_ok() { ++checked; }
    void count_violation(const std::string& why) {
        ++checked;
        ++violations;
        if (note.empty()) note = why;
    }
    void count_skip(const std::string& why) {
        ++skipped;
        if (note.empty()) note = "skipped: " + why;
    }
    void finalize() {
        status = violations > 0 ? CheckStatus::Fail
                                : (checked > 0 ? CheckStatus::Pass : CheckStatus::Skipped);
    }
};

/// A retained strict-majorization violation: first is strictly majorized by
/// second, yet the measure failed to rank first strictly higher.
struct SchurCounterexample {
    Eigen::VectorXd pi;
    Eigen::VectorXd pi_prime;
    double value = 0.0;
    double value_prime = 0.0;
};

struct SchurDerivativeResult {
    CheckStatus condition2 = CheckStatus::Pass;
    /// Skipped here means not applicable: no gradient ties at this point.
    CheckStatus condition3 = CheckStatus::Skipped;
    Eigen::VectorXd gradients;
    std::string note;
};

namespace detail {

[[nodiscard]] inline Eigen::VectorXd fd_gradient(const MeasureDescriptor& measure,
                                                 const Eigen::VectorXd& x, double h) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + h;
        const double fp = measure.evaluate(probe);
        probe[i] = x[i] - h;
        const double fm = measure.evaluate(probe);
        probe[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

[[nodiscard]] inline Eigen::VectorXd random_interior_point(Eigen::Index k, std::mt19937_64& gen,
                                                           double min_coord) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        Eigen::VectorXd v = random_simplex_point(k, gen);
        if (v.minCoeff() >= min_coord) return v;
    }
    throw DomainError("no interior point clear of the boundary after 200 draws");
}

[[nodiscard]] inline Eigen::VectorXd random_permutation_of(const Eigen::VectorXd& v,
                                                           std::mt19937_64& gen) {
    Eigen::VectorXd out = v;
    for (Eigen::Index i = out.size() - 1; i > 0; --i) {
        const auto j = static_cast<Eigen::Index>(bounded_rand(gen, static_cast<std::uint64_t>(i) + 1));
        std::swap(out[i], out[j]);
    }
    return out;
}

/// Interior point with two coordinates a near-tie apart (gap a few 1e-6,
/// between the two finite-difference steps), so a max-type branch crossing
/// sits inside the coarse step's stencil but outside the fine step's. Smooth
/// measures are unaffected; piecewise branches show a step-dependent gradient.
[[nodiscard]] inline Eigen::VectorXd designed_near_tie_point(Eigen::Index k, std::mt19937_64& gen) {
    const double delta = 4e-6 * (1.0 + u01_open(gen));
    Eigen::VectorXd v(k);
    v[0] = 0.4;
    v[1] = 0.4 + delta;
    const double rest = (0.2 - delta) / static_cast<double>(k - 2);
    for (Eigen::Index i = 2; i < k; ++i) v[i] = rest;
    return v;
}

inline constexpr std::uint64_t kSaltVertex = 1;
inline constexpr std::uint64_t kSaltInterior = 2;
inline constexpr std::uint64_t kSaltSchur = 3;
inline constexpr std::uint64_t kSaltSymmetry = 4;
inline constexpr std::uint64_t kSaltSmoothness = 5;
inline constexpr std::uint64_t kSaltNearTie = 6;
inline constexpr std::uint64_t kSaltDerivative = 7;
inline constexpr std::uint64_t kSaltAdditivity = 8;

}  // namespace detail

/// First- and second-order concentration conditions at one interior point,
/// via central finite differences in unconstrained coordinates.
///
/// condition2: for every coordinate pair with distinct masses, the smaller
/// mass must carry the strictly larger partial derivative. Pairs whose
/// gradients tie within 1e-9 are deferred to condition3, which requires the
/// second-order form D_kk + D_k'k' - 2 D_kk' to be strictly negative
/// (threshold -1e-4, comfortably above finite-difference noise and far below
/// the O(1) values of genuinely strict measures).
[[nodiscard]] inline SchurDerivativeResult schur_derivative_test(const MeasureDescriptor& measure,
                                                                 const Pmf& pmf,
                                                                 double fd_step = 1e-5) {
    if (!(fd_step > 0.0))
        throw ValidationError("schur_derivative_test: fd_step must be positive");
    const Eigen::VectorXd& x = pmf.probs();
    if (x.minCoeff() < 10.0 * fd_step)
        throw DomainError("schur_derivative_test: pmf too close to the boundary for step " +
                          std::to_string(fd_step));
    const Eigen::Index k = x.size();
    const double h = fd_step;
    const double f0 = measure.evaluate(x);

    Eigen::VectorXd fp(k), fm(k);
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < k; ++i) {
        probe[i] = x[i] + h;
        fp[i] = measure.evaluate(probe);
        probe[i] = x[i] - h;
        fm[i] = measure.evaluate(probe);
        probe[i] = x[i];
    }

    SchurDerivativeResult out;
    out.gradients = (fp - fm) / (2.0 * h);

    constexpr double grad_tie = 1e-9;
    constexpr double coord_tie = 1e-12;
    constexpr double strict_negative = -1e-4;

    auto cross_form = [&](Eigen::Index i, Eigen::Index j) {
        const double dii = (fp[i] - 2.0 * f0 + fm[i]) / (h * h);
        const double djj = (fp[j] - 2.0 * f0 + fm[j]) / (h * h);
        Eigen::VectorXd y = x;
        y[i] += h;
        y[j] += h;
        const double fpp = measure.evaluate(y);
        y[j] -= 2.0 * h;
        const double fpm = measure.evaluate(y);
        y[i] -= 2.0 * h;
        const double fmm = measure.evaluate(y);
        y[j] += 2.0 * h;
        const double fmp = measure.evaluate(y);
        const double dij = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
        return dii + djj - 2.0 * dij;
    };

    bool any_tie = false;
    bool cond3_fail = false;
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = i + 1; j < k; ++j) {
            const double gdiff = out.gradients[i] - out.gradients[j];
            if (std::abs(gdiff) <= grad_tie) {
                any_tie = true;
                const double form = cross_form(i, j);
                if (form >= strict_negative) {
                    cond3_fail = true;
                    if (out.note.empty())
                        out.note = "second-order form " + std::to_string(form) +
                                   " not strictly negative for pair (" + std::to_string(i + 1) +
                                   ", " + std::to_string(j + 1) + ")";
                }
                continue;
            }
            if (std::abs(x[i] - x[j]) <= coord_tie) continue;
            // Smaller mass must have the larger derivative.
            if ((x[i] - x[j]) * gdiff > 0.0) {
                out.condition2 = CheckStatus::Fail;
                if (out.note.empty())
                    out.note = "gradient order violated for pair (" + std::to_string(i + 1) + ", " +
                               std::to_string(j + 1) + "): masses (" + std::to_string(x[i]) + ", " +
                               std::to_string(x[j]) + "), gradients (" +
                               std::to_string(out.gradients[i]) + ", " +
                               std::to_string(out.gradients[j]) + ")";
            }
        }
    }
    if (any_tie) out.condition3 = cond3_fail ? CheckStatus::Fail : CheckStatus::Pass;
    return out;
}

struct AdditivityResult {
    CheckStatus status = CheckStatus::Skipped;
    long trials = 0;
    long skipped = 0;
    double worst_residual = 0.0;
    std::string note;
};

/// Residual of the category-splitting identity at one probe: splitting
/// category k of `pi` into fractions (t, 1-t) should change the measure by
/// exactly pi_k times the measure of (t, 1-t).
[[nodiscard]] inline double additivity_residual(const MeasureDescriptor& measure,
                                                const Eigen::VectorXd& pi, Eigen::Index k,
                                                double t) {
    if (k < 0 || k >= pi.size()) throw ValidationError("additivity_residual: index out of range");
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("additivity_residual: t must lie in [0, 1]");
    Eigen::VectorXd split(pi.size() + 1);
    for (Eigen::Index i = 0, o = 0; i < pi.size(); ++i) {
        if (i == k) {
            split[o++] = t * pi[k];
            split[o++] = (1.0 - t) * pi[k];
        } else {
            split[o++] = pi[i];
        }
    }
    Eigen::Vector2d halves(t, 1.0 - t);
    const double lhs = measure.evaluate(split);
    const double rhs = measure.evaluate(pi) + pi[k] * measure.evaluate(halves);
    return std::abs(lhs - rhs);
}

/// Random (pi, k, t) probes of the splitting identity; every tenth probe
/// forces a boundary split t = 0 or t = 1, which any measure obeying the
/// zero-category convention satisfies exactly.
[[nodiscard]] inline AdditivityResult check_additivity(const MeasureDescriptor& measure,
                                                       long trials, std::uint64_t seed,
                                                       double tolerance = 1e-10) {
    if (trials < 1) throw ValidationError("check_additivity: trials must be >= 1");
    AdditivityResult out;
    long checked = 0;
    for (long t = 0; t < trials; ++t) {
        std::mt19937_64 gen(
            derive_seed(seed, {detail::kSaltAdditivity, static_cast<std::uint64_t>(t)}));
        const Eigen::Index k = 2 + static_cast<Eigen::Index>(bounded_rand(gen, 5));
        const Eigen::VectorXd pi = random_simplex_point(k, gen);
        const auto split_at = static_cast<Eigen::Index>(bounded_rand(gen, static_cast<std::uint64_t>(k)));
        double frac = u01_open(gen);
        if (t % 10 == 9) frac = (t % 20 == 19) ? 1.0 : 0.0;
        try {
            const double residual = additivity_residual(measure, pi, split_at, frac);
            ++checked;
            if (residual > out.worst_residual) out.worst_residual = residual;
            if (residual > tolerance && out.note.empty())
                out.note = "residual " + std::to_string(residual) + " at trial " + std::to_string(t);
        } catch (const std::exception& e) {
            ++out.skipped;
            if (out.note.empty()) out.note = std::string("skipped: ") + e.what();
        }
    }
    out.trials = checked;
    out.status = checked == 0 ? CheckStatus::Skipped
                              : (out.worst_residual <= tolerance ? CheckStatus::Pass
                                                                 : CheckStatus::Fail);
    return out;
}

struct AxiomCheckOptions {
    Eigen::Index kmin = 2;
    Eigen::Index kmax = 8;
    long trials = 1000;
    std::uint64_t seed = 0;
    /// When set, vertex evaluations gate the A1 verdict; they are probed and
    /// reported either way.
    bool allow_zero_probs = false;
    bool with_additivity = false;
    long max_counterexamples_per_k = 10;
    double vertex_tolerance = 1e-12;
    double schur_slack = 1e-10;
    double symmetry_tolerance = 1e-12;
    double majorization_epsilon = 1e-12;
    double additivity_tolerance = 1e-10;
};

struct AxiomReport {
    std::string measure;
    AxiomCheckOptions options;
    /// Gated verdict: interior positivity, plus vertex nullity when
    /// allow_zero_probs is set.
    CheckOutcome a1;
    CheckOutcome a1_vertex;
    CheckOutcome a1_interior;
    CheckOutcome a2;
    CheckOutcome a3;
    CheckOutcome symmetry;
    CheckOutcome remark1;
    std::optional<AdditivityResult> additivity;
    std::vector<SchurCounterexample> a3_counterexamples;

    /// Additivity is reported but never gates: classical heterogeneity
    /// measures (Gini among them) fail it while satisfying every axiom.
    [[nodiscard]] bool all_pass() const {
        auto ok = [](const CheckOutcome& c) { return c.status != CheckStatus::Fail; };
        return ok(a1) && ok(a2) && ok(a3) && ok(symmetry) && ok(remark1);
    }
};

/// Randomized verification of the spread-measure axioms over K = kmin..kmax.
///
/// Per K: every vertex is evaluated (expected 0 within vertex_tolerance);
/// `trials` interior points (expected strictly positive); `trials` strict
/// majorization pairs (the strictly-majorized side must score higher by more
/// than schur_slack to count as ordered; anything at or below the majorizing
/// side minus the slack is a violation and is retained as a counterexample,
/// capped per K); `trials` random permutations (value equal within
/// symmetry_tolerance); up to 64 smoothness probes comparing
/// finite-difference gradients across steps 1e-5 and 1e-6 plus, for K >= 3,
/// eight near-tie points aimed at max-norm branch crossings; and up to 64
/// derivative-condition probes via schur_derivative_test.
///
/// Probe points derive from (seed, salt, K, trial) only, so reports are
/// deterministic regardless of evaluation order. A probe whose evaluation
/// throws is recorded as skipped with its reason.
[[nodiscard]] inline AxiomReport check_axioms(const MeasureDescriptor& measure,
                                              const AxiomCheckOptions& opts = {}) {
    if (opts.kmin < 2 || opts.kmin > opts.kmax || opts.kmax > 12)
        throw ValidationError("check_axioms: need 2 <= kmin <= kmax <= 12");
    if (opts.trials < 1) throw ValidationError("check_axioms: trials must be >= 1");

    AxiomReport report;
    report.measure = measure.name();
    report.options = opts;

    const long fd_probes = std::min<long>(opts.trials, 64);
    constexpr double h_coarse = 1e-5;
    constexpr double h_fine = 1e-6;
    constexpr double interior_floor = 1e-3;

    for (Eigen::Index k = opts.kmin; k <= opts.kmax; ++k) {
        const auto uk = static_cast<std::uint64_t>(k);

        for (Eigen::Index at = 0; at < k; ++at) {
            try {
                const double value = measure.evaluate(Pmf::degenerate(k, at).probs());
                if (std::abs(value) <= opts.vertex_tolerance)
                    report.a1_vertex.count_ok();
                else
                    report.a1_vertex.count_violation(
                        "vertex " + std::to_string(at + 1) + " of K=" + std::to_string(k) +
                        " scores " + std::to_string(value) + ", expected 0");
            } catch (const std::exception& e) {
                report.a1_vertex.count_skip(e.what());
            }
        }

        for (long t = 0; t < opts.trials; ++t) {
            const auto ut = static_cast<std::uint64_t>(t);
            std::mt19937_64 gen(derive_seed(opts.seed, {detail::kSaltInterior, uk, ut}));
            try {
                const double value = measure.evaluate(random_simplex_point(k, gen));
                if (value > 0.0)
                    report.a1_interior.count_ok();
                else
                    report.a1_interior.count_violation("interior point of K=" + std::to_string(k) +
                                                       " scores " + std::to_string(value) +
                                                       ", expected > 0");
            } catch (const std::exception& e) {
                report.a1_interior.count_skip(e.what());
            }
        }

        long retained = 0;
        for (long t = 0; t < opts.trials; ++t) {
            const auto ut = static_cast<std::uint64_t>(t);
            try {
                // majorized is the more spread-out pmf; it must score strictly higher.
                const auto [majorized, majorizer] = random_majorization_pair(
                    k, derive_seed(opts.seed, {detail::kSaltSchur, uk, ut}), 3);
                const double v_spread = measure.evaluate(majorized.probs());
                const double v_concentrated = measure.evaluate(majorizer.probs());
                if (v_spread > v_concentrated - opts.schur_slack) {
                    report.a3.count_ok();
                } else {
                    report.a3.count_violation(
                        "K=" + std::to_string(k) + ", trial " + std::to_string(t) +
                        ": strictly majorized pmf scores " + std::to_string(v_spread) +
                        ", not above " + std::to_string(v_concentrated));
                    if (retained < opts.max_counterexamples_per_k) {
                        ++retained;
                        report.a3_counterexamples.push_back(
                            {majorized.probs(), majorizer.probs(), v_spread, v_concentrated});
                    }
                }
            } catch (const std::exception& e) {
                report.a3.count_skip(e.what());
            }
        }

        for (long t = 0; t < opts.trials; ++t) {
            const auto ut = static_cast<std::uint64_t>(t);
            std::mt19937_64 gen(derive_seed(opts.seed, {detail::kSaltSymmetry, uk, ut}));
            try {
                const Eigen::VectorXd point = random_simplex_point(k, gen);
                const Eigen::VectorXd shuffled = detail::random_permutation_of(point, gen);
                const double a = measure.evaluate(point);
                const double b = measure.evaluate(shuffled);
                if (std::abs(a - b) <= opts.symmetry_tolerance)
                    report.symmetry.count_ok();
                else
                    report.symmetry.count_violation("K=" + std::to_string(k) +
                                                    ": permutation changes value by " +
                                                    std::to_string(a - b));
            } catch (const std::exception& e) {
                report.symmetry.count_skip(e.what());
            }
        }

        const long designed = k >= 3 ? 8 : 0;
        for (long t = 0; t < fd_probes + designed; ++t) {
            const bool near_tie = t >= fd_probes;
            const auto ut = static_cast<std::uint64_t>(near_tie ? t - fd_probes : t);
            std::mt19937_64 gen(derive_seed(
                opts.seed, {near_tie ? detail::kSaltNearTie : detail::kSaltSmoothness, uk, ut}));
            try {
                const Eigen::VectorXd point = near_tie
                                                  ? detail::designed_near_tie_point(k, gen)
                                                  : detail::random_interior_point(k, gen, interior_floor);
                const Eigen::VectorXd g1 = detail::fd_gradient(measure, point, h_coarse);
                const Eigen::VectorXd g2 = detail::fd_gradient(measure, point, h_fine);
                const double mismatch = (g1 - g2).cwiseAbs().maxCoeff();
                const double tolerance = 1e-3 * std::max(1.0, g1.cwiseAbs().maxCoeff());
                if (mismatch <= tolerance)
                    report.a2.count_ok();
                else
                    report.a2.count_violation(
                        "K=" + std::to_string(k) + ": gradient mismatch " + std::to_string(mismatch) +
                        " between steps " + std::to_string(h_coarse) + " and " +
                        std::to_string(h_fine) + (near_tie ? " at a designed near-tie point" : ""));
            } catch (const std::exception& e) {
                report.a2.count_skip(e.what());
            }
        }

        for (long t = 0; t < fd_probes; ++t) {
            const auto ut = static_cast<std::uint64_t>(t);
            std::mt19937_64 gen(derive_seed(opts.seed, {detail::kSaltDerivative, uk, ut}));
            try {
                const Pmf point(detail::random_interior_point(k, gen, interior_floor));
                const SchurDerivativeResult r = schur_derivative_test(measure, point, h_coarse);
                if (r.condition2 == CheckStatus::Fail || r.condition3 == CheckStatus::Fail)
                    report.remark1.count_violation("K=" + std::to_string(k) + ": " + r.note);
                else
                    report.remark1.count_ok();
            } catch (const std::exception& e) {
                report.remark1.count_skip(e.what());
            }
        }
    }

    report.a1_vertex.finalize();
    report.a1_interior.finalize();
    report.a2.finalize();
    report.a3.finalize();
    report.symmetry.finalize();
    report.remark1.finalize();

    report.a1.checked = report.a1_interior.checked;
    report.a1.violations = report.a1_interior.violations;
    report.a1.skipped = report.a1_interior.skipped;
    report.a1.note = report.a1_interior.note;
    if (opts.allow_zero_probs) {
        report.a1.checked += report.a1_vertex.checked;
        report.a1.violations += report.a1_vertex.violations;
        report.a1.skipped += report.a1_vertex.skipped;
        if (report.a1.note.empty()) report.a1.note = report.a1_vertex.note;
        else if (!report.a1_vertex.note.empty() && report.a1_vertex.violations > 0)
            report.a1.note = report.a1_vertex.note;
    }
    report.a1.finalize();

    if (opts.with_additivity)
        report.additivity = check_additivity(measure, opts.trials,
                                             derive_seed(opts.seed, {detail::kSaltAdditivity}),
                                             opts.additivity_tolerance);
    return report;
}

}  // namespace catspread
