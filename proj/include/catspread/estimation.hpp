#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "catspread/distance.hpp"
#include "catspread/errors.hpp"
#include "catspread/measures.hpp"
#include "catspread/pmf.hpp"
#include "catspread/rng.hpp"

namespace catspread {

/// An ordered sequence of i.i.d. categorical observations. Labels are opaque
/// strings mapped to indices by first appearance; every estimator downstream
/// depends only on the induced partition, never on label content or order.
class Sample {
public:
    explicit Sample(const std::vector<std::string>& observations) {
        if (observations.empty()) throw ValidationError("sample: need at least one observation");
        std::unordered_map<std::string, int> index;
        indices_.reserve(observations.size());
        for (const auto& label : observations) {
            auto [it, inserted] = index.emplace(label, static_cast<int>(labels_.size()));
            if (inserted) labels_.push_back(label);
            indices_.push_back(it->second);
        }
        tally();
    }

    /// Pre-indexed observations on k categories (0-based), without labels.
    [[nodiscard]] static Sample from_indices(std::vector<int> indices, Eigen::Index k) {
        if (indices.empty()) throw ValidationError("sample: need at least one observation");
        if (k < 1) throw ValidationError("sample: need at least one category");
        for (int idx : indices)
            if (idx < 0 || idx >= k) throw ValidationError("sample: category index out of range");
        Sample s;
        s.indices_ = std::move(indices);
        s.forced_k_ = k;
        s.tally();
        return s;
    }

    [[nodiscard]] Eigen::Index size() const noexcept {
        return static_cast<Eigen::Index>(indices_.size());
    }
    [[nodiscard]] Eigen::Index category_count() const noexcept { return counts_.size(); }
    [[nodiscard]] const std::vector<int>& indices() const noexcept { return indices_; }
    [[nodiscard]] const Eigen::VectorXd& counts() const noexcept { return counts_; }

    /// First-appearance order; empty for index-born samples.
    [[nodiscard]] const std::vector<std::string>& category_labels() const noexcept {
        return labels_;
    }

private:
    Sample() = default;

    void tally() {
        Eigen::Index k = forced_k_;
        if (k == 0)
            for (int idx : indices_) k = std::max<Eigen::Index>(k, idx + 1);
        counts_ = Eigen::VectorXd::Zero(k);
        for (int idx : indices_) counts_[idx] += 1.0;
    }

    std::vector<int> indices_;
    std::vector<std::string> labels_;
    Eigen::VectorXd counts_;
    Eigen::Index forced_k_ = 0;
};

/// Maximum-likelihood pmf: counts over n, labels carried over when present.
[[nodiscard]] inline Pmf empirical_pmf(const Sample& sample) {
    return Pmf(sample.counts() / static_cast<double>(sample.size()), sample.category_labels());
}

enum class EstimatorKind { UStatistic, PaperFormula };

struct EstimateResult {
    double estimate = 0.0;
    EstimatorKind method = EstimatorKind::UStatistic;
    Eigen::Index n = 0;
    Eigen::Index k = 0;
    std::optional<double> jackknife_se;
    std::optional<std::pair<double, double>> ci;
    std::optional<double> confidence;
};

namespace detail {

/// Kernel-level summation order is pairwise to keep aggregation associative
/// enough that concurrent replicate evaluation can reproduce sequential
/// results bit-for-bit.
[[nodiscard]] inline double pairwise_sum(const double* data, std::size_t len) {
    if (len <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) s += data[i];
        return s;
    }
    const std::size_t half = len / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, len - half);
}

[[nodiscard]] inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(v.data(), v.size());
}

/// Exactly-unbiased fourth-order estimator from category counts:
///   S2 / (n)_2 + S4 / (n)_4 - 2 S3 / (n)_3
/// where S2 sums d^2 over ordered distinct pairs, S3 sums d(i,j) d(i,k) over
/// ordered distinct triples, and S4 sums d(i,j) d(k,l) over ordered distinct
/// 4-tuples. The tuple sums collapse to O(K^2) count aggregates: with
/// rho(c) = sum_c' n_c' d(c,c') - d(c,c) (distance mass seen by one
/// observation of category c, excluding itself) and qod(c) defined the same
/// way on squared distances,
///   P  = sum_c n_c rho(c)            (all ordered distinct pairs)
///   S2 = sum_c n_c qod(c)
///   S3 = sum_c n_c [rho(c)^2 - qod(c)]
///   S4 = P^2 - 2 S2 - 4 S3           (inclusion-exclusion on index clashes)
/// Only symmetry of d is assumed; nonzero diagonals are handled.
[[nodiscard]] inline double ustat_from_counts(const Eigen::VectorXd& counts, double n,
                                              const Eigen::MatrixXd& d) {
    const Eigen::VectorXd rho = d * counts - d.diagonal();
    const Eigen::MatrixXd d2 = d.array().square();
    const Eigen::VectorXd qod = d2 * counts - d2.diagonal();
    const double p_pairs = counts.dot(rho);
    const double s2 = counts.dot(qod);
    const double s3 = counts.dot((rho.array().square() - qod.array()).matrix());
    const double s4 = p_pairs * p_pairs - 2.0 * s2 - 4.0 * s3;
    const double f2 = n * (n - 1.0);
    const double f3 = f2 * (n - 2.0);
    const double f4 = f3 * (n - 3.0);
    return s2 / f2 + s4 / f4 - 2.0 * s3 / f3;
}

/// The legacy closed-form plug-in estimator, evaluated exactly as defined.
/// It is biased on small samples (a constant sample of four yields -24, not
/// 0) and its large-n limit disagrees with the population value; it is kept
/// for comparison, never as the default.
[[nodiscard]] inline double plugin_formula_from_counts(const Eigen::VectorXd& counts, double n) {
    const Eigen::VectorXd pihat = counts / n;
    const double s2 = pihat.array().square().sum();
    const double s3 = pihat.array().cube().sum();
    const double c23 = (n - 2.0) * (n - 3.0);
    const double t1 = n * n * n / ((n - 1.0) * c23) * (1.0 - s2) * (1.0 - s2);
    const double t2 = 2.0 * n * n / c23 * s3;
    const double t3 = n * (n - 6.0) / c23 * s2;
    const double t4 = n * (n + 2.0) / c23;
    return t1 - t2 - t3 - t4;
}

[[nodiscard]] inline double estimate_from_counts(const Eigen::VectorXd& counts, double n,
                                                 EstimatorKind kind, const Eigen::MatrixXd& d) {
    return kind == EstimatorKind::UStatistic ? ustat_from_counts(counts, n, d)
                                             : plugin_formula_from_counts(counts, n);
}

/// Delete-one standard error from category counts. Leave-one-out estimates
/// depend only on which category was removed, so K evaluations cover all n
/// pseudo-values n*full - (n-1)*loo.
[[nodiscard]] inline double jackknife_se_from_counts(Eigen::VectorXd& counts, double n,
                                                     EstimatorKind kind, const Eigen::MatrixXd& d,
                                                     double full) {
    const Eigen::Index k = counts.size();
    Eigen::VectorXd pseudo(k);
    for (Eigen::Index c = 0; c < k; ++c) {
        if (counts[c] == 0.0) {
            pseudo[c] = 0.0;
            continue;
        }
        counts[c] -= 1.0;
        const double loo = estimate_from_counts(counts, n - 1.0, kind, d);
        counts[c] += 1.0;
        pseudo[c] = n * full - (n - 1.0) * loo;
    }
    const double mean = counts.dot(pseudo) / n;
    double ss = 0.0;
    for (Eigen::Index c = 0; c < k; ++c)
        ss += counts[c] * (pseudo[c] - mean) * (pseudo[c] - mean);
    return std::sqrt(ss / (n * (n - 1.0)));
}

}  // namespace detail

/// Closed-form squared-spread estimate from empirical probabilities. Shipped
/// exactly as defined, including its small-sample bias; see EstimatorKind.
[[nodiscard]] inline double unbiased_dvar_sq_paper(const Sample& sample) {
    const double n = static_cast<double>(sample.size());
    if (sample.size() < 4)
        throw ValidationError("closed-form estimator requires n >= 4, got " +
                              std::to_string(sample.size()));
    return detail::plugin_formula_from_counts(sample.counts(), n);
}

/// Exactly unbiased U-statistic estimate of the squared spread under the
/// given distance family. O(K^2) after counting.
[[nodiscard]] inline double unbiased_dvar_sq_ustat(
    const Sample& sample, const DistanceSpec& spec = DistanceSpec::euclidean()) {
    if (sample.size() < 4)
        throw ValidationError("u-statistic estimator requires n >= 4, got " +
                              std::to_string(sample.size()));
    const Eigen::MatrixXd d = spec.category_matrix(sample.category_count());
    return detail::ustat_from_counts(sample.counts(), static_cast<double>(sample.size()), d);
}

/// Inverse standard normal CDF for p in (0, 1): rational initial guess
/// refined with one Halley step through erfc, accurate to ~1e-15.
[[nodiscard]] inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw ValidationError("normal_quantile: p must lie strictly inside (0, 1)");
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double dd[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                     2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    } else if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    } else {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    constexpr double sqrt_2pi = 2.5066282746310002;
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * sqrt_2pi * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

/// Point estimate without resampling inference.
[[nodiscard]] inline EstimateResult point_estimate(
    const Sample& sample, EstimatorKind kind = EstimatorKind::UStatistic,
    const DistanceSpec& spec = DistanceSpec::euclidean()) {
    EstimateResult r;
    r.method = kind;
    r.n = sample.size();
    r.k = sample.category_count();
    r.estimate = kind == EstimatorKind::UStatistic ? unbiased_dvar_sq_ustat(sample, spec)
                                                   : unbiased_dvar_sq_paper(sample);
    return r;
}

/// Delete-one jackknife: pseudo-values n*est - (n-1)*est_{-i}, standard error
/// sqrt(sum (pv_i - mean pv)^2 / (n (n-1))), symmetric normal CI around the
/// full-sample estimate. Requires n >= 5 so every leave-one-out sample still
/// satisfies the estimators' n >= 4 floor.
[[nodiscard]] inline EstimateResult jackknife(const Sample& sample, EstimatorKind kind,
                                              double confidence,
                                              const DistanceSpec& spec = DistanceSpec::euclidean()) {
    if (sample.size() < 5)
        throw ValidationError("jackknife requires n >= 5, got " + std::to_string(sample.size()));
    if (!(confidence > 0.0 && confidence < 1.0))
        throw ValidationError("jackknife: confidence must lie strictly inside (0, 1)");
    EstimateResult r = point_estimate(sample, kind, spec);
    const double n = static_cast<double>(sample.size());
    const Eigen::MatrixXd d = spec.category_matrix(sample.category_count());
    Eigen::VectorXd counts = sample.counts();
    const double se = detail::jackknife_se_from_counts(counts, n, kind, d, r.estimate);
    const double z = normal_quantile(0.5 + confidence / 2.0);
    r.jackknife_se = se;
    r.confidence = confidence;
    r.ci = std::make_pair(r.estimate - z * se, r.estimate + z * se);
    return r;
}

struct SimulationSummary {
    Eigen::Index replicates = 0;
    Eigen::Index sample_size = 0;
    /// Squared spread of the sampled pmf, the estimand.
    double true_value = 0.0;
    double mean = 0.0;
    /// Across replicates, with denominator replicates - 1 (0 for a single replicate).
    double variance = 0.0;
    /// Fraction of nominal-95% jackknife CIs containing true_value; absent
    /// when n < 5 leaves the jackknife undefined.
    std::optional<double> coverage;
};

/// Draws `reps` samples of size n from `pmf`, estimates the squared spread on
/// each, and summarizes. Replicate r uses the derived seed
/// splitmix64(seed + r), so results are independent of evaluation order and
/// bitwise reproducible for a fixed master seed.
[[nodiscard]] inline SimulationSummary simulate_estimator(
    const Pmf& pmf, Eigen::Index n, Eigen::Index reps, std::uint64_t seed,
    EstimatorKind kind = EstimatorKind::UStatistic,
    const DistanceSpec& spec = DistanceSpec::euclidean()) {
    if (n < 4) throw ValidationError("simulate_estimator: n must be >= 4 (>= 5 for coverage)");
    if (reps < 1) throw ValidationError("simulate_estimator: reps must be >= 1");
    const Eigen::Index k = pmf.size();
    const Eigen::MatrixXd d = spec.category_matrix(k);
    const double tv = distance_variance(pmf, spec);

    Eigen::VectorXd cdf(k);
    double acc = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
        acc += pmf[c];
        cdf[c] = acc;
    }

    SimulationSummary out;
    out.replicates = reps;
    out.sample_size = n;
    out.true_value = tv * tv;
    const bool with_coverage = n >= 5;

    std::vector<double> estimates(static_cast<std::size_t>(reps));
    std::vector<double> covered(with_coverage ? static_cast<std::size_t>(reps) : 0);
    Eigen::VectorXd counts(k);
    for (Eigen::Index r = 0; r < reps; ++r) {
        std::mt19937_64 gen(derive_seed(seed, {static_cast<std::uint64_t>(r)}));
        counts.setZero();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double u = u01_open(gen);
            Eigen::Index c = 0;
            while (c < k - 1 && u > cdf[c]) ++c;
            counts[c] += 1.0;
        }
        const double nn = static_cast<double>(n);
        const double est = detail::estimate_from_counts(counts, nn, kind, d);
        estimates[static_cast<std::size_t>(r)] = est;
        if (with_coverage) {
            const double se = detail::jackknife_se_from_counts(counts, nn, kind, d, est);
            const double z = normal_quantile(0.975);
            covered[static_cast<std::size_t>(r)] =
                (est - z * se <= out.true_value && out.true_value <= est + z * se) ? 1.0 : 0.0;
        }
    }

    out.mean = detail::pairwise_sum(estimates) / static_cast<double>(reps);
    if (reps > 1) {
        std::vector<double> sq(static_cast<std::size_t>(reps));
        for (std::size_t i = 0; i < sq.size(); ++i) {
            const double dev = estimates[i] - out.mean;
            sq[i] = dev * dev;
        }
        out.variance = detail::pairwise_sum(sq) / static_cast<double>(reps - 1);
    }
    if (with_coverage) out.coverage = detail::pairwise_sum(covered) / static_cast<double>(reps);
    return out;
}

}  // namespace catspread
