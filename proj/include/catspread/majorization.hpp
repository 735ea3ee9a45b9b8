#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "catspread/errors.hpp"
#include "catspread/pmf.hpp"
#include "catspread/rng.hpp"

namespace catspread {

enum class MajorizationRelation {
    EqualUpToPermutation,
    StrictlyMajorizedBy,
    WeaklyMajorizedBy,
    StrictlyMajorizes,
    WeaklyMajorizes,
    Incomparable,
};

[[nodiscard]] constexpr const char* to_string(MajorizationRelation r) noexcept {
    switch (r) {
        case MajorizationRelation::EqualUpToPermutation: return "EqualUpToPermutation";
        case MajorizationRelation::StrictlyMajorizedBy: return "StrictlyMajorizedBy";
        case MajorizationRelation::WeaklyMajorizedBy: return "WeaklyMajorizedBy";
        case MajorizationRelation::StrictlyMajorizes: return "StrictlyMajorizes";
        case MajorizationRelation::WeaklyMajorizes: return "WeaklyMajorizes";
        case MajorizationRelation::Incomparable: return "Incomparable";
    }
    return "?";
}

struct MajorizationVerdict {
    MajorizationRelation relation = MajorizationRelation::EqualUpToPermutation;
    /// 1-based top-i partial-sum index certifying strictness, weak ordering,
    /// or (for Incomparable) the first index that contradicts the direction
    /// set earlier in the scan. Absent for EqualUpToPermutation.
    std::optional<int> witness_index;
};

/// Concentration order on pmfs. Both vectors are zero-padded to a common
/// length, sorted descending, and their top-i partial sums compared for
/// i = 1..K-1. A gap beyond `epsilon` certifies strictness; gaps with a
/// consistent sign that never exceed epsilon are reported as the weak
/// (uncertified) form of the same direction. "MajorizedBy" means p is the
/// more spread out of the two: every top-i sum of p is at most that of q.
[[nodiscard]] inline MajorizationVerdict majorization_compare(const Pmf& p, const Pmf& q,
                                                              double epsilon = 1e-12) {
    const std::size_t k = static_cast<std::size_t>(std::max(p.size(), q.size()));
    std::vector<double> a(k, 0.0), b(k, 0.0);
    for (Eigen::Index i = 0; i < p.size(); ++i) a[static_cast<std::size_t>(i)] = p[i];
    for (Eigen::Index i = 0; i < q.size(); ++i) b[static_cast<std::size_t>(i)] = q[i];
    std::sort(a.begin(), a.end(), std::greater<>());
    std::sort(b.begin(), b.end(), std::greater<>());

    int first_below = 0, first_above = 0;     // certified (beyond epsilon), 1-based
    int first_raw_below = 0, first_raw_above = 0;
    double pa = 0.0, pb = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        pa += a[i];
        pb += b[i];
        const double gap = pa - pb;
        const int idx = static_cast<int>(i) + 1;
        if (gap < -epsilon && first_below == 0) first_below = idx;
        if (gap > epsilon && first_above == 0) first_above = idx;
        if (gap < 0.0 && first_raw_below == 0) first_raw_below = idx;
        if (gap > 0.0 && first_raw_above == 0) first_raw_above = idx;
    }

    if (first_below && first_above) {
        // Direction was set by the earlier certified index; the later one is
        // the contradiction witness.
        const int witness = std::max(first_below, first_above);
        return {MajorizationRelation::Incomparable, witness};
    }
    if (first_below) return {MajorizationRelation::StrictlyMajorizedBy, first_below};
    if (first_above) return {MajorizationRelation::StrictlyMajorizes, first_above};
    // All partial sums tied within epsilon: a one-sided raw drift is reported
    // as the weak form (ordered, but strictness not certifiable at this
    // epsilon); mixed or absent drift is equality up to permutation.
    if (first_raw_below && !first_raw_above)
        return {MajorizationRelation::WeaklyMajorizedBy, first_raw_below};
    if (first_raw_above && !first_raw_below)
        return {MajorizationRelation::WeaklyMajorizes, first_raw_above};
    return {MajorizationRelation::EqualUpToPermutation, std::nullopt};
}

/// Draws a base pmf uniformly from the simplex interior and applies 1..max_transforms
/// Robin-Hood transfers p = lambda*q + (1-lambda)*swap_ij(q), producing a pair
/// with first strictly majorized by second. The strictness is self-checked
/// through majorization_compare; degenerate draws (lambda or the coordinate
/// pair leaving the partial sums tied) are redrawn, with a bounded retry
/// budget.
[[nodiscard]] inline std::pair<Pmf, Pmf> random_majorization_pair(Eigen::Index k,
                                                                  std::uint64_t seed,
                                                                  int max_transforms = 3) {
    if (k < 2) throw ValidationError("random_majorization_pair: need k >= 2");
    if (max_transforms < 1)
        throw ValidationError("random_majorization_pair: need at least one transform");
    std::mt19937_64 gen(seed);
    for (int attempt = 0; attempt < 100; ++attempt) {
        const Eigen::VectorXd base = random_simplex_point(k, gen);
        Eigen::VectorXd mixed = base;
        const std::uint64_t count =
            1 + bounded_rand(gen, static_cast<std::uint64_t>(max_transforms));
        for (std::uint64_t t = 0; t < count; ++t) {
            const auto i = static_cast<Eigen::Index>(bounded_rand(gen, static_cast<std::uint64_t>(k)));
            auto j = static_cast<Eigen::Index>(bounded_rand(gen, static_cast<std::uint64_t>(k - 1)));
            if (j >= i) ++j;
            const double lambda = u01_open(gen);
            const double vi = mixed[i], vj = mixed[j];
            mixed[i] = lambda * vi + (1.0 - lambda) * vj;
            mixed[j] = lambda * vj + (1.0 - lambda) * vi;
        }
        Pmf first(mixed);
        Pmf second(base);
        if (majorization_compare(first, second).relation ==
            MajorizationRelation::StrictlyMajorizedBy)
            return {std::move(first), std::move(second)};
    }
    throw DomainError("random_majorization_pair: no strict pair after 100 attempts");
}

}  // namespace catspread
