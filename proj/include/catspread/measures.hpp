#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "catspread/distance.hpp"
#include "catspread/errors.hpp"
#include "catspread/pmf.hpp"
#include "catspread/weights.hpp"

namespace catspread {

/// Marker for the max-norm variants of the spread families.
inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

namespace detail {

/// Combines the three pairwise-distance moments into a spread value:
/// sqrt(E[d12^2] + E[d12]^2 - 2 E[d12 d13]). The inner expression is a
/// population variance of a double-centered kernel, hence nonnegative in
/// exact arithmetic for any symmetric distance matrix; catastrophic
/// cancellation can still drive it slightly negative in floating point.
/// Noise within 1e-12 of zero is clamped, anything worse is refused.
template <typename Scalar>
[[nodiscard]] Scalar spread_from_moments(Scalar e_d2, Scalar e_d, Scalar e_dd) {
    const Scalar inner = e_d2 + e_d * e_d - Scalar(2) * e_dd;
    if (inner < Scalar(-1e-12))
        throw DomainError("distance moments are numerically inconsistent: variance expression " +
                          std::to_string(double(inner)) + " is negative beyond tolerance");
    using std::sqrt;
    return sqrt(std::max(Scalar(0), inner));
}

}  // namespace detail

/// Shared kernel of every two-value distance family:
/// sqrt((sum pi^2)^2 + sum pi^2 - 2 sum pi^3).
/// Zero exactly at one-hot vectors, maximal at the uniform pmf.
template <typename Derived>
[[nodiscard]] typename Derived::Scalar base_term(const Eigen::MatrixBase<Derived>& probs) {
    using Scalar = typename Derived::Scalar;
    const typename Derived::PlainObject v = probs.derived();
    const Scalar s2 = v.array().square().sum();
    const Scalar s3 = v.array().cube().sum();
    const Scalar inner = s2 * s2 + s2 - Scalar(2) * s3;
    using std::sqrt;
    return sqrt(std::max(Scalar(0), inner));
}

template <typename Scalar>
[[nodiscard]] Scalar base_term(const BasicPmf<Scalar>& pmf) {
    return base_term(pmf.probs());
}

/// Spread under an explicit pairwise distance matrix:
/// sqrt(E[d(X1,X2)^2] + E[d(X1,X2)]^2 - 2 E[d(X1,X2) d(X1,X3)]) with X1, X2,
/// X3 i.i.d. from `probs`. The matrix must be square of matching size and
/// symmetric within 1e-12; entries may be negative (log-ratio distances are).
template <typename DerivedV, typename DerivedM>
[[nodiscard]] typename DerivedV::Scalar generalized_distance_variance(
    const Eigen::MatrixBase<DerivedV>& probs, const Eigen::MatrixBase<DerivedM>& dist) {
    using Scalar = typename DerivedV::Scalar;
    const typename DerivedV::PlainObject v = probs.derived();
    const typename DerivedM::PlainObject d = dist.derived();
    if (d.rows() != d.cols())
        throw ValidationError("generalized_distance_variance: distance matrix must be square");
    if (d.rows() != v.size())
        throw ValidationError("generalized_distance_variance: matrix is " + std::to_string(d.rows()) +
                              "x" + std::to_string(d.cols()) + " but the pmf has " +
                              std::to_string(v.size()) + " categories");
    if (!d.allFinite())
        throw ValidationError("generalized_distance_variance: matrix entries must be finite");
    if (((d - d.transpose()).array().abs() > Scalar(1e-12)).any())
        throw ValidationError("generalized_distance_variance: matrix must be symmetric within 1e-12");

    const typename DerivedV::PlainObject row_means = d * v;
    const Scalar e_d2 = v.dot((d.array().square().matrix() * v).eval());
    const Scalar e_d = v.dot(row_means);
    const Scalar e_dd = (v.array() * row_means.array().square()).sum();
    return detail::spread_from_moments(e_d2, e_d, e_dd);
}

template <typename Scalar, typename DerivedM>
[[nodiscard]] Scalar generalized_distance_variance(const BasicPmf<Scalar>& pmf,
                                                   const Eigen::MatrixBase<DerivedM>& dist) {
    return generalized_distance_variance(pmf.probs(), dist);
}

/// Distance variance of a categorical variable under the given distance
/// family. Two-value families reduce to scale_factor() times base_term();
/// explicit matrices go through the moment form.
template <typename Derived>
[[nodiscard]] typename Derived::Scalar distance_variance(
    const Eigen::MatrixBase<Derived>& probs, const DistanceSpec& spec = DistanceSpec::euclidean()) {
    using Scalar = typename Derived::Scalar;
    if (spec.kind() == DistanceSpec::Kind::Matrix)
        return generalized_distance_variance(probs, spec.matrix_values().template cast<Scalar>());
    return Scalar(spec.scale_factor()) * base_term(probs);
}

template <typename Scalar>
[[nodiscard]] Scalar distance_variance(const BasicPmf<Scalar>& pmf,
                                       const DistanceSpec& spec = DistanceSpec::euclidean()) {
    return distance_variance(pmf.probs(), spec);
}

/// Pairwise log-ratio distances d(k, l) = (log pi_k + log pi_l - 2 log s) /
/// (2 log s) with s = pi_k + pi_l. Requires strictly positive probabilities.
/// Pairs with s = 1 (within 1e-12) have a vanishing denominator and raise
/// DegenerateDenominatorError; passing zero_diagonal = true pins d(k, k) = 0
/// instead of evaluating the formula there, which also sidesteps the s = 2
/// pi_k degeneracy at pi_k = 1/2.
template <typename Scalar>
[[nodiscard]] Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> lin_distance_matrix(
    const BasicPmf<Scalar>& pmf, bool zero_diagonal = false) {
    const auto& v = pmf.probs();
    const Eigen::Index k = v.size();
    if ((v.array() <= Scalar(0)).any())
        throw ValidationError("log-ratio distance requires strictly positive probabilities");
    using std::abs;
    using std::log;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> d(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = i; j < k; ++j) {
            if (zero_diagonal && i == j) {
                d(i, i) = Scalar(0);
                continue;
            }
            const Scalar s = v[i] + v[j];
            if (abs(s - Scalar(1)) <= Scalar(1e-12))
                throw DegenerateDenominatorError(static_cast<int>(i), static_cast<int>(j));
            const Scalar den = Scalar(2) * log(s);
            const Scalar val = (log(v[i]) + log(v[j]) - den) / den;
            d(i, j) = val;
            d(j, i) = val;
        }
    }
    return d;
}

/// Geometric spread family: sum_k w(pi_k) * ||Z(k) - E[Z]||_p^l, where Z(k)
/// is the one-hot vector of category k. The coordinates of Z(k) - E[Z] are
/// (1 - pi_k) in slot k and -pi_j elsewhere, so
///   ||.||_p^p = |1 - pi_k|^p + (sum_j |pi_j|^p - |pi_k|^p).
/// Requires l > 0 and p >= 1 (p = kInfNorm selects the max norm). Categories
/// with a zero norm contribute nothing and their weight is never evaluated,
/// so divergent weights like -log(1 - pi) stay usable on the simplex.
template <typename Derived>
[[nodiscard]] typename Derived::Scalar geometric_family(const Eigen::MatrixBase<Derived>& probs,
                                                        const WeightFunction& w, double l, double p) {
    using Scalar = typename Derived::Scalar;
    if (!(l > 0.0) || !std::isfinite(l))
        throw ValidationError("geometric_family: exponent l must be positive and finite");
    if (!(p >= 1.0))
        throw ValidationError("geometric_family: norm order p must be >= 1 (or kInfNorm)");
    const typename Derived::PlainObject v = probs.derived();
    const Eigen::Index k = v.size();
    using std::abs;
    using std::pow;
    Scalar acc(0);
    if (p == kInfNorm) {
        for (Eigen::Index i = 0; i < k; ++i) {
            Scalar norm = abs(Scalar(1) - v[i]);
            for (Eigen::Index j = 0; j < k; ++j)
                if (j != i) norm = std::max(norm, abs(v[j]));
            if (norm == Scalar(0)) continue;
            acc += Scalar(w(double(v[i]))) * pow(norm, Scalar(l));
        }
        return acc;
    }
    const Scalar sp = v.array().abs().pow(Scalar(p)).sum();
    for (Eigen::Index i = 0; i < k; ++i) {
        const Scalar self = pow(abs(v[i]), Scalar(p));
        const Scalar norm_p = pow(abs(Scalar(1) - v[i]), Scalar(p)) + std::max(Scalar(0), sp - self);
        if (norm_p == Scalar(0)) continue;
        // l == p keeps the exponent at exactly 1.
        acc += Scalar(w(double(v[i]))) * pow(norm_p, Scalar(l / p));
    }
    return acc;
}

template <typename Scalar>
[[nodiscard]] Scalar geometric_family(const BasicPmf<Scalar>& pmf, const WeightFunction& w,
                                      double l, double p) {
    return geometric_family(pmf.probs(), w, l, p);
}

/// Covariance matrix of the one-hot encoding: diag(pi) - pi pi^T.
template <typename Derived>
[[nodiscard]] Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
one_hot_covariance(const Eigen::MatrixBase<Derived>& probs) {
    const typename Derived::PlainObject v = probs.derived();
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> m =
        -(v * v.transpose());
    m.diagonal() += v;
    return m;
}

template <typename Scalar>
[[nodiscard]] Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> one_hot_covariance(
    const BasicPmf<Scalar>& pmf) {
    return one_hot_covariance(pmf.probs());
}

/// Algebraic spread family: the entrywise p-norm of the one-hot covariance,
///   { sum_k [pi_k (1 - pi_k)]^p + [ (sum_k pi_k^p)^2 - sum_k pi_k^(2p) ] }^(1/p),
/// where the bracketed part is the off-diagonal sum of (pi_k pi_l)^p. p =
/// kInfNorm gives the largest absolute entry. Requires p >= 1.
template <typename Derived>
[[nodiscard]] typename Derived::Scalar algebraic_family(const Eigen::MatrixBase<Derived>& probs,
                                                        double p) {
    using Scalar = typename Derived::Scalar;
    if (!(p >= 1.0))
        throw ValidationError("algebraic_family: norm order p must be >= 1 (or kInfNorm)");
    const typename Derived::PlainObject v = probs.derived();
    const Eigen::Index k = v.size();
    using std::abs;
    using std::pow;
    if (p == kInfNorm) {
        Scalar max_diag(0), top1(0), top2(0);
        for (Eigen::Index i = 0; i < k; ++i) {
            max_diag = std::max(max_diag, abs(v[i] * (Scalar(1) - v[i])));
            const Scalar a = abs(v[i]);
            if (a > top1) {
                top2 = top1;
                top1 = a;
            } else if (a > top2) {
                top2 = a;
            }
        }
        return std::max(max_diag, top1 * top2);
    }
    const Scalar diag = (v.array() * (Scalar(1) - v.array())).abs().pow(Scalar(p)).sum();
    // The off-diagonal block (sum pi^p)^2 - sum pi^(2p) is summed pair by
    // pair: the difference-of-squares form cancels catastrophically when one
    // category dominates.
    Scalar off(0);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = i + 1; j < k; ++j) off += pow(abs(v[i] * v[j]), Scalar(p));
    return pow(diag + Scalar(2) * off, Scalar(1) / Scalar(p));
}

template <typename Scalar>
[[nodiscard]] Scalar algebraic_family(const BasicPmf<Scalar>& pmf, double p) {
    return algebraic_family(pmf.probs(), p);
}

/// Shannon entropy -sum pi log pi in nats, with 0 log 0 = 0.
template <typename Derived>
[[nodiscard]] typename Derived::Scalar shannon(const Eigen::MatrixBase<Derived>& probs) {
    using Scalar = typename Derived::Scalar;
    const typename Derived::PlainObject v = probs.derived();
    using std::log;
    Scalar acc(0);
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (v[i] > Scalar(0)) acc -= v[i] * log(v[i]);
    return acc;
}

/// Order-m entropy (1 - sum pi^m) / (m - 1) for m > 0. Within 1e-8 of m = 1
/// the expression is numerically indeterminate and the Shannon limit is
/// returned instead.
template <typename Derived>
[[nodiscard]] typename Derived::Scalar tsallis(const Eigen::MatrixBase<Derived>& probs, double m) {
    using Scalar = typename Derived::Scalar;
    if (!(m > 0.0) || !std::isfinite(m))
        throw ValidationError("tsallis: order m must be positive and finite");
    if (std::abs(m - 1.0) < 1e-8) return shannon(probs);
    const typename Derived::PlainObject v = probs.derived();
    using std::pow;
    Scalar sum(0);
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (v[i] > Scalar(0)) sum += pow(v[i], Scalar(m));
    return (Scalar(1) - sum) / Scalar(m - 1);
}

/// Gini heterogeneity 1 - sum pi^2.
template <typename Derived>
[[nodiscard]] typename Derived::Scalar gini(const Eigen::MatrixBase<Derived>& probs) {
    using Scalar = typename Derived::Scalar;
    return Scalar(1) - probs.derived().array().square().sum();
}

/// Extropy -sum (1 - pi) log(1 - pi) in nats, with 0 log 0 = 0 applied to the
/// complements.
template <typename Derived>
[[nodiscard]] typename Derived::Scalar extropy(const Eigen::MatrixBase<Derived>& probs) {
    using Scalar = typename Derived::Scalar;
    const typename Derived::PlainObject v = probs.derived();
    using std::log;
    Scalar acc(0);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const Scalar c = Scalar(1) - v[i];
        if (c > Scalar(0)) acc -= c * log(c);
    }
    return acc;
}

template <typename Scalar>
[[nodiscard]] Scalar shannon(const BasicPmf<Scalar>& pmf) {
    return shannon(pmf.probs());
}
template <typename Scalar>
[[nodiscard]] Scalar tsallis(const BasicPmf<Scalar>& pmf, double m) {
    return tsallis(pmf.probs(), m);
}
template <typename Scalar>
[[nodiscard]] Scalar gini(const BasicPmf<Scalar>& pmf) {
    return gini(pmf.probs());
}
template <typename Scalar>
[[nodiscard]] Scalar extropy(const BasicPmf<Scalar>& pmf) {
    return extropy(pmf.probs());
}

}  // namespace catspread
