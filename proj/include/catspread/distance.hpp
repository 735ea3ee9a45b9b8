#pragma once

#include <Eigen/Core>

#include <cmath>
#include <string>
#include <utility>

#include "catspread/errors.hpp"

namespace catspread {

/// A distance between categories, viewed through their one-hot encodings.
/// The built-in families all assign one value to same-category pairs and one
/// to different-category pairs; Matrix carries arbitrary pairwise distances.
class DistanceSpec {
public:
    enum class Kind { Euclidean, AlphaPower, GaussianKernel, TwoConstant, Matrix };

    /// ||z - z'||: 0 on the diagonal, sqrt(2) off it.
    [[nodiscard]] static DistanceSpec euclidean() { return DistanceSpec(Kind::Euclidean); }

    /// ||z - z'||^alpha with alpha in (0, 2].
    [[nodiscard]] static DistanceSpec alpha_power(double alpha) {
        if (!(alpha > 0.0 && alpha <= 2.0))
            throw ValidationError("alpha_power: alpha must lie in (0, 2], got " + std::to_string(alpha));
        DistanceSpec s(Kind::AlphaPower);
        s.a_ = alpha;
        return s;
    }

    /// Kernel value exp(-||z - z'|| / sigma_sq) with sigma_sq > 0, used in
    /// place of a distance. Same-category pairs score exp(0) = 1, distinct
    /// pairs exp(-sqrt(2)/sigma_sq), so the diagonal is nonzero.
    [[nodiscard]] static DistanceSpec gaussian_kernel(double sigma_sq) {
        if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq))
            throw ValidationError("gaussian_kernel: sigma_sq must be positive and finite, got " +
                                  std::to_string(sigma_sq));
        DistanceSpec s(Kind::GaussianKernel);
        s.a_ = sigma_sq;
        return s;
    }

    /// c1 on the diagonal, c2 off it, c1 != c2. Both constants must be
    /// nonnegative; the diagonal is allowed to exceed the off-diagonal.
    [[nodiscard]] static DistanceSpec two_constant(double c1, double c2) {
        if (!std::isfinite(c1) || !std::isfinite(c2) || c1 < 0.0 || c2 < 0.0)
            throw ValidationError("two_constant: constants must be finite and nonnegative");
        if (c1 == c2) throw ValidationError("two_constant: c1 and c2 must differ");
        DistanceSpec s(Kind::TwoConstant);
        s.a_ = c1;
        s.b_ = c2;
        return s;
    }

    /// Explicit pairwise distances: square, symmetric within 1e-12, entries
    /// finite and nonnegative. The diagonal need not be zero.
    [[nodiscard]] static DistanceSpec matrix(Eigen::MatrixXd d) {
        if (d.rows() < 1 || d.rows() != d.cols())
            throw ValidationError("distance matrix must be square and nonempty");
        if (!d.allFinite() || (d.array() < 0.0).any())
            throw ValidationError("distance matrix entries must be finite and nonnegative");
        if (((d - d.transpose()).array().abs() > 1e-12).any())
            throw ValidationError("distance matrix must be symmetric within 1e-12");
        DistanceSpec s(Kind::Matrix);
        s.mat_ = std::move(d);
        return s;
    }

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] double alpha() const noexcept { return a_; }
    [[nodiscard]] double sigma_sq() const noexcept { return a_; }
    [[nodiscard]] double c1() const noexcept { return a_; }
    [[nodiscard]] double c2() const noexcept { return b_; }
    [[nodiscard]] const Eigen::MatrixXd& matrix_values() const { return mat_; }

    /// Distance between identical categories. For every built-in family this
    /// is constant across categories.
    [[nodiscard]] double same_distance() const {
        switch (kind_) {
            case Kind::Euclidean: return 0.0;
            case Kind::AlphaPower: return 0.0;
            case Kind::GaussianKernel: return 1.0;
            case Kind::TwoConstant: return a_;
            case Kind::Matrix: break;
        }
        throw DomainError("same_distance: not a two-value family");
    }

    /// Distance between distinct categories.
    [[nodiscard]] double diff_distance() const {
        switch (kind_) {
            case Kind::Euclidean: return std::sqrt(2.0);
            case Kind::AlphaPower: return std::pow(2.0, a_ / 2.0);
            case Kind::GaussianKernel: return std::exp(-std::sqrt(2.0) / a_);
            case Kind::TwoConstant: return b_;
            case Kind::Matrix: break;
        }
        throw DomainError("diff_distance: not a two-value family");
    }

    /// Multiplier s such that the distance variance equals s times the shared
    /// base term. Equals |diff - same| for the two-value families.
    [[nodiscard]] double scale_factor() const {
        switch (kind_) {
            case Kind::Euclidean: return std::sqrt(2.0);
            case Kind::AlphaPower: return std::pow(2.0, a_ / 2.0);
            case Kind::GaussianKernel: return 1.0 - std::exp(-std::sqrt(2.0) / a_);
            case Kind::TwoConstant: return std::abs(a_ - b_);
            case Kind::Matrix: break;
        }
        throw DomainError("scale_factor: explicit matrices have no closed-form scale");
    }

    /// The k x k distance matrix this spec realizes. For Matrix kind, k must
    /// match the stored dimension.
    [[nodiscard]] Eigen::MatrixXd category_matrix(Eigen::Index k) const {
        if (k < 1) throw ValidationError("category_matrix: need at least one category");
        if (kind_ == Kind::Matrix) {
            if (mat_.rows() != k)
                throw ValidationError("distance matrix is " + std::to_string(mat_.rows()) + "x" +
                                      std::to_string(mat_.cols()) + " but the pmf has " +
                                      std::to_string(k) + " categories");
            return mat_;
        }
        Eigen::MatrixXd d = Eigen::MatrixXd::Constant(k, k, diff_distance());
        d.diagonal().setConstant(same_distance());
        return d;
    }

private:
    explicit DistanceSpec(Kind kind) : kind_(kind) {}

    Kind kind_;
    double a_ = 0.0;
    double b_ = 0.0;
    Eigen::MatrixXd mat_;
};

}  // namespace catspread
