#pragma once

#include <Eigen/Core>

#include <string>
#include <utility>
#include <vector>

#include "catspread/errors.hpp"

namespace catspread {

/// Mass assignments may deviate from exact unit sum by this much before they
/// are rejected.
inline constexpr double kSimplexTolerance = 1e-9;

/// A probability mass function on K >= 1 categories, stored as an Eigen vector
/// on the closed simplex: entries are nonnegative (zeros allowed) and sum to 1
/// within kSimplexTolerance. Optional category labels ride along for reporting;
/// they carry no semantics.
template <typename Scalar_>
class BasicPmf {
public:
    using Scalar = Scalar_;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    explicit BasicPmf(Vector probs, std::vector<std::string> labels = {})
        : probs_(std::move(probs)), labels_(std::move(labels)) {
        validate();
    }

    /// Equal mass on k categories.
    [[nodiscard]] static BasicPmf uniform(Eigen::Index k) {
        if (k < 1) throw ValidationError("pmf: need at least one category");
        return BasicPmf(Vector::Constant(k, Scalar(1) / Scalar(k)));
    }

    /// All mass on category `at` (zero-based) out of k.
    [[nodiscard]] static BasicPmf degenerate(Eigen::Index k, Eigen::Index at) {
        if (k < 1) throw ValidationError("pmf: need at least one category");
        if (at < 0 || at >= k) throw ValidationError("pmf: degenerate index out of range");
        Vector v = Vector::Zero(k);
        v[at] = Scalar(1);
        return BasicPmf(std::move(v));
    }

    /// Divides `raw` by its sum before validating. The sum must land in
    /// [0.5, 2]: anything further off is treated as corrupt input rather than
    /// rounding noise.
    [[nodiscard]] static BasicPmf renormalized(Vector raw, std::vector<std::string> labels = {}) {
        if (raw.size() < 1) throw ValidationError("pmf: need at least one category");
        const Scalar sum = raw.sum();
        if (!(sum >= Scalar(0.5) && sum <= Scalar(2.0)))
            throw ValidationError("pmf: refusing to renormalize, sum " + std::to_string(double(sum)) +
                                  " outside [0.5, 2]");
        raw /= sum;
        return BasicPmf(std::move(raw), std::move(labels));
    }

    [[nodiscard]] Eigen::Index size() const noexcept { return probs_.size(); }
    [[nodiscard]] Scalar operator[](Eigen::Index k) const { return probs_[k]; }
    [[nodiscard]] const Vector& probs() const noexcept { return probs_; }

    /// Empty when the pmf was built without labels.
    [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }

private:
    void validate() const {
        if (probs_.size() < 1) throw ValidationError("pmf: need at least one category");
        // The >= comparison is false for NaN, so non-finite entries fail here too.
        if (!(probs_.array() >= Scalar(0)).all())
            throw ValidationError("pmf: entries must be nonnegative and finite");
        if (!probs_.allFinite()) throw ValidationError("pmf: entries must be finite");
        const Scalar sum = probs_.sum();
        using std::abs;
        if (!(abs(sum - Scalar(1)) <= Scalar(kSimplexTolerance)))
            throw ValidationError("pmf: entries sum to " + std::to_string(double(sum)) +
                                  ", expected 1 within 1e-9");
        if (!labels_.empty() && static_cast<Eigen::Index>(labels_.size()) != probs_.size())
            throw ValidationError("pmf: label count does not match category count");
    }

    Vector probs_;
    std::vector<std::string> labels_;
};

using Pmf = BasicPmf<double>;

}  // namespace catspread
