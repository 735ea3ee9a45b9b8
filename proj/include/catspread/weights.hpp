#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "catspread/errors.hpp"

namespace catspread {

namespace detail {

/// Compact numeric formatting for descriptor names: no trailing zeros.
inline std::string format_param(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

}  // namespace detail

/// Per-category weight w(pi_k) applied by the geometric spread family. Weights
/// are evaluated in double precision; a non-finite result raises DomainError
/// rather than propagating inf/NaN into a sum.
class WeightFunction {
public:
    /// pi^q with q >= 0, using the convention 0^0 = 1.
    [[nodiscard]] static WeightFunction power(double q) {
        if (!(q >= 0.0) || !std::isfinite(q))
            throw ValidationError("power weight: exponent must be nonnegative and finite");
        return WeightFunction("power(" + detail::format_param(q) + ")", [q](double p) {
            if (q == 0.0) return 1.0;
            return std::pow(p, q);
        });
    }

    /// (1/(m-1)) * sum_{q=start_index}^{m-1} pi^q for integer m >= 2. With
    /// start_index 1 the geometric family built on this weight telescopes to
    /// twice the order-m entropy of the same pmf; start_index 0 adds a
    /// constant 1/(m-1) to every category's weight.
    [[nodiscard]] static WeightFunction tsallis_sum(int m, int start_index = 1) {
        if (m < 2) throw ValidationError("tsallis_sum weight: m must be an integer >= 2");
        if (start_index != 0 && start_index != 1)
            throw ValidationError("tsallis_sum weight: start_index must be 0 or 1");
        std::string name = "tsallissum(m=" + std::to_string(m) +
                           ",s=" + std::to_string(start_index) + ")";
        return WeightFunction(std::move(name), [m, start_index](double p) {
            double sum = 0.0;
            for (int q = start_index; q <= m - 1; ++q) sum += std::pow(p, q);
            return sum / (m - 1);
        });
    }

    /// -log(1 - pi). Diverges as pi -> 1; the evaluation guard reports that
    /// as a domain error instead of returning inf.
    [[nodiscard]] static WeightFunction neg_log_complement() {
        return WeightFunction("neglog", [](double p) { return -std::log1p(-p); });
    }

    [[nodiscard]] static WeightFunction exponential() {
        return WeightFunction("exp", [](double p) { return std::exp(p); });
    }

    [[nodiscard]] static WeightFunction sine() {
        return WeightFunction("sin", [](double p) { return std::sin(p); });
    }

    [[nodiscard]] static WeightFunction custom(std::string name, std::function<double(double)> fn) {
        if (!fn) throw ValidationError("custom weight: callable required");
        return WeightFunction(std::move(name), std::move(fn));
    }

    [[nodiscard]] double operator()(double p) const {
        const double w = fn_(p);
        if (!std::isfinite(w))
            throw DomainError("weight '" + name_ + "' is not finite at pi = " + std::to_string(p));
        return w;
    }

    [[nodiscard]] const std::string& name() const noexcept { return name_; }

private:
    WeightFunction(std::string name, std::function<double(double)> fn)
        : name_(std::move(name)), fn_(std::move(fn)) {}

    std::string name_;
    std::function<double(double)> fn_;
};

}  // namespace catspread
