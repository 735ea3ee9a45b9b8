#pragma once

#include <Eigen/Core>

#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "catspread/distance.hpp"
#include "catspread/measures.hpp"
#include "catspread/pmf.hpp"
#include "catspread/weights.hpp"

namespace catspread {

/// A named spread functional Delta(pi). Besides evaluating on validated pmfs,
/// a descriptor evaluates on raw coordinate vectors so derivative probes can
/// step slightly off the simplex; the raw path applies the same algebra
/// without simplex checks.
class MeasureDescriptor {
public:
    using Evaluator = std::function<double(const Eigen::VectorXd&)>;

    [[nodiscard]] static MeasureDescriptor distance_variance(
        DistanceSpec spec = DistanceSpec::euclidean()) {
        std::string name = "dvar";
        switch (spec.kind()) {
            case DistanceSpec::Kind::Euclidean: break;
            case DistanceSpec::Kind::AlphaPower:
                name += ":alpha=" + detail::format_param(spec.alpha());
                break;
            case DistanceSpec::Kind::GaussianKernel:
                name += ":sigma2=" + detail::format_param(spec.sigma_sq());
                break;
            case DistanceSpec::Kind::TwoConstant:
                name += ":c1=" + detail::format_param(spec.c1()) +
                        ",c2=" + detail::format_param(spec.c2());
                break;
            case DistanceSpec::Kind::Matrix:
                name += ":matrix(" + std::to_string(spec.matrix_values().rows()) + ")";
                break;
        }
        return MeasureDescriptor(std::move(name), [spec = std::move(spec)](const Eigen::VectorXd& v) {
            return catspread::distance_variance(v, spec);
        });
    }

    [[nodiscard]] static MeasureDescriptor geometric(WeightFunction w, double l, double p) {
        // Validate eagerly so descriptor construction, not first evaluation, reports bad parameters.
        (void)catspread::geometric_family(Eigen::VectorXd::Constant(1, 1.0), w, l, p);
        std::string name = "geom:w=" + w.name() + ",l=" + detail::format_param(l) +
                           ",p=" + (p == kInfNorm ? std::string("inf") : detail::format_param(p));
        return MeasureDescriptor(std::move(name), [w = std::move(w), l, p](const Eigen::VectorXd& v) {
            return catspread::geometric_family(v, w, l, p);
        });
    }

    [[nodiscard]] static MeasureDescriptor algebraic(double p) {
        (void)catspread::algebraic_family(Eigen::VectorXd::Constant(1, 1.0), p);
        std::string name =
            "alg:p=" + (p == kInfNorm ? std::string("inf") : detail::format_param(p));
        return MeasureDescriptor(std::move(name),
                                 [p](const Eigen::VectorXd& v) { return catspread::algebraic_family(v, p); });
    }

    [[nodiscard]] static MeasureDescriptor tsallis(double m) {
        (void)catspread::tsallis(Eigen::VectorXd::Constant(1, 1.0), m);
        return MeasureDescriptor("tsallis:m=" + detail::format_param(m),
                                 [m](const Eigen::VectorXd& v) { return catspread::tsallis(v, m); });
    }

    [[nodiscard]] static MeasureDescriptor shannon() {
        return MeasureDescriptor("shannon",
                                 [](const Eigen::VectorXd& v) { return catspread::shannon(v); });
    }

    [[nodiscard]] static MeasureDescriptor gini() {
        return MeasureDescriptor("gini", [](const Eigen::VectorXd& v) { return catspread::gini(v); });
    }

    [[nodiscard]] static MeasureDescriptor extropy() {
        return MeasureDescriptor("extropy",
                                 [](const Eigen::VectorXd& v) { return catspread::extropy(v); });
    }

    [[nodiscard]] static MeasureDescriptor custom(std::string name, Evaluator fn) {
        if (!fn) throw ValidationError("custom measure: callable required");
        return MeasureDescriptor(std::move(name), std::move(fn));
    }

    [[nodiscard]] double operator()(const Pmf& pmf) const { return eval_(pmf.probs()); }
    [[nodiscard]] double evaluate(const Eigen::VectorXd& coords) const { return eval_(coords); }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }

private:
    MeasureDescriptor(std::string name, Evaluator fn)
        : name_(std::move(name)), eval_(std::move(fn)) {}

    std::string name_;
    Evaluator eval_;
};

namespace detail {

[[nodiscard]] inline double parse_double_strict(const std::string& field, const std::string& text) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || text.empty())
        throw ValidationError("measure spec: cannot parse " + field + " value '" + text + "'");
    return v;
}

[[nodiscard]] inline double parse_norm_order(const std::string& text) {
    if (text == "inf" || text == "infinity") return kInfNorm;
    return parse_double_strict("p", text);
}

/// Splits "k1=v1,k2=v2" into a map, rejecting duplicates and stray tokens.
[[nodiscard]] inline std::map<std::string, std::string> parse_kv_list(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string item = text.substr(pos, comma - pos);
        const std::size_t eq = item.find('=');
        if (item.empty() || eq == std::string::npos || eq == 0 || eq == item.size() - 1)
            throw ValidationError("measure spec: expected key=value, got '" + item + "'");
        if (!kv.emplace(item.substr(0, eq), item.substr(eq + 1)).second)
            throw ValidationError("measure spec: duplicate key '" + item.substr(0, eq) + "'");
        pos = comma + 1;
    }
    return kv;
}

}  // namespace detail

/// Builds a descriptor from the compact spec grammar:
///   dvar[:alpha=A | sigma2=S | c1=X,c2=Y]
///   gini | shannon | extropy
///   tsallis:m=M
///   geom:w=W,l=L,p=P        W in {power, tsallissum, neglog, exp, sin};
///                           power takes q=Q, tsallissum takes m=M and
///                           optionally s=0|1
///   alg:p=P
/// p accepts "inf" for the max norm. Raises ValidationError on anything else.
[[nodiscard]] inline MeasureDescriptor parse_measure_spec(const std::string& text) {
    const std::size_t colon = text.find(':');
    const std::string family = text.substr(0, colon);
    const bool has_args = colon != std::string::npos;
    const std::string args = has_args ? text.substr(colon + 1) : std::string();

    auto no_args = [&](const char* what) {
        if (has_args) throw ValidationError(std::string("measure spec: ") + what + " takes no arguments");
    };

    if (family == "gini") {
        no_args("gini");
        return MeasureDescriptor::gini();
    }
    if (family == "shannon") {
        no_args("shannon");
        return MeasureDescriptor::shannon();
    }
    if (family == "extropy") {
        no_args("extropy");
        return MeasureDescriptor::extropy();
    }

    auto kv = has_args ? detail::parse_kv_list(args) : std::map<std::string, std::string>{};
    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto finish = [&]() {
        if (!kv.empty())
            throw ValidationError("measure spec: unknown key '" + kv.begin()->first + "' for family '" +
                                  family + "'");
    };
    auto require = [&](const char* key) {
        auto v = take(key);
        if (!v)
            throw ValidationError("measure spec: family '" + family + "' requires key '" + key + "'");
        return *v;
    };

    if (family == "dvar") {
        auto alpha = take("alpha");
        auto sigma2 = take("sigma2");
        auto c1 = take("c1");
        auto c2 = take("c2");
        finish();
        const int variants = (alpha ? 1 : 0) + (sigma2 ? 1 : 0) + (c1 || c2 ? 1 : 0);
        if (variants > 1)
            throw ValidationError("measure spec: dvar accepts only one of alpha, sigma2, or c1/c2");
        if (alpha)
            return MeasureDescriptor::distance_variance(
                DistanceSpec::alpha_power(detail::parse_double_strict("alpha", *alpha)));
        if (sigma2)
            return MeasureDescriptor::distance_variance(
                DistanceSpec::gaussian_kernel(detail::parse_double_strict("sigma2", *sigma2)));
        if (c1 || c2) {
            if (!c1 || !c2) throw ValidationError("measure spec: dvar needs both c1 and c2");
            return MeasureDescriptor::distance_variance(
                DistanceSpec::two_constant(detail::parse_double_strict("c1", *c1),
                                           detail::parse_double_strict("c2", *c2)));
        }
        return MeasureDescriptor::distance_variance();
    }
    if (family == "tsallis") {
        const double m = detail::parse_double_strict("m", require("m"));
        finish();
        return MeasureDescriptor::tsallis(m);
    }
    if (family == "alg") {
        const double p = detail::parse_norm_order(require("p"));
        finish();
        return MeasureDescriptor::algebraic(p);
    }
    if (family == "geom") {
        const std::string wname = require("w");
        const double l = detail::parse_double_strict("l", require("l"));
        const double p = detail::parse_norm_order(require("p"));
        std::optional<WeightFunction> w;
        if (wname == "power") {
            w = WeightFunction::power(detail::parse_double_strict("q", require("q")));
        } else if (wname == "tsallissum") {
            const double m = detail::parse_double_strict("m", require("m"));
            if (m != static_cast<int>(m))
                throw ValidationError("measure spec: tsallissum m must be an integer");
            int s = 1;
            if (auto sv = take("s")) s = static_cast<int>(detail::parse_double_strict("s", *sv));
            w = WeightFunction::tsallis_sum(static_cast<int>(m), s);
        } else if (wname == "neglog") {
            w = WeightFunction::neg_log_complement();
        } else if (wname == "exp") {
            w = WeightFunction::exponential();
        } else if (wname == "sin") {
            w = WeightFunction::sine();
        } else {
            throw ValidationError("measure spec: unknown weight '" + wname +
                                  "', expected power, tsallissum, neglog, exp, or sin");
        }
        finish();
        return MeasureDescriptor::geometric(std::move(*w), l, p);
    }
    throw ValidationError("measure spec: unknown family '" + family + "'");
}

}  // namespace catspread
