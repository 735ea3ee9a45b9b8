#pragma once

#include <Eigen/Core>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "catspread/axioms.hpp"
#include "catspread/errors.hpp"
#include "catspread/estimation.hpp"
#include "catspread/measures.hpp"
#include "catspread/pmf.hpp"

namespace catspread::io {

/// Fixed 12 decimal places, '.' separator, locale-independent. A value that
/// rounds to all zeros never keeps a minus sign, so reports cannot disagree
/// about zero.
[[nodiscard]] inline std::string format_fixed12(double x) {
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::fixed, 12);
    std::string out(buf, res.ptr);
    if (out.front() == '-' && out.find_first_not_of("0.", 1) == std::string::npos)
        out.erase(0, 1);
    return out;
}

[[nodiscard]] inline std::string json_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char esc[8];
                    std::snprintf(esc, sizeof(esc), "\\u%04x", ch);
                    out += esc;
                } else {
                    out += ch;
                }
        }
    }
    return out;
}

namespace detail {

[[nodiscard]] inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

[[nodiscard]] inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

[[nodiscard]] inline double parse_number(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    if (t.empty()) throw ValidationError(where + ": empty numeric field");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw ValidationError(where + ": cannot parse number '" + t + "'");
    return v;
}

[[nodiscard]] inline bool looks_like_json(const std::string& text) {
    for (char ch : text) {
        if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') continue;
        return ch == '{' || ch == '[';
    }
    return false;
}

}  // namespace detail

/// JSON pmf document: {"probs": [...], "labels": [...] optional}.
[[nodiscard]] inline Pmf parse_pmf_json(const std::string& text, bool renormalize) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("pmf file: invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("probs") || !doc["probs"].is_array())
        throw ValidationError("pmf file: expected an object with a \"probs\" array");
    const auto& probs = doc["probs"];
    Eigen::VectorXd v(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!probs[i].is_number())
            throw ValidationError("pmf file: probs[" + std::to_string(i) + "] is not a number");
        v[static_cast<Eigen::Index>(i)] = probs[i].get<double>();
    }
    std::vector<std::string> labels;
    if (doc.contains("labels")) {
        if (!doc["labels"].is_array())
            throw ValidationError("pmf file: \"labels\" must be an array of strings");
        for (const auto& item : doc["labels"]) {
            if (!item.is_string())
                throw ValidationError("pmf file: \"labels\" must be an array of strings");
            labels.push_back(item.get<std::string>());
        }
    }
    return renormalize ? Pmf::renormalized(std::move(v), std::move(labels))
                       : Pmf(std::move(v), std::move(labels));
}

/// Two-column CSV with a header row: label,probability. Labels must not
/// contain commas.
[[nodiscard]] inline Pmf parse_pmf_csv(const std::string& text, bool renormalize) {
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    std::vector<double> probs;
    std::vector<std::string> labels;
    while (std::getline(in, line)) {
        const std::string row = detail::trim(line);
        if (row.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const std::size_t comma = row.find(',');
        if (comma == std::string::npos)
            throw ValidationError("pmf file: expected label,probability but got '" + row + "'");
        labels.push_back(detail::trim(row.substr(0, comma)));
        probs.push_back(detail::parse_number(row.substr(comma + 1), "pmf file"));
    }
    if (probs.empty()) throw ValidationError("pmf file: no data rows");
    Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(probs.data(), static_cast<Eigen::Index>(probs.size()));
    return renormalize ? Pmf::renormalized(std::move(v), std::move(labels))
                       : Pmf(std::move(v), std::move(labels));
}

/// Content-sniffing loader: a document starting with '{' parses as JSON,
/// anything else as headered CSV.
[[nodiscard]] inline Pmf read_pmf_file(const std::string& path, bool renormalize) {
    const std::string text = detail::read_file(path);
    return detail::looks_like_json(text) ? parse_pmf_json(text, renormalize)
                                         : parse_pmf_csv(text, renormalize);
}

/// Square matrix from a JSON array-of-arrays or headerless CSV of numbers.
[[nodiscard]] inline Eigen::MatrixXd read_matrix_file(const std::string& path) {
    const std::string text = detail::read_file(path);
    std::vector<std::vector<double>> rows;
    if (detail::looks_like_json(text)) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("matrix file: invalid JSON: ") + e.what());
        }
        if (!doc.is_array()) throw ValidationError("matrix file: expected an array of arrays");
        for (const auto& r : doc) {
            if (!r.is_array()) throw ValidationError("matrix file: expected an array of arrays");
            std::vector<double> row;
            for (const auto& item : r) {
                if (!item.is_number()) throw ValidationError("matrix file: non-numeric entry");
                row.push_back(item.get<double>());
            }
            rows.push_back(std::move(row));
        }
    } else {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            const std::string row_text = detail::trim(line);
            if (row_text.empty()) continue;
            std::vector<double> row;
            std::size_t pos = 0;
            while (pos <= row_text.size()) {
                std::size_t comma = row_text.find(',', pos);
                if (comma == std::string::npos) comma = row_text.size();
                row.push_back(detail::parse_number(row_text.substr(pos, comma - pos), "matrix file"));
                pos = comma + 1;
            }
            rows.push_back(std::move(row));
        }
    }
    if (rows.empty()) throw ValidationError("matrix file: no rows");
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
            throw ValidationError("matrix file: row " + std::to_string(i + 1) + " has " +
                                  std::to_string(rows[static_cast<std::size_t>(i)].size()) +
                                  " entries, expected " + std::to_string(n));
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return m;
}

/// One category label per line; blank lines and '#' comment lines ignored.
[[nodiscard]] inline Sample read_sample_file(const std::string& path) {
    const std::string text = detail::read_file(path);
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> observations;
    while (std::getline(in, line)) {
        const std::string label = detail::trim(line);
        if (label.empty() || label.front() == '#') continue;
        observations.push_back(label);
    }
    if (observations.empty()) throw ValidationError("sample file: no observations in " + path);
    return Sample(observations);
}

[[nodiscard]] inline const char* method_token(EstimatorKind kind) noexcept {
    return kind == EstimatorKind::UStatistic ? "ustat" : "paper";
}

[[nodiscard]] inline std::string estimate_to_json(const EstimateResult& r) {
    std::string out = "{\"estimate\": " + format_fixed12(r.estimate) + ", \"method\": \"" +
                      method_token(r.method) + "\", \"n\": " + std::to_string(r.n) +
                      ", \"K\": " + std::to_string(r.k);
    if (r.jackknife_se) out += ", \"jackknife_se\": " + format_fixed12(*r.jackknife_se);
    if (r.ci)
        out += ", \"ci\": [" + format_fixed12(r.ci->first) + ", " + format_fixed12(r.ci->second) + "]";
    if (r.confidence) out += ", \"confidence\": " + format_fixed12(*r.confidence);
    return out + "}";
}

namespace detail {

[[nodiscard]] inline std::string outcome_json(const CheckOutcome& c) {
    std::string out = "{\"status\": \"" + std::string(to_string(c.status)) +
                      "\", \"checked\": " + std::to_string(c.checked) +
                      ", \"violations\": " + std::to_string(c.violations) +
                      ", \"skipped\": " + std::to_string(c.skipped);
    if (!c.note.empty()) out += ", \"note\": \"" + json_escape(c.note) + "\"";
    return out + "}";
}

[[nodiscard]] inline std::string vector_json(const Eigen::VectorXd& v) {
    std::string out = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_fixed12(v[i]);
    }
    return out + "]";
}

}  // namespace detail

[[nodiscard]] inline std::string axiom_report_to_json(const AxiomReport& r) {
    std::string out = "{\"measure\": \"" + json_escape(r.measure) + "\"";
    out += ", \"seed\": " + std::to_string(r.options.seed);
    out += ", \"trials\": " + std::to_string(r.options.trials);
    out += ", \"kmin\": " + std::to_string(r.options.kmin);
    out += ", \"kmax\": " + std::to_string(r.options.kmax);
    out += std::string(", \"allowZeroProbs\": ") + (r.options.allow_zero_probs ? "true" : "false");
    out += ", \"axioms\": {";
    out += "\"A1\": {\"status\": \"" + std::string(to_string(r.a1.status)) + "\"";
    out += ", \"vertex\": " + detail::outcome_json(r.a1_vertex);
    out += ", \"interior\": " + detail::outcome_json(r.a1_interior) + "}";
    out += ", \"A2\": " + detail::outcome_json(r.a2);
    std::string a3 = detail::outcome_json(r.a3);
    a3.pop_back();  // reopen the object to append counterexamples
    a3 += ", \"counterexamples\": [";
    for (std::size_t i = 0; i < r.a3_counterexamples.size(); ++i) {
        const auto& ce = r.a3_counterexamples[i];
        if (i) a3 += ", ";
        a3 += "{\"pi\": " + detail::vector_json(ce.pi) + ", \"piPrime\": " +
              detail::vector_json(ce.pi_prime) + ", \"value\": " + format_fixed12(ce.value) +
              ", \"valuePrime\": " + format_fixed12(ce.value_prime) + "}";
    }
    a3 += "]}";
    out += ", \"A3\": " + a3;
    out += ", \"symmetry\": " + detail::outcome_json(r.symmetry);
    out += ", \"remark1\": " + detail::outcome_json(r.remark1);
    if (r.additivity) {
        out += ", \"additivity\": {\"status\": \"" + std::string(to_string(r.additivity->status)) +
               "\", \"trials\": " + std::to_string(r.additivity->trials) +
               ", \"skipped\": " + std::to_string(r.additivity->skipped) +
               ", \"worstResidual\": " + format_fixed12(r.additivity->worst_residual);
        if (!r.additivity->note.empty())
            out += ", \"note\": \"" + json_escape(r.additivity->note) + "\"";
        out += "}";
    }
    out += "}}";
    return out;
}

[[nodiscard]] inline std::string axiom_report_to_text(const AxiomReport& r) {
    auto line = [](const char* name, const CheckOutcome& c) {
        std::string s = std::string(name) + ": " + to_string(c.status) + " (checked " +
                        std::to_string(c.checked) + ", violations " + std::to_string(c.violations) +
                        ", skipped " + std::to_string(c.skipped) + ")";
        if (!c.note.empty()) s += "\n  note: " + c.note;
        return s + "\n";
    };
    std::string out = "measure: " + r.measure + "\n";
    out += "seed: " + std::to_string(r.options.seed) + "  trials: " + std::to_string(r.options.trials) +
           "  K: " + std::to_string(r.options.kmin) + ".." + std::to_string(r.options.kmax) + "\n";
    out += line("A1", r.a1);
    out += "  " + line("A1.vertex", r.a1_vertex);
    out += "  " + line("A1.interior", r.a1_interior);
    out += line("A2", r.a2);
    out += line("A3", r.a3);
    for (const auto& ce : r.a3_counterexamples)
        out += "  counterexample: pi=" + detail::vector_json(ce.pi) + " value=" +
               format_fixed12(ce.value) + " piPrime=" + detail::vector_json(ce.pi_prime) +
               " valuePrime=" + format_fixed12(ce.value_prime) + "\n";
    out += line("symmetry", r.symmetry);
    out += line("remark1", r.remark1);
    if (r.additivity) {
        out += "additivity: " + std::string(to_string(r.additivity->status)) + " (trials " +
               std::to_string(r.additivity->trials) + ", worst residual " +
               format_fixed12(r.additivity->worst_residual) + ")\n";
        if (!r.additivity->note.empty()) out += "  note: " + r.additivity->note + "\n";
    }
    out += std::string("overall: ") + (r.all_pass() ? "Pass" : "Fail") + "\n";
    return out;
}

/// Spread of the uniform pmf for K = 1..4; values computed, never tabulated.
[[nodiscard]] inline std::string figure2_csv() {
    std::string out = "K,distance_variance\n";
    for (Eigen::Index k = 1; k <= 4; ++k)
        out += std::to_string(k) + "," + format_fixed12(distance_variance(Pmf::uniform(k))) + "\n";
    return out;
}

/// The two six-category cases whose spread ordering contradicts their
/// majorization ordering.
[[nodiscard]] inline std::string figure3_csv() {
    Eigen::VectorXd skewed(6);
    skewed << 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.03125;
    std::string out = "case,distance_variance\n";
    out += "case1," + format_fixed12(distance_variance(Pmf(skewed))) + "\n";
    out += "case2," + format_fixed12(distance_variance(Pmf::uniform(6))) + "\n";
    return out;
}

}  // namespace catspread::io
