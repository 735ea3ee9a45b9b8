// catspread: spread measures for categorical distributions.
//
// Subcommands: measure, estimate, axioms, majorize, figures.
// Exit codes: 0 success (all checks pass), 1 usage error, 2 data error,
// 3 axiom violation detected.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "catspread/axioms.hpp"
#include "catspread/errors.hpp"
#include "catspread/estimation.hpp"
#include "catspread/io.hpp"
#include "catspread/majorization.hpp"
#include "catspread/measure_descriptor.hpp"
#include "catspread/measures.hpp"
#include "catspread/pmf.hpp"

namespace {

using namespace catspread;

int fail_usage(const std::string& what) {
    std::cerr << "error: " << what << std::endl;
    return 1;
}

int fail_data(const std::string& what) {
    std::cerr << "error: " << what << std::endl;
    return 2;
}

struct MeasureArgs {
    std::string pmf_file;
    std::string spec_text;
    bool renormalize = false;
    std::string matrix_file;
    bool lin = false;
    bool lin_zero_diag = false;
};

int run_measure(const MeasureArgs& a) {
    const int distance_flags = (a.matrix_file.empty() ? 0 : 1) + (a.lin ? 1 : 0) +
                               (a.lin_zero_diag ? 1 : 0);
    if (distance_flags > 1)
        return fail_usage("--matrix, --lin and --lin-zero-diag are mutually exclusive");
    if (distance_flags == 1 && a.spec_text != "dvar")
        return fail_usage("distance flags apply to the plain 'dvar' measure only, got '" +
                          a.spec_text + "'");

    std::optional<MeasureDescriptor> measure;
    if (distance_flags == 0) {
        try {
            measure = parse_measure_spec(a.spec_text);
        } catch (const ValidationError& e) {
            return fail_usage(e.what());
        }
    }

    try {
        const Pmf pmf = io::read_pmf_file(a.pmf_file, a.renormalize);
        double value = 0.0;
        if (!a.matrix_file.empty()) {
            const DistanceSpec spec = DistanceSpec::matrix(io::read_matrix_file(a.matrix_file));
            value = distance_variance(pmf, spec);
        } else if (a.lin || a.lin_zero_diag) {
            const Eigen::MatrixXd d = lin_distance_matrix(pmf, a.lin_zero_diag);
            value = generalized_distance_variance(pmf.probs(), d);
        } else {
            value = (*measure)(pmf);
        }
        std::cout << io::format_fixed12(value) << "\n";
        return 0;
    } catch (const std::exception& e) {
        return fail_data(e.what());
    }
}

struct EstimateArgs {
    std::string sample_file;
    std::string method = "ustat";
    std::optional<double> ci;
};

int run_estimate(const EstimateArgs& a) {
    if (a.ci && !(*a.ci > 0.0 && *a.ci < 1.0))
        return fail_usage("--ci level must lie strictly inside (0, 1)");
    const EstimatorKind kind =
        a.method == "paper" ? EstimatorKind::PaperFormula : EstimatorKind::UStatistic;
    try {
        const Sample sample = io::read_sample_file(a.sample_file);
        const Eigen::Index min_n = a.ci ? 5 : 4;
        if (sample.size() < min_n)
            return fail_data("sample has n = " + std::to_string(sample.size()) +
                             " observations; " +
                             (a.ci ? "a confidence interval requires n >= 5"
                                   : "estimation requires n >= 4"));
        const EstimateResult result =
            a.ci ? jackknife(sample, kind, *a.ci) : point_estimate(sample, kind);
        std::cout << io::estimate_to_json(result) << "\n";
        return 0;
    } catch (const std::exception& e) {
        return fail_data(e.what());
    }
}

struct AxiomArgs {
    std::string measure_text;
    long kmin = 2;
    long kmax = 8;
    long trials = 1000;
    std::uint64_t seed = 0;
    bool allow_zero_probs = false;
    bool with_additivity = false;
    std::string report = "json";
};

int run_axioms(const AxiomArgs& a) {
    if (a.kmin > a.kmax) return fail_usage("--kmin must not exceed --kmax");
    std::optional<MeasureDescriptor> measure;
    try {
        measure = parse_measure_spec(a.measure_text);
    } catch (const ValidationError& e) {
        return fail_usage(e.what());
    }
    AxiomCheckOptions opts;
    opts.kmin = a.kmin;
    opts.kmax = a.kmax;
    opts.trials = a.trials;
    opts.seed = a.seed;
    opts.allow_zero_probs = a.allow_zero_probs;
    opts.with_additivity = a.with_additivity;
    try {
        const AxiomReport report = check_axioms(*measure, opts);
        if (a.report == "text")
            std::cout << io::axiom_report_to_text(report);
        else
            std::cout << io::axiom_report_to_json(report) << "\n";
        return report.all_pass() ? 0 : 3;
    } catch (const std::exception& e) {
        return fail_data(e.what());
    }
}

int run_majorize(const std::string& file_a, const std::string& file_b) {
    try {
        const Pmf a = io::read_pmf_file(file_a, false);
        const Pmf b = io::read_pmf_file(file_b, false);
        const MajorizationVerdict verdict = majorization_compare(a, b);
        std::cout << to_string(verdict.relation);
        if (verdict.relation == MajorizationRelation::Incomparable && verdict.witness_index)
            std::cout << " " << *verdict.witness_index;
        std::cout << "\n";
        return 0;
    } catch (const std::exception& e) {
        return fail_data(e.what());
    }
}

int run_figures(int which, const std::string& out_path) {
    const std::string csv = which == 2 ? io::figure2_csv() : io::figure3_csv();
    if (out_path.empty()) {
        std::cout << csv;
        return 0;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) return fail_data("cannot open output path: " + out_path);
    out << csv;
    out.flush();
    if (!out.good()) return fail_data("write failed: " + out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spread measures, estimators and axiom checks for categorical distributions"};
    app.require_subcommand(1);

    MeasureArgs measure_args;
    auto* measure = app.add_subcommand("measure", "Evaluate a spread measure on a pmf file");
    measure->add_option("pmf-file", measure_args.pmf_file, "Pmf as JSON or headered CSV")
        ->required();
    measure
        ->add_option("spec", measure_args.spec_text,
                     "Measure spec: dvar[:alpha=A|sigma2=S|c1=C,c2=C], gini, shannon, extropy, "
                     "tsallis:m=M, geom:w=W,l=L,p=P, alg:p=P")
        ->required();
    measure->add_flag("--renormalize", measure_args.renormalize,
                      "Divide probabilities by their sum (accepted when the sum is in [0.5, 2])");
    measure->add_option("--matrix", measure_args.matrix_file,
                        "Explicit category distance matrix file (requires plain 'dvar')");
    measure->add_flag("--lin", measure_args.lin,
                      "Information-theoretic similarity distance derived from the pmf itself "
                      "(requires plain 'dvar')");
    measure->add_flag("--lin-zero-diag", measure_args.lin_zero_diag,
                      "Same as --lin with self-distances pinned to zero");

    EstimateArgs estimate_args;
    auto* estimate =
        app.add_subcommand("estimate", "Estimate squared spread from a sample of labels");
    estimate->add_option("sample-file", estimate_args.sample_file, "One category label per line")
        ->required();
    estimate
        ->add_option("--method", estimate_args.method,
                     "ustat (exactly unbiased, default) or paper (legacy closed-form plug-in)")
        ->check(CLI::IsMember({"ustat", "paper"}));
    estimate->add_option("--ci", estimate_args.ci,
                         "Confidence level in (0, 1) for a jackknife interval (needs n >= 5)");

    AxiomArgs axiom_args;
    auto* axioms = app.add_subcommand("axioms", "Property-test the spread-measure axioms");
    axioms->add_option("--measure", axiom_args.measure_text, "Measure spec to examine")
        ->required();
    axioms->add_option("--kmin", axiom_args.kmin, "Smallest category count")
        ->check(CLI::Range(2L, 12L));
    axioms->add_option("--kmax", axiom_args.kmax, "Largest category count")
        ->check(CLI::Range(2L, 12L));
    axioms->add_option("--trials", axiom_args.trials, "Random probes per category count")
        ->check(CLI::Range(1L, 100000000L));
    axioms->add_option("--seed", axiom_args.seed, "Master seed for all probes");
    axioms->add_flag("--allow-zero-probs", axiom_args.allow_zero_probs,
                     "Gate the nonnegativity verdict on vertex pmfs too");
    axioms->add_flag("--additivity", axiom_args.with_additivity,
                     "Also probe the category-splitting identity (reported, never gating)");
    axioms->add_option("--report", axiom_args.report, "Report format")
        ->check(CLI::IsMember({"json", "text"}));

    std::string majorize_a, majorize_b;
    auto* majorize =
        app.add_subcommand("majorize", "Compare two pmf files in the concentration order");
    majorize->add_option("pmf-file-a", majorize_a, "First pmf")->required();
    majorize->add_option("pmf-file-b", majorize_b, "Second pmf")->required();

    int figures_which = 0;
    std::string figures_out;
    auto* figures = app.add_subcommand("figures", "Emit reference CSV data");
    figures->add_option("--which", figures_which, "2: uniform-pmf spread by K; 3: two 6-category cases")
        ->required()
        ->check(CLI::IsMember({2, 3}));
    figures->add_option("--out", figures_out, "Output path (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (app.got_subcommand(measure)) return run_measure(measure_args);
    if (app.got_subcommand(estimate)) return run_estimate(estimate_args);
    if (app.got_subcommand(axioms)) return run_axioms(axiom_args);
    if (app.got_subcommand(majorize)) return run_majorize(majorize_a, majorize_b);
    if (app.got_subcommand(figures)) return run_figures(figures_which, figures_out);
    return 1;
}
