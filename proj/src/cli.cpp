#include "cohere/cli.hpp"

#include "cohere/fourier.hpp"
#include "cohere/io.hpp"
#include "cohere/matrix_metrics.hpp"
#include "cohere/row_ensemble.hpp"
#include "cohere/subset_stats.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace cohere::cli {

namespace {

constexpr std::size_t verify_max_n = 16;

std::string read_input(const std::string& path, std::istream& in)
{
    if (path == "-")
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    std::ifstream file(path, std::ios::binary);
    if (!file)
        throw DomainError("cannot read file '" + path + "'");
    return {std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>()};
}

std::vector<std::size_t> parse_index_list(const std::string& text)
{
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(item, &pos);
        } catch (const std::exception&) {
            throw DomainError("bad row index '" + item + "'");
        }
        if (pos != item.size() || item.empty() || item.front() == '-')
            throw DomainError("bad row index '" + item + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty())
        throw DomainError("--rows needs at least one index");
    return out;
}

struct Failure {
    std::ostream& out;
    std::size_t count = 0;
    std::size_t checks = 0;

    void expect(bool ok, const std::string& what)
    {
        ++checks;
        if (!ok) {
            ++count;
            out << "FAIL " << what << "\n";
        }
    }
};

std::string describe(const char* check, std::size_t n, std::size_t m, std::size_t trial, double got, double want)
{
    std::ostringstream os;
    os << check << " N=" << n << " m=" << m << " trial=" << trial << " got=" << format_real(got)
       << " expected=" << format_real(want);
    return os.str();
}

Multiset<double> random_multiset(std::size_t n, Seed seed)
{
    return row_multiset(random_matrix(1, n, seed, false), 0);
}

}  // namespace

std::size_t run_verification(const VerifyOptions& opt, std::ostream& out, std::size_t* checks)
{
    const TolerancePolicy tol{1e-12, 1e-10};
    Failure f{out};
    std::uint64_t counter = 0;
    auto next_seed = [&] { return Seed{splitmix64(opt.seed ^ splitmix64(++counter))}; };

    for (std::size_t n = 2; n <= opt.max_n; ++n) {
        for (std::size_t m = 1; m <= n; ++m) {
            for (std::size_t t = 0; t < opt.trials; ++t) {
                const auto phi = random_multiset(n, next_seed());
                const auto closed = closed_form_moments(phi, m);
                const auto brute = brute_force_moments(phi, m);
                f.expect(tol.close(closed.mean, brute.mean),
                         describe("mean", n, m, t, std::abs(closed.mean), std::abs(brute.mean)));
                f.expect(tol.close(closed.variance, brute.variance),
                         describe("variance", n, m, t, closed.variance, brute.variance));
                f.expect(tol.close(closed.second_abs_moment, brute.second_abs_moment),
                         describe("second_abs_moment", n, m, t, closed.second_abs_moment, brute.second_abs_moment));
                const double pairwise = variance_pairwise(phi, m);
                f.expect(tol.close(pairwise, closed.variance),
                         describe("pairwise_variance", n, m, t, pairwise, closed.variance));

                // Row-mean variance against per-row enumeration.
                const auto a = random_matrix(m, n, next_seed(), false);
                const auto rm = row_mean_moments(a);
                CompensatedSum<ComplexD> mean_acc;
                CompensatedSum<double> var_acc;
                for (Eigen::Index i = 0; i < a.rows(); ++i) {
                    const auto row = brute_force_moments(row_multiset(a, i), m);
                    mean_acc.add(row.mean);
                    var_acc.add(row.variance);
                }
                const double mm = static_cast<double>(m);
                const ComplexD mean_ref = mean_acc.value() / mm;
                const double var_ref = var_acc.value() / (mm * mm);
                f.expect(tol.close(rm.mean, mean_ref),
                         describe("row_mean_mean", n, m, t, std::abs(rm.mean), std::abs(mean_ref)));
                f.expect(tol.close(rm.variance, var_ref), describe("row_mean_variance", n, m, t, rm.variance, var_ref));
            }

            // Partial Fourier closed forms, with and without row 0.
            for (const bool first : {false, true}) {
                if (!first && m == n)
                    continue;
                Rng rng(next_seed());
                const std::size_t extra = first ? m - 1 : m;
                auto picked = draw_without_replacement(rng, n - 1, extra);
                std::vector<std::size_t> rows;
                if (first)
                    rows.push_back(0);
                for (std::size_t r : picked)
                    rows.push_back(r + 1);
                std::sort(rows.begin(), rows.end());
                const PartialFourierSpec spec(n, rows);
                const auto rm = row_mean_moments(partial_fourier(spec));
                const auto want = partial_fourier_closed_form(n, m, first);
                const char* tag_mean = first ? "fourier_mean_with_row0" : "fourier_mean_without_row0";
                const char* tag_var = first ? "fourier_variance_with_row0" : "fourier_variance_without_row0";
                f.expect(std::abs(rm.mean - want.mean) <= std::max(tol.abs_tol, tol.rel_tol * std::abs(want.mean)),
                         describe(tag_mean, n, m, 0, std::abs(rm.mean), std::abs(want.mean)));
                f.expect(std::abs(rm.variance - want.variance) <= std::max(tol.abs_tol, tol.rel_tol * want.variance),
                         describe(tag_var, n, m, 0, rm.variance, want.variance));
            }
        }
    }
    if (checks)
        *checks = f.checks;
    return f.count;
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Subset-sum moments and coherence metrics for measurement matrices", "cohere"};
    app.require_subcommand(1, 1);

    auto* analyze = app.add_subcommand("analyze", "Report norms, coherence, Welch bound and variance bounds");
    std::string analyze_file = "-";
    bool analyze_normalize = false;
    std::optional<double> analyze_tol;
    analyze->add_option("file", analyze_file, "Matrix file (JSON or CSV); '-' reads standard input");
    analyze->add_flag("--normalize", analyze_normalize, "Scale columns to unit norm before analysis");
    analyze->add_option("--tol", analyze_tol, "Relative tolerance");

    auto* gen = app.add_subcommand("gen", "Generate a matrix file");
    gen->require_subcommand(1, 1);
    auto* gen_fourier = gen->add_subcommand("fourier", "Partial Fourier matrix");
    std::size_t fourier_n = 0;
    std::optional<std::string> fourier_rows;
    std::optional<std::size_t> fourier_m;
    std::optional<std::uint64_t> fourier_seed;
    gen_fourier->add_option("--n", fourier_n, "Fourier size N")->required();
    auto* rows_opt = gen_fourier->add_option("--rows", fourier_rows, "Comma-separated row indices");
    auto* m_opt = gen_fourier->add_option("--m", fourier_m, "Number of random rows");
    auto* seed_opt = gen_fourier->add_option("--seed", fourier_seed, "Seed for random rows");
    rows_opt->excludes(m_opt)->excludes(seed_opt);

    auto* gen_gauss = gen->add_subcommand("gaussian", "Complex Gaussian matrix");
    std::size_t gauss_m = 0, gauss_n = 0;
    std::uint64_t gauss_seed = 0;
    bool gauss_normalize = false;
    gen_gauss->add_option("--m", gauss_m, "Rows")->required();
    gen_gauss->add_option("--n", gauss_n, "Columns")->required();
    gen_gauss->add_option("--seed", gauss_seed, "Seed")->required();
    gen_gauss->add_flag("--normalize", gauss_normalize, "Unit-norm columns");

    auto* verify = app.add_subcommand("verify", "Check closed forms against exhaustive enumeration");
    VerifyOptions vopt;
    verify->add_option("--max-n", vopt.max_n, "Largest multiset size")->required();
    verify->add_option("--trials", vopt.trials, "Random multisets per (N, m)");
    verify->add_option("--seed", vopt.seed, "Seed")->required();

    auto* sample = app.add_subcommand("sample", "Monte Carlo row mean next to the closed form");
    std::string sample_file = "-";
    std::int64_t sample_m = 0;
    std::uint64_t sample_k = 0, sample_seed = 0;
    sample->add_option("file", sample_file, "Matrix file; '-' reads standard input")->required();
    sample->add_option("--m", sample_m, "Subset size drawn from each row")->required();
    sample->add_option("--k", sample_k, "Number of draws")->required();
    sample->add_option("--seed", sample_seed, "Seed")->required();

    auto* welch = app.add_subcommand("welch", "Welch bound for an m x n matrix");
    std::size_t welch_m = 0, welch_n = 0;
    welch->add_option("--m", welch_m, "Rows")->required();
    welch->add_option("--n", welch_n, "Columns")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_code::ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return exit_code::usage;
    }

    try {
        if (analyze->parsed()) {
            TolerancePolicy policy;
            if (analyze_tol) {
                policy.rel_tol = *analyze_tol;
                policy.abs_tol = std::min(policy.abs_tol, *analyze_tol);
            }
            policy.validate();
            MatrixD a = parse_matrix(read_input(analyze_file, in));
            if (analyze_normalize)
                a = normalize_columns(a);
            const auto report = analyze_matrix(a, policy);
            out << emit_report(report);
            err << "analyze: " << report.m << "x" << report.n << " frobenius=" << format_real(report.frobenius)
                << " sigma_max=" << format_real(report.sigma_max);
            if (report.coherence)
                err << " coherence=" << format_real(*report.coherence) << " welch=" << format_real(report.welch);
            else
                err << " coherence=n/a (columns not unit-norm; pass --normalize)";
            err << " etf=" << (report.etf.is_etf ? "yes" : "no") << "\n";
            for (const auto& b : report.bounds)
                if (!b.holds)
                    err << "bound violated: " << b.label << " lhs=" << format_real(b.lhs)
                        << " rhs=" << format_real(b.rhs) << "\n";
            return report.all_bounds_hold() ? exit_code::ok : exit_code::check_failed;
        }

        if (gen_fourier->parsed()) {
            if (fourier_n < 2)
                throw DomainError("--n must be at least 2");
            std::optional<PartialFourierSpec> spec;
            if (fourier_rows) {
                spec.emplace(fourier_n, parse_index_list(*fourier_rows));
            } else if (fourier_m && fourier_seed) {
                spec.emplace(sample_row_indices(fourier_n, *fourier_m, Seed{*fourier_seed}));
            } else {
                err << "error: gen fourier needs --rows, or --m together with --seed\n\n" << gen_fourier->help();
                return exit_code::usage;
            }
            out << serialize_matrix(partial_fourier(*spec));
            return exit_code::ok;
        }

        if (gen_gauss->parsed()) {
            out << serialize_matrix(random_matrix(gauss_m, gauss_n, Seed{gauss_seed}, gauss_normalize));
            return exit_code::ok;
        }

        if (verify->parsed()) {
            if (vopt.max_n < 2 || vopt.max_n > verify_max_n)
                throw DomainError("--max-n must lie in [2, " + std::to_string(verify_max_n) + "]");
            if (vopt.trials < 1)
                throw DomainError("--trials must be positive");
            std::size_t checks = 0;
            const std::size_t failures = run_verification(vopt, out, &checks);
            err << "verify: " << checks << " checks, " << failures << " failures\n";
            return failures == 0 ? exit_code::ok : exit_code::check_failed;
        }

        if (sample->parsed()) {
            const MatrixD a = parse_matrix(read_input(sample_file, in));
            SampleReport report;
            report.subset_size = sample_m;
            report.seed = sample_seed;
            report.sample = sample_row_mean(a, sample_m, Seed{sample_seed}, sample_k);
            report.predicted = row_mean_moments(a, sample_m);
            out << emit_sample_report(report);
            err << "sample: " << sample_k << " draws, variance " << format_real(report.sample.sample_variance)
                << " vs predicted " << format_real(report.predicted.variance) << "\n";
            return exit_code::ok;
        }

        if (welch->parsed()) {
            out << format_real(welch_bound(welch_m, welch_n)) << "\n";
            return exit_code::ok;
        }
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << " (residual " << format_real(e.residual()) << ")\n";
        return exit_code::numerical;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::usage;
    }
    err << app.help();
    return exit_code::usage;
}

}  // namespace cohere::cli
