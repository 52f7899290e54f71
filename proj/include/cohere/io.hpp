// Matrix file formats and the analysis report.
//
// Matrices are read either from the canonical JSON object
//   {"schema": 1, "m": M, "n": N, "entries": [[re, im], ...]}   (row-major)
// or from CSV with one matrix row per line and one complex literal per cell
// ("1+2j", "-0.5i", "3", "j"). Output is always the canonical object with
// reals printed at 17 significant digits, so doubles round-trip exactly.
#ifndef COHERE_IO_HPP
#define COHERE_IO_HPP

#include "cohere/core.hpp"
#include "cohere/matrix_metrics.hpp"
#include "cohere/row_ensemble.hpp"
#include "cohere/subset_stats.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cohere {

inline constexpr int schema_version = 1;
inline constexpr const char* tool_version = "cohere 0.1.0";

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
    ParseError(const std::string& what, std::size_t row, std::size_t col)
        : Error(what + " at row " + std::to_string(row) + ", column " + std::to_string(col)),
          row_(row), col_(col) {}
    explicit ParseError(const std::string& what) : Error(what) {}

    std::optional<std::size_t> offset() const { return offset_; }
    std::optional<std::size_t> row() const { return row_; }
    std::optional<std::size_t> col() const { return col_; }

private:
    std::optional<std::size_t> offset_, row_, col_;
};

enum class MatrixFormat { automatic, json, csv };

/// Parses `[+-]REAL`, `[+-]REAL(i|j)`, `[+-](i|j)` or `[+-]REAL(+|-)REAL(i|j)`;
/// a lone i/j stands for a unit imaginary part. Surrounding blanks are ignored.
ComplexD parse_complex_literal(std::string_view text);

/// "re+imj" with both parts at 17 significant digits.
std::string format_complex(ComplexD z);

/// Real at 17 significant digits ("%.17g").
std::string format_real(double x);

MatrixD parse_matrix(std::string_view bytes, MatrixFormat format = MatrixFormat::automatic);

std::string serialize_matrix(const MatrixD& a);

struct EtfSummary {
    bool is_etf = false;
    double equiangular_spread = 0;
    double tightness_residual = 0;
    bool columns_normalized = false;
};

struct RowMeanSummary {
    ComplexD mean{};
    double variance = 0;
    double std_dev = 0;
    std::vector<double> row_sum_abs_sq;
};

struct AnalysisReport {
    Eigen::Index m = 0;
    Eigen::Index n = 0;
    double frobenius = 0;
    double sigma_max = 0;
    double lambda_max = 0;
    std::optional<double> coherence;  // absent for unnormalized columns
    double welch = 0;
    std::optional<double> slack;
    EtfSummary etf;
    RowMeanSummary row_mean;
    std::vector<BoundCheck> bounds;
    std::string tool_version = cohere::tool_version;
    std::optional<std::uint64_t> seed;

    bool all_bounds_hold() const;
};

/// Runs every metric on `a` (1 <= m <= n, n >= 2). Coherence and the
/// coherence bounds are only filled in when the columns are unit-norm.
AnalysisReport analyze_matrix(const MatrixD& a, const TolerancePolicy& policy = {});

/// Structured text with keys in a fixed order; byte-identical for identical reports.
std::string emit_report(const AnalysisReport& report);

/// Monte Carlo row-mean estimates next to their closed-form predictions.
struct SampleReport {
    std::int64_t subset_size = 0;
    std::uint64_t seed = 0;
    SampleStats<double> sample;
    RowMeanStats<double> predicted;
};

std::string emit_sample_report(const SampleReport& report);

}  // namespace cohere

#endif  // COHERE_IO_HPP
