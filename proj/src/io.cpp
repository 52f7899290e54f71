#include "cohere/io.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace cohere {

namespace {

bool is_unit(char c) { return c == 'i' || c == 'j'; }

class LiteralScanner {
public:
    LiteralScanner(std::string_view text, std::size_t base) : text_(text), base_(base) {}

    bool done() const { return pos_ == text_.size(); }
    char peek() const { return done() ? '\0' : text_[pos_]; }
    std::size_t offset() const { return base_ + pos_; }
    void advance() { ++pos_; }

    double sign()
    {
        if (peek() == '+' || peek() == '-') {
            const double s = peek() == '-' ? -1.0 : 1.0;
            advance();
            return s;
        }
        return 1.0;
    }

    /// Unsigned decimal with optional fraction and exponent.
    std::optional<double> real()
    {
        const std::size_t start = pos_;
        std::size_t digits = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            advance();
            ++digits;
        }
        if (peek() == '.') {
            advance();
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                advance();
                ++digits;
            }
        }
        if (digits == 0) {
            pos_ = start;
            return std::nullopt;
        }
        if (peek() == 'e' || peek() == 'E') {
            const std::size_t mark = pos_;
            advance();
            if (peek() == '+' || peek() == '-')
                advance();
            std::size_t exp_digits = 0;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                advance();
                ++exp_digits;
            }
            if (exp_digits == 0)
                throw ParseError("malformed exponent", base_ + mark);
        }
        double value = 0;
        const char* first = text_.data() + start;
        const char* last = text_.data() + pos_;
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last || !std::isfinite(value))
            throw ParseError("number out of range", base_ + start);
        return value;
    }

private:
    std::string_view text_;
    std::size_t base_;
    std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s, std::size_t& lead)
{
    lead = 0;
    while (lead < s.size() && std::isspace(static_cast<unsigned char>(s[lead])))
        ++lead;
    std::size_t end = s.size();
    while (end > lead && std::isspace(static_cast<unsigned char>(s[end - 1])))
        --end;
    return s.substr(lead, end - lead);
}

void append_real(std::string& out, double x) { out += format_real(x); }

void append_complex_pair(std::string& out, ComplexD z)
{
    out += '[';
    append_real(out, z.real());
    out += ", ";
    append_real(out, z.imag());
    out += ']';
}

void append_optional(std::string& out, const std::optional<double>& x)
{
    if (x)
        append_real(out, *x);
    else
        out += "null";
}

const char* boolean(bool b) { return b ? "true" : "false"; }

MatrixD parse_json_matrix(std::string_view bytes)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), e.byte);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw ParseError("matrix document must be a JSON object");
    if (doc.contains("schema") && doc["schema"] != schema_version)
        throw ParseError("unsupported schema version " + doc["schema"].dump());
    for (const char* key : {"m", "n", "entries"})
        if (!doc.contains(key))
            throw ParseError(std::string("missing key \"") + key + "\"");
    if (!doc["m"].is_number_unsigned() || !doc["n"].is_number_unsigned() || doc["m"] == 0 || doc["n"] == 0)
        throw ParseError("\"m\" and \"n\" must be positive integers");
    const auto m = doc["m"].get<std::size_t>();
    const auto n = doc["n"].get<std::size_t>();
    const auto& entries = doc["entries"];
    if (!entries.is_array())
        throw ParseError("\"entries\" must be an array");
    if (entries.size() != m * n)
        throw ParseError("shape mismatch: declared " + std::to_string(m) + "x" + std::to_string(n) +
                         " expects " + std::to_string(m * n) + " entries, got " +
                         std::to_string(entries.size()));
    MatrixD a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (std::size_t idx = 0; idx < entries.size(); ++idx) {
        const std::size_t row = idx / n + 1;
        const std::size_t col = idx % n + 1;
        const auto& e = entries[idx];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw ParseError("entry must be a [re, im] pair of numbers", row, col);
        const ComplexD z(e[0].get<double>(), e[1].get<double>());
        if (!is_finite(z))
            throw ParseError("non-finite entry", row, col);
        a(static_cast<Eigen::Index>(row - 1), static_cast<Eigen::Index>(col - 1)) = z;
    }
    return a;
}

MatrixD parse_csv_matrix(std::string_view bytes)
{
    std::vector<std::vector<ComplexD>> rows;
    std::size_t start = 0;
    while (start <= bytes.size()) {
        std::size_t end = bytes.find('\n', start);
        if (end == std::string_view::npos)
            end = bytes.size();
        std::string_view line = bytes.substr(start, end - start);
        start = end + 1;

        std::size_t lead = 0;
        const std::string_view body = trim(line, lead);
        if (body.empty() || body.front() == '#')
            continue;

        std::vector<ComplexD> row;
        std::size_t cell_start = 0;
        while (true) {
            std::size_t comma = line.find(',', cell_start);
            const std::string_view cell =
                line.substr(cell_start, comma == std::string_view::npos ? std::string_view::npos : comma - cell_start);
            try {
                row.push_back(parse_complex_literal(cell));
            } catch (const ParseError& e) {
                throw ParseError(std::string("malformed entry: ") + e.what(), rows.size() + 1, row.size() + 1);
            }
            if (comma == std::string_view::npos)
                break;
            cell_start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("row has " + std::to_string(row.size()) + " entries, expected " +
                                 std::to_string(rows.front().size()),
                             rows.size() + 1, row.size());
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw ParseError("CSV input contains no rows");

    MatrixD a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < rows[i].size(); ++k)
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    return a;
}

}  // namespace

ComplexD parse_complex_literal(std::string_view text)
{
    std::size_t lead = 0;
    const std::string_view body = trim(text, lead);
    if (body.empty())
        throw ParseError("empty complex literal", lead);

    LiteralScanner sc(body, lead);
    const double s1 = sc.sign();
    if (is_unit(sc.peek())) {
        sc.advance();
        if (!sc.done())
            throw ParseError("unexpected character after imaginary unit", sc.offset());
        return {0.0, s1};
    }
    const auto first = sc.real();
    if (!first)
        throw ParseError("expected a number", sc.offset());
    if (sc.done())
        return {s1 * *first, 0.0};
    if (is_unit(sc.peek())) {
        sc.advance();
        if (!sc.done())
            throw ParseError("unexpected character after imaginary unit", sc.offset());
        return {0.0, s1 * *first};
    }
    if (sc.peek() != '+' && sc.peek() != '-')
        throw ParseError("unexpected character", sc.offset());
    const double s2 = sc.sign();
    double im = 1.0;
    if (!is_unit(sc.peek())) {
        const auto second = sc.real();
        if (!second)
            throw ParseError("expected imaginary part", sc.offset());
        im = *second;
    }
    if (!is_unit(sc.peek()))
        throw ParseError("expected imaginary unit 'i' or 'j'", sc.offset());
    sc.advance();
    if (!sc.done())
        throw ParseError("trailing characters", sc.offset());
    return {s1 * *first, s2 * im};
}

std::string format_real(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_complex(ComplexD z)
{
    std::string out = format_real(z.real());
    out += std::signbit(z.imag()) ? '-' : '+';
    out += format_real(std::abs(z.imag()));
    out += 'j';
    return out;
}

MatrixD parse_matrix(std::string_view bytes, MatrixFormat format)
{
    if (format == MatrixFormat::automatic) {
        std::size_t lead = 0;
        const auto body = trim(bytes, lead);
        format = !body.empty() && body.front() == '{' ? MatrixFormat::json : MatrixFormat::csv;
    }
    return format == MatrixFormat::json ? parse_json_matrix(bytes) : parse_csv_matrix(bytes);
}

std::string serialize_matrix(const MatrixD& a)
{
    validate_matrix(a);
    std::string out = "{\n  \"schema\": " + std::to_string(schema_version) + ",\n";
    out += "  \"m\": " + std::to_string(a.rows()) + ",\n";
    out += "  \"n\": " + std::to_string(a.cols()) + ",\n";
    out += "  \"entries\": [\n";
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index k = 0; k < a.cols(); ++k) {
            out += "    ";
            append_complex_pair(out, a(i, k));
            out += (i + 1 == a.rows() && k + 1 == a.cols()) ? "\n" : ",\n";
        }
    out += "  ]\n}\n";
    return out;
}

bool AnalysisReport::all_bounds_hold() const
{
    for (const auto& b : bounds)
        if (!b.holds)
            return false;
    return true;
}

AnalysisReport analyze_matrix(const MatrixD& a, const TolerancePolicy& policy)
{
    policy.validate();
    require_wide(a);
    if (a.cols() < 2)
        throw DomainError("analysis needs at least two columns");

    AnalysisReport r;
    r.m = a.rows();
    r.n = a.cols();
    r.frobenius = frobenius_norm(a);
    const auto est = spectral(a);
    r.sigma_max = est.sigma_max;
    r.lambda_max = est.lambda_max;
    r.welch = welch_bound(static_cast<std::size_t>(r.m), static_cast<std::size_t>(r.n));

    const auto etf = etf_check(a, policy);
    r.etf = {etf.is_etf, etf.equiangular_spread, etf.tightness_residual, etf.columns_normalized};

    const auto rm = row_mean_moments(a);
    r.row_mean = {rm.mean, rm.variance, rm.std_dev, rm.row_sum_abs_sq};

    r.bounds.push_back(spectral_lower_bound(a, est, policy));
    r.bounds.push_back(frobenius_upper_bound(a, policy));
    if (etf.columns_normalized) {
        const auto coh = coherence(a, policy);
        r.coherence = coh.mu;
        r.slack = coh.slack;
        for (auto& b : coherence_bounds_check(a, coh, policy))
            r.bounds.push_back(std::move(b));
    }
    return r;
}

std::string emit_report(const AnalysisReport& r)
{
    std::string out = "{\n";
    out += "  \"schema\": " + std::to_string(schema_version) + ",\n";
    out += "  \"shape\": [" + std::to_string(r.m) + ", " + std::to_string(r.n) + "],\n";
    out += "  \"frobenius\": " + format_real(r.frobenius) + ",\n";
    out += "  \"sigma_max\": " + format_real(r.sigma_max) + ",\n";
    out += "  \"lambda_max\": " + format_real(r.lambda_max) + ",\n";
    out += "  \"coherence\": ";
    append_optional(out, r.coherence);
    out += ",\n  \"welch\": " + format_real(r.welch) + ",\n";
    out += "  \"slack\": ";
    append_optional(out, r.slack);
    out += ",\n  \"etf\": {\n";
    out += std::string("    \"is_etf\": ") + boolean(r.etf.is_etf) + ",\n";
    out += "    \"equiangular_spread\": " + format_real(r.etf.equiangular_spread) + ",\n";
    out += "    \"tightness_residual\": " + format_real(r.etf.tightness_residual) + ",\n";
    out += std::string("    \"columns_normalized\": ") + boolean(r.etf.columns_normalized) + "\n";
    out += "  },\n  \"row_mean\": {\n    \"mean\": ";
    append_complex_pair(out, r.row_mean.mean);
    out += ",\n    \"variance\": " + format_real(r.row_mean.variance) + ",\n";
    out += "    \"std_dev\": " + format_real(r.row_mean.std_dev) + ",\n";
    out += "    \"row_sum_abs_sq\": [";
    for (std::size_t i = 0; i < r.row_mean.row_sum_abs_sq.size(); ++i) {
        if (i)
            out += ", ";
        append_real(out, r.row_mean.row_sum_abs_sq[i]);
    }
    out += "]\n  },\n  \"bounds\": [";
    for (std::size_t i = 0; i < r.bounds.size(); ++i) {
        const auto& b = r.bounds[i];
        out += i ? ",\n    {" : "\n    {";
        out += "\"label\": \"" + b.label + "\", ";
        out += std::string("\"kind\": \"") + (b.kind == BoundKind::lower ? "lower" : "upper") + "\", ";
        out += "\"lhs\": " + format_real(b.lhs) + ", ";
        out += "\"rhs\": " + format_real(b.rhs) + ", ";
        out += std::string("\"holds\": ") + boolean(b.holds) + ", ";
        out += std::string("\"equality\": ") + boolean(b.equality) + "}";
    }
    out += r.bounds.empty() ? "],\n" : "\n  ],\n";
    out += "  \"tool_version\": " + nlohmann::json(r.tool_version).dump() + ",\n";
    out += "  \"seed\": " + (r.seed ? std::to_string(*r.seed) : std::string("null")) + "\n";
    out += "}\n";
    return out;
}

std::string emit_sample_report(const SampleReport& r)
{
    const double predicted_second = r.predicted.variance + abs_sq(r.predicted.mean);
    std::string out = "{\n";
    out += "  \"schema\": " + std::to_string(schema_version) + ",\n";
    out += "  \"subset_size\": " + std::to_string(r.subset_size) + ",\n";
    out += "  \"draws\": " + std::to_string(r.sample.draws) + ",\n";
    out += "  \"seed\": " + std::to_string(r.seed) + ",\n";
    out += "  \"sample_mean\": ";
    append_complex_pair(out, r.sample.sample_mean);
    out += ",\n  \"sample_variance\": " + format_real(r.sample.sample_variance) + ",\n";
    out += "  \"sample_second_abs_moment\": " + format_real(r.sample.sample_second_abs_moment) + ",\n";
    out += "  \"predicted_mean\": ";
    append_complex_pair(out, r.predicted.mean);
    out += ",\n  \"predicted_variance\": " + format_real(r.predicted.variance) + ",\n";
    out += "  \"predicted_second_abs_moment\": " + format_real(predicted_second) + ",\n";
    out += "  \"tool_version\": " + nlohmann::json(tool_version).dump() + "\n";
    out += "}\n";
    return out;
}

}  // namespace cohere
