#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ffcf/contfrac.hpp"
#include "ffcf/counting.hpp"
#include "ffcf/field.hpp"
#include "ffcf/laurent.hpp"

namespace ffcf::harness {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

enum class Format { Table, Csv, Json };

Format parse_format(std::string_view text);
std::string_view format_name(Format f);

/// Everything a subcommand reads. Two runs with equal configs produce
/// byte-identical reports; `threads` only changes the wall-clock time.
struct RunConfig {
    // field
    std::optional<std::uint64_t> q;
    std::uint32_t p = 3;
    std::uint32_t r = 1;
    std::string modulus;  // polynomial literal over F_p, empty for the default

    // values
    std::string alpha;    // laurent / cf literal
    std::string form;     // form:a=..;b=..;c=..;d=..
    std::int64_t precision = 64;
    std::int64_t n = 20;  // partial quotients for cf / identities

    // thresholds (exponents of q)
    std::int64_t m = -1;
    std::int64_t e_k = 1;
    std::int64_t R = 6;
    std::optional<std::int64_t> R_min;

    // experiments
    std::int64_t depth = 200;
    std::int64_t samples = 500;
    std::int64_t levels = 6;
    std::uint64_t seed = 1;
    std::uint64_t budget = kDefaultBudget;
    unsigned threads = 0;
    bool allow_rational = false;

    Format format = Format::Table;
    std::string out;

    FieldSpec field() const;
    Json echo() const;
};

/// Tabular result shared by every subcommand: the CSV rows, a summary
/// block, and the config echo. JSON carries the same content.
struct Report {
    std::string command;
    Json meta;
    std::vector<std::string> columns;
    std::vector<std::vector<Json>> rows;
    Json summary = Json::object();

    std::string render(Format f) const;
    Json to_json() const;
};

/// Report for a failed command: machine-readable `error.code`.
std::string render_error(const RunConfig& cfg, std::string_view command, const Error& e, Format f);
/// Process exit code for an error: 2 parse, 3 precision, 4 budget, 1 other.
int exit_code(ErrorCode code) noexcept;

/// Value literals: `rat:P/Q`, `coeffs:j0:e1,...`, `cf:[...]`, `cfper:[...|...]`,
/// `haar:N` (N uniform coefficients from `seed`), a bare polynomial, or any
/// of these with a leading `-`.
LaurentNumber parse_value(const FieldSpec& field, std::string_view text, std::int64_t precision,
                          std::uint64_t seed = 0);

/// `form:a=<value>;b=<value>;c=<value>;d=<value>`.
IsotropicForm parse_form(const FieldSpec& field, std::string_view text, std::int64_t precision,
                         std::uint64_t seed = 0);

/// The expansion a subcommand works on: literal CF input is taken as is,
/// other values are expanded to `quotients` partial quotients.
CFExpansion expansion_of(const FieldSpec& field, std::string_view text, std::int64_t precision,
                         std::size_t quotients, std::uint64_t seed = 0);

struct DecimalWithError {
    double value = 0;
    double stderr_ = 0;
};

struct SampleResult {
    std::uint64_t seed = 0;
    std::int64_t coefficient_depth = 0;
    int retries = 0;
    std::vector<std::int64_t> degrees;  // deg b_1 .. deg b_{depth+1}
    Rational ratio;                     // theorem ratio at n = depth
    Rational boundary_ratio;            // count / eta at delta = q^m exactly
};

struct MonteCarloReport {
    std::int64_t samples = 0;
    std::int64_t depth = 0;
    std::uint64_t seed = 0;
    DecimalWithError mean_degree;
    std::vector<DecimalWithError> freq_ge;  // index l - 1 for l = 1..L
    Rational corollary_limit_literal;       // (q-1)/q^{ceil(1/delta)+m0+1}
    Rational corollary_limit_log;           // (q-1)/q^{ceil(log_q 1/delta)+m0+1}
    DecimalWithError measured_ratio_limit;
    std::string matching_candidate;         // "literal", "log", "none" or "both"
    Rational strict_threshold_limit;        // c * q^{-D} / (q/(q-1)), the counting-matched reading
    DecimalWithError boundary_ratio;        // count / eta(delta = q^m exactly)
    std::vector<SampleResult> per_sample;

    /// Relative tolerance used to match the measured ratio against a candidate.
    static constexpr double kMatchTolerance = 0.10;
};

/// Haar-random alpha per sample (seed derived from (seed, index)), expanded
/// to depth + 1 certified quotients, doubling the coefficient depth up to
/// five times when certification falls short.
MonteCarloReport run_montecarlo(const RunConfig& cfg);

Report cmd_cf(const RunConfig& cfg);
Report cmd_identities(const RunConfig& cfg);
Report cmd_count(const RunConfig& cfg);
Report cmd_measure(const RunConfig& cfg);
Report cmd_montecarlo(const RunConfig& cfg);
Report cmd_montecarlo(const RunConfig& cfg, const MonteCarloReport& mc);
Report cmd_theorem(const RunConfig& cfg);

/// Dispatches by subcommand name; throws InvalidArgument for unknown names.
Report run_command(std::string_view command, const RunConfig& cfg);

/// Rational rendered with 10 significant digits, locale independent.
std::string decimal(const Rational& r);
std::string decimal(double v);

}  // namespace ffcf::harness
