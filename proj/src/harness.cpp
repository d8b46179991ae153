#include "ffcf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "ffcf/rational.hpp"
#include "ffcf/rng.hpp"

namespace ffcf::harness {

Format parse_format(std::string_view text) {
    if (text == "table") return Format::Table;
    if (text == "csv") return Format::Csv;
    if (text == "json") return Format::Json;
    throw Error(ErrorCode::InvalidArgument, "unknown format '" + std::string(text) + "' (table, csv, json)");
}

std::string_view format_name(Format f) {
    switch (f) {
        case Format::Table: return "table";
        case Format::Csv: return "csv";
        case Format::Json: return "json";
    }
    return "table";
}

std::string decimal(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string decimal(const Rational& r) { return decimal(to_double(r)); }

namespace {

Json rational_json(const Rational& r) { return to_string(r); }

double mean_of(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

DecimalWithError mean_with_error(const std::vector<double>& xs) {
    DecimalWithError out;
    out.value = mean_of(xs);
    if (xs.size() >= 2) {
        double ss = 0;
        for (double x : xs) ss += (x - out.value) * (x - out.value);
        const double var = ss / static_cast<double>(xs.size() - 1);
        out.stderr_ = std::sqrt(var / static_cast<double>(xs.size()));
    }
    return out;
}

Json dwe_json(const DecimalWithError& d) { return Json{{"value", d.value}, {"stderr", d.stderr_}}; }

/// Rejects cfper literals whose unrolled length would not pin `precision`
/// coefficients by doubling the number of quotients.
LaurentNumber value_from_cf_literal(const FieldSpec& field, std::string_view text, std::int64_t precision) {
    std::size_t quotients = static_cast<std::size_t>(std::max<std::int64_t>(precision, 1)) + 2;
    for (int attempt = 0;; ++attempt) {
        const CFExpansion cf = parse_cf(field, text, quotients);
        try {
            return approx_from_cf(cf, precision);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::InsufficientQuotients || cf.terminated || attempt >= 8) throw;
            quotients *= 2;
        }
    }
}

/// Largest precision that the quotients of `cf` pin down: indices below
/// 2 deg t_M + 1 are exact, counted from the valuation.
std::int64_t pinned_precision(const CFExpansion& cf) {
    const auto deg = cf.degrees();
    if (deg.empty()) return 1;
    std::int64_t nu;
    std::int64_t deg_t = 0;
    for (std::size_t j = 1; j < deg.size(); ++j) deg_t += deg[j];
    if (deg[0] >= 0 && !cf.b[0].is_zero()) {
        nu = -deg[0];
    } else if (deg.size() >= 2) {
        nu = deg[1];
    } else {
        return 1;
    }
    return std::max<std::int64_t>(2 * deg_t + 1 - nu, 1);
}

LaurentNumber value_of_expansion(const CFExpansion& cf, std::int64_t precision) {
    if (cf.terminated) return approx_from_cf(cf, precision);
    return approx_from_cf(cf, std::min(precision, pinned_precision(cf)));
}

struct SampledExpansion {
    CFExpansion cf;
    std::int64_t coefficient_depth = 0;
    int retries = 0;
};

constexpr int kMaxRetries = 5;

/// Haar-random alpha in the unit ball expanded until b_0 .. b_{quotients-1}
/// are certified. The stream is a prefix code, so deepening extends the same
/// alpha instead of drawing a new one.
SampledExpansion sample_expansion(const FieldSpec& field, std::size_t quotients, std::uint64_t seed) {
    std::int64_t coeffs = 4 * static_cast<std::int64_t>(quotients) + 16;
    for (int retry = 0;; ++retry) {
        const LaurentNumber alpha = LaurentNumber::sample(field, coeffs, seed);
        CFExpansion cf = cf_expand(alpha, quotients - 1);
        if (cf.certified >= quotients) {
            cf.b.erase(cf.b.begin() + static_cast<std::ptrdiff_t>(quotients), cf.b.end());
            cf.certified = quotients;
            cf.source = "haar:" + std::to_string(coeffs);
            return {std::move(cf), coeffs, retry};
        }
        if (retry >= kMaxRetries)
            throw Error(ErrorCode::PrecisionExhausted, "sample still uncertified after " +
                                                           std::to_string(kMaxRetries) + " deepenings");
        coeffs *= 2;
    }
}

bool is_cf_literal(std::string_view text) { return text.starts_with("cf:") || text.starts_with("cfper:"); }

std::string csv_cell(const Json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + "\"";
    }
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
}

std::string scalar_text(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "-";
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                next = count;
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

Json meta_for(const RunConfig& cfg, std::string_view command) {
    const FieldSpec F = cfg.field();
    Json field{{"p", F.p()}, {"r", F.r()}, {"q", F.q()}, {"modulus", F.describe()}};
    return Json{{"tool", "ffcf"},
                {"version", std::string(kVersion)},
                {"schema", kSchemaVersion},
                {"command", std::string(command)},
                {"rng", "xoshiro256** seeded via SplitMix64; sample i uses derive_seed(seed, i)"},
                {"seed", cfg.seed},
                {"field", field},
                {"config", cfg.echo()}};
}

Report make_report(const RunConfig& cfg, std::string_view command, std::vector<std::string> columns) {
    Report rep;
    rep.command = std::string(command);
    rep.meta = meta_for(cfg, command);
    rep.columns = std::move(columns);
    return rep;
}

std::optional<std::string> identity_text(const std::optional<bool>& v) {
    if (!v) return std::nullopt;
    return *v ? "pass" : "fail";
}

Json opt_json(const std::optional<std::string>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

FieldSpec RunConfig::field() const {
    std::uint32_t pp = p, rr = r;
    if (q) {
        const FieldSpec base = FieldSpec::from_q(*q);
        if (modulus.empty()) return base;
        pp = base.p();
        rr = base.r();
    }
    if (modulus.empty()) return FieldSpec::make(pp, rr);
    const FieldSpec prime = FieldSpec::make(pp);
    std::vector<std::uint32_t> coeffs;
    try {
        const Poly mod = Poly::parse(prime, modulus);
        coeffs.assign(mod.coeffs().begin(), mod.coeffs().end());
    } catch (const ParseError& e) {
        throw ParseError(e.position(), "bad modulus literal");
    }
    return FieldSpec::make(pp, rr, coeffs);
}

Json RunConfig::echo() const {
    // Only fields that can change the report; `threads` and `out` do not.
    Json j;
    j["alpha"] = alpha;
    j["form"] = form;
    j["precision"] = precision;
    j["n"] = n;
    j["m"] = m;
    j["e_k"] = e_k;
    j["R"] = R;
    j["R_min"] = R_min ? Json(*R_min) : Json(nullptr);
    j["depth"] = depth;
    j["samples"] = samples;
    j["levels"] = levels;
    j["seed"] = seed;
    j["budget"] = budget;
    j["allow_rational"] = allow_rational;
    j["format"] = std::string(format_name(format));
    return j;
}

Json Report::to_json() const {
    Json j;
    j["meta"] = meta;
    j["summary"] = summary;
    j["columns"] = columns;
    Json rs = Json::array();
    for (const auto& row : rows) {
        Json o = Json::object();
        for (std::size_t c = 0; c < columns.size(); ++c) o[columns[c]] = c < row.size() ? row[c] : Json(nullptr);
        rs.push_back(std::move(o));
    }
    j["rows"] = std::move(rs);
    return j;
}

std::string Report::render(Format f) const {
    std::ostringstream out;
    if (f == Format::Json) {
        out << to_json().dump(2) << '\n';
        return out.str();
    }
    if (f == Format::Csv) {
        out << "# ffcf " << command << " " << meta.dump() << '\n';
        for (const auto& [k, v] : summary.items()) out << "# " << k << "=" << v.dump() << '\n';
        for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
        out << '\n';
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_cell(row[c]);
            out << '\n';
        }
        return out.str();
    }
    out << "ffcf " << command << " over " << meta["field"]["modulus"].get<std::string>() << '\n';
    for (const auto& [k, v] : summary.items()) out << "  " << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    if (!columns.empty() && !rows.empty()) {
        std::vector<std::size_t> width(columns.size());
        std::vector<std::vector<std::string>> cells;
        for (std::size_t c = 0; c < columns.size(); ++c) width[c] = columns[c].size();
        for (const auto& row : rows) {
            std::vector<std::string> line;
            for (std::size_t c = 0; c < columns.size(); ++c) {
                line.push_back(c < row.size() ? scalar_text(row[c]) : "-");
                width[c] = std::max(width[c], line.back().size());
            }
            cells.push_back(std::move(line));
        }
        out << '\n';
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "  " : "") << columns[c]
                << std::string(c + 1 < columns.size() ? width[c] - columns[c].size() : 0, ' ');
        out << '\n';
        for (const auto& line : cells) {
            for (std::size_t c = 0; c < line.size(); ++c)
                out << (c ? "  " : "") << line[c]
                    << std::string(c + 1 < line.size() ? width[c] - line[c].size() : 0, ' ');
            out << '\n';
        }
    }
    return out.str();
}

int exit_code(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ParseError: return 2;
        case ErrorCode::PrecisionExhausted:
        case ErrorCode::InsufficientQuotients:
        case ErrorCode::TooShallow: return 3;
        case ErrorCode::BudgetExceeded: return 4;
        default: return 1;
    }
}

std::string render_error(const RunConfig& cfg, std::string_view command, const Error& e, Format f) {
    Json err{{"code", std::string(error_name(e.code()))}, {"message", e.what()}, {"exit_code", exit_code(e.code())}};
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) err["position"] = pe->position();
    Json meta;
    try {
        meta = meta_for(cfg, command);
    } catch (const Error&) {
        // The field itself may be the invalid part of the config.
        meta = Json{{"tool", "ffcf"}, {"version", std::string(kVersion)}, {"schema", kSchemaVersion},
                    {"command", std::string(command)}, {"config", cfg.echo()}};
    }
    if (f == Format::Json) return Json{{"meta", meta}, {"error", err}}.dump(2) + "\n";
    if (f == Format::Csv) return "# error=" + err.dump() + "\n";
    return std::string("error: ") + e.what() + "\n";
}

LaurentNumber parse_value(const FieldSpec& field, std::string_view text, std::int64_t precision, std::uint64_t seed) {
    const auto first = text.find_first_not_of(' ');
    if (first == std::string_view::npos) throw ParseError(0, "empty value literal");
    const std::string_view body = text.substr(first);
    if (body.starts_with("-")) {
        try {
            return -parse_value(field, body.substr(1), precision, seed);
        } catch (const ParseError& e) {
            throw ParseError(first + 1 + e.position(), "bad negated value");
        }
    }
    try {
        if (body.starts_with("rat:") || body.starts_with("coeffs:")) return parse_laurent(field, body, precision);
        if (is_cf_literal(body)) return value_from_cf_literal(field, body, precision);
        if (body.starts_with("haar:")) {
            const std::string_view num = body.substr(5);
            std::int64_t n = 0;
            for (std::size_t i = 0; i < num.size(); ++i) {
                if (num[i] < '0' || num[i] > '9') throw ParseError(5 + i, "expected a coefficient count");
                n = n * 10 + (num[i] - '0');
                if (n > 100'000'000) throw ParseError(5 + i, "coefficient count too large");
            }
            if (num.empty() || n < 1) throw ParseError(5, "expected a positive coefficient count");
            return LaurentNumber::sample(field, n, seed);
        }
        return LaurentNumber::from_poly(Poly::parse(field, body));
    } catch (const ParseError& e) {
        if (first == 0) throw;
        throw ParseError(first + e.position(), "bad value literal");
    }
}

IsotropicForm parse_form(const FieldSpec& field, std::string_view text, std::int64_t precision, std::uint64_t seed) {
    if (!text.starts_with("form:")) throw ParseError(0, "expected 'form:a=...;b=...;c=...;d=...'");
    static constexpr std::string_view keys[] = {"a=", ";b=", ";c=", ";d="};
    std::size_t pos[4];
    std::size_t from = 5;
    for (int k = 0; k < 4; ++k) {
        const std::size_t at = text.find(keys[k], from);
        if (at == std::string_view::npos || (k == 0 && at != 5))
            throw ParseError(k == 0 ? 5 : from, "expected '" + std::string(keys[k]) + "'");
        pos[k] = at;
        from = at + keys[k].size();
    }
    std::vector<LaurentNumber> entries;
    for (int k = 0; k < 4; ++k) {
        const std::size_t start = pos[k] + keys[k].size();
        const std::size_t end = k < 3 ? pos[k + 1] : text.size();
        const std::string_view item = text.substr(start, end - start);
        try {
            entries.push_back(parse_value(field, item, precision, seed + static_cast<std::uint64_t>(k)));
        } catch (const ParseError& e) {
            throw ParseError(start + e.position(), "bad form entry '" + std::string(1, "abcd"[k]) + "'");
        }
    }
    return IsotropicForm::make(entries[0], entries[1], entries[2], entries[3]);
}

CFExpansion expansion_of(const FieldSpec& field, std::string_view text, std::int64_t precision,
                         std::size_t quotients, std::uint64_t seed) {
    if (quotients == 0) throw Error(ErrorCode::InvalidArgument, "need at least one partial quotient");
    if (is_cf_literal(text)) return parse_cf(field, text, quotients);
    if (text == "haar") return sample_expansion(field, quotients, seed).cf;
    const LaurentNumber alpha = parse_value(field, text, precision, seed);
    return cf_expand(alpha, quotients - 1);
}

Report cmd_cf(const RunConfig& cfg) {
    const FieldSpec F = cfg.field();
    if (cfg.n < 1) throw Error(ErrorCode::InvalidArgument, "--n must be >= 1");
    const CFExpansion cf = expansion_of(F, cfg.alpha, cfg.precision, static_cast<std::size_t>(cfg.n), cfg.seed);
    const LaurentNumber alpha = is_cf_literal(cfg.alpha) || cfg.alpha == "haar"
                                    ? value_of_expansion(cf, cfg.precision)
                                    : parse_value(F, cfg.alpha, cfg.precision, cfg.seed);
    const auto conv = convergents(cf);
    const IdentityReport ids = verify_identities(cf, alpha);
    Report rep = make_report(cfg, "cf", {"n", "b", "deg_b", "s", "t", "deg_t", "certified", "identities"});
    for (std::size_t k = 0; k < cf.b.size(); ++k) {
        std::vector<Json> row{k, cf.b[k].str(), cf.b[k].is_zero() ? Json(nullptr) : Json(cf.b[k].deg())};
        if (k < conv.size()) {
            row.insert(row.end(), {conv[k].s.str(), conv[k].t.str(), conv[k].t.deg(), true,
                                   ids.rows[k].all() ? "pass" : "fail"});
        } else {
            row.insert(row.end(), {nullptr, nullptr, nullptr, false, nullptr});
        }
        rep.rows.push_back(std::move(row));
    }
    rep.summary["alpha"] = alpha.str();
    rep.summary["quotients"] = cf.b.size();
    rep.summary["certified"] = cf.certified;
    rep.summary["terminated"] = cf.terminated;
    rep.summary["expansion"] = cf.str();
    rep.summary["identities_all_pass"] = ids.all_pass;
    return rep;
}

Report cmd_identities(const RunConfig& cfg) {
    const FieldSpec F = cfg.field();
    if (cfg.n < 1) throw Error(ErrorCode::InvalidArgument, "--n must be >= 1");
    const CFExpansion cf = expansion_of(F, cfg.alpha, cfg.precision, static_cast<std::size_t>(cfg.n), cfg.seed);
    const LaurentNumber alpha = is_cf_literal(cfg.alpha) || cfg.alpha == "haar"
                                    ? value_of_expansion(cf, cfg.precision)
                                    : parse_value(F, cfg.alpha, cfg.precision, cfg.seed);
    const IdentityReport ids = verify_identities(cf, alpha);
    Report rep = make_report(cfg, "identities",
                             {"n", "recurrence", "determinant", "degree_sum", "error_by_quotient",
                              "error_by_denominators", "convergent_test", "coprime", "all"});
    auto pf = [](bool v) { return Json(v ? "pass" : "fail"); };
    std::size_t failures = 0;
    for (const auto& row : ids.rows) {
        failures += row.all() ? 0 : 1;
        rep.rows.push_back({row.n, pf(row.recurrence), opt_json(identity_text(row.determinant)), pf(row.degree_sum),
                            opt_json(identity_text(row.error_by_quotient)),
                            opt_json(identity_text(row.error_by_denominators)), pf(row.convergent_test),
                            pf(row.coprime), pf(row.all())});
    }
    rep.summary["expansion"] = cf.str();
    rep.summary["indices"] = ids.rows.size();
    rep.summary["failures"] = failures;
    rep.summary["all_pass"] = ids.all_pass;
    return rep;
}

Report cmd_count(const RunConfig& cfg) {
    const FieldSpec F = cfg.field();
    if (cfg.form.empty() && cfg.alpha.empty())
        throw Error(ErrorCode::InvalidArgument, "count needs --form or --alpha");
    const IsotropicForm form = cfg.form.empty()
                                   ? IsotropicForm::from_alpha(parse_value(F, cfg.alpha, cfg.precision, cfg.seed))
                                   : parse_form(F, cfg.form, cfg.precision, cfg.seed);
    if (!form.irrational_assumed() && !cfg.allow_rational)
        throw Error(ErrorCode::RationalInput, "alpha = -b/a is exact (rational); pass --allow-rational to count anyway");
    const Thresholds top = Thresholds::make(cfg.m, cfg.e_k, cfg.R);
    const std::int64_t r_lo = cfg.R_min.value_or(cfg.e_k + 1);
    const CFExpansion cf = cf_expand(form.alpha(), static_cast<std::size_t>(std::max<std::int64_t>(cfg.R, 0) + 2));

    Report rep = make_report(cfg, "count", {"R", "i", "countG", "countGprime", "deltaG", "measureH", "ratio_G",
                                            "ratio_Gprime", "ratio_Gprime_decimal", "note"});
    std::int64_t max_delta = 0;
    std::optional<std::int64_t> delta_lo, delta_hi;
    for (std::int64_t R = r_lo; R <= cfg.R; ++R) {
        const Thresholds th = top.with_R(R);
        std::string note;
        std::optional<std::int64_t> g, gp;
        try {
            g = count_G_bruteforce(form, th, cfg.budget, cfg.threads);
        } catch (const Error& e) {
            note = std::string(error_name(e.code()));
        }
        try {
            gp = count_Gprime(cf, th);
        } catch (const Error& e) {
            note += (note.empty() ? "" : ";") + std::string(error_name(e.code())) + "(G')";
        }
        Json measure = nullptr, ratio_g = nullptr, ratio_gp = nullptr, ratio_gp_dec = nullptr;
        std::optional<Rational> eta;
        if (th.i() >= 1) {
            eta = measure_H(th, F).value;
            measure = rational_json(*eta);
        } else {
            note += (note.empty() ? "" : ";") + std::string("EmptyRegion");
        }
        if (eta && g) ratio_g = rational_json(Rational(*g) / *eta);
        if (eta && gp) {
            const Rational r = Rational(*gp) / *eta;
            ratio_gp = rational_json(r);
            ratio_gp_dec = decimal(r);
        }
        Json delta = nullptr;
        if (g && gp) {
            const std::int64_t d = *g - *gp;
            delta = d;
            max_delta = std::max(max_delta, d < 0 ? -d : d);
            if (!delta_lo) delta_lo = R;
            delta_hi = R;
        }
        rep.rows.push_back({R, th.i(), g ? Json(*g) : Json(nullptr), gp ? Json(*gp) : Json(nullptr), delta, measure,
                            ratio_g, ratio_gp, ratio_gp_dec, note});
    }
    rep.summary["alpha"] = form.alpha().str();
    rep.summary["irrational_assumed"] = form.irrational_assumed();
    rep.summary["expansion"] = cf.str();
    rep.summary["delta"] = "q^" + std::to_string(cfg.m);
    rep.summary["k"] = "q^" + std::to_string(cfg.e_k);
    rep.summary["max_abs_deltaG"] = delta_lo ? Json(max_delta) : Json(nullptr);
    rep.summary["deltaG_R_range"] = delta_lo ? Json::array({*delta_lo, *delta_hi}) : Json(nullptr);
    return rep;
}

Report cmd_measure(const RunConfig& cfg) {
    const FieldSpec F = cfg.field();
    const Thresholds th = Thresholds::make(cfg.m, cfg.e_k, cfg.R);
    const MeasureReport closed = measure_H(th, F);
    const Rational oracle = measure_H_oracle(th, F);
    const Rational boundary = measure_H_boundary(th, F);
    Report rep = make_report(cfg, "measure", {"q", "m", "e_k", "R", "m0", "m0p", "t", "i", "closed_form", "oracle",
                                              "equal", "sandwich_low", "sandwich_high", "boundary_delta"});
    rep.rows.push_back({F.q(), th.m, th.e_k, th.R, th.m0(), th.m0p(), th.t(), th.i(), rational_json(closed.value),
                        rational_json(oracle), closed.value == oracle, rational_json(closed.sandwich_low),
                        rational_json(closed.sandwich_high), rational_json(boundary)});
    rep.summary["closed_form"] = rational_json(closed.value);
    rep.summary["closed_form_decimal"] = decimal(closed.value);
    rep.summary["oracle"] = rational_json(oracle);
    rep.summary["equal"] = closed.value == oracle;
    rep.summary["sandwich"] = to_string(closed.sandwich_low) + " < eta <= " + to_string(closed.sandwich_high);
    rep.summary["boundary_delta"] = rational_json(boundary);
    return rep;
}

MonteCarloReport run_montecarlo(const RunConfig& cfg) {
    if (cfg.samples < 1) throw Error(ErrorCode::InvalidArgument, "--samples must be >= 1");
    if (cfg.depth < 10) throw Error(ErrorCode::InvalidArgument, "--depth must be >= 10");
    if (cfg.levels < 1) throw Error(ErrorCode::InvalidArgument, "--levels must be >= 1");
    const FieldSpec F = cfg.field();
    const std::uint64_t q = F.q();
    const Thresholds th = Thresholds::make(cfg.m, cfg.e_k, cfg.e_k + 1);
    const std::int64_t depth = cfg.depth;

    MonteCarloReport mc;
    mc.samples = cfg.samples;
    mc.depth = depth;
    mc.seed = cfg.seed;
    mc.per_sample.resize(static_cast<std::size_t>(cfg.samples));
    parallel_for(mc.per_sample.size(), cfg.threads, [&](std::size_t i) {
        SampleResult& res = mc.per_sample[i];
        res.seed = derive_seed(cfg.seed, i);
        // b_0 .. b_{depth+1}: theorem statistics at n = depth read b_{depth+1}.
        SampledExpansion se = sample_expansion(F, static_cast<std::size_t>(depth) + 2, res.seed);
        res.coefficient_depth = se.coefficient_depth;
        res.retries = se.retries;
        const auto deg = se.cf.degrees();
        res.degrees.assign(deg.begin() + 1, deg.end());
        const auto rows = theorem_report(se.cf, th, depth);
        if (rows.empty() || rows.back().n != depth)
            throw Error(ErrorCode::TooShallow, "deg t_depth does not exceed e_k");
        res.ratio = rows.back().ratio;
        res.boundary_ratio = Rational(rows.back().countGprime) / measure_H_boundary(th.with_R(rows.back().R), F);
    });

    std::vector<double> means, ratios, boundary;
    std::vector<std::vector<double>> freqs(static_cast<std::size_t>(cfg.levels));
    for (const auto& s : mc.per_sample) {
        std::int64_t sum = 0;
        for (std::int64_t j = 0; j < depth; ++j) sum += s.degrees[static_cast<std::size_t>(j)];
        means.push_back(static_cast<double>(sum) / static_cast<double>(depth));
        for (std::int64_t l = 1; l <= cfg.levels; ++l) {
            std::int64_t c = 0;
            for (std::int64_t j = 0; j < depth; ++j) c += s.degrees[static_cast<std::size_t>(j)] >= l ? 1 : 0;
            freqs[static_cast<std::size_t>(l - 1)].push_back(static_cast<double>(c) / static_cast<double>(depth));
        }
        ratios.push_back(to_double(s.ratio));
        boundary.push_back(to_double(s.boundary_ratio));
    }
    mc.mean_degree = mean_with_error(means);
    for (const auto& f : freqs) mc.freq_ge.push_back(mean_with_error(f));
    mc.measured_ratio_limit = mean_with_error(ratios);
    mc.boundary_ratio = mean_with_error(boundary);

    // delta = q^m: 1/delta = q^{-m} is an integer, log_q(1/delta) = -m.
    const std::int64_t m0 = th.m0();
    const Rational inv_delta = q_power(q, -cfg.m);
    if (inv_delta > Rational(1'000'000))
        throw Error(ErrorCode::InvalidArgument, "ceil(1/delta) too large to form q^{ceil(1/delta)}");
    const std::int64_t ceil_inv = static_cast<std::int64_t>(boost::multiprecision::numerator(inv_delta));
    mc.corollary_limit_literal = Rational(q - 1) * q_power(q, -(ceil_inv + m0 + 1));
    mc.corollary_limit_log = Rational(q - 1) * q_power(q, -(-cfg.m + m0 + 1));
    mc.strict_threshold_limit = q_power(q, -(m0 + 1)) * q_power(q, cfg.m) * Rational(q - 1) / Rational(q);

    auto close = [&](const Rational& cand) {
        const double c = to_double(cand);
        return std::abs(mc.measured_ratio_limit.value - c) <= MonteCarloReport::kMatchTolerance * c;
    };
    const bool lit = close(mc.corollary_limit_literal), lg = close(mc.corollary_limit_log);
    mc.matching_candidate = lit && lg ? "both" : lit ? "literal" : lg ? "log" : "none";
    return mc;
}

Report cmd_montecarlo(const RunConfig& cfg) { return cmd_montecarlo(cfg, run_montecarlo(cfg)); }

Report cmd_montecarlo(const RunConfig& cfg, const MonteCarloReport& mc) {
    const FieldSpec F = cfg.field();
    const double q = F.q();
    Report rep = make_report(cfg, "montecarlo", {"sample", "seed", "coefficient_depth", "retries", "mean_degree",
                                                 "freq_ge_2", "ratio", "ratio_decimal", "boundary_ratio_decimal"});
    for (std::size_t i = 0; i < mc.per_sample.size(); ++i) {
        const auto& s = mc.per_sample[i];
        std::int64_t sum = 0, ge2 = 0;
        for (std::int64_t j = 0; j < mc.depth; ++j) {
            sum += s.degrees[static_cast<std::size_t>(j)];
            ge2 += s.degrees[static_cast<std::size_t>(j)] >= 2 ? 1 : 0;
        }
        rep.rows.push_back({i, s.seed, s.coefficient_depth, s.retries,
                            decimal(static_cast<double>(sum) / static_cast<double>(mc.depth)),
                            decimal(static_cast<double>(ge2) / static_cast<double>(mc.depth)), rational_json(s.ratio),
                            decimal(s.ratio), decimal(s.boundary_ratio)});
    }
    auto& S = rep.summary;
    S["samples"] = mc.samples;
    S["depth"] = mc.depth;
    S["seed"] = mc.seed;
    S["mean_degree"] = dwe_json(mc.mean_degree);
    S["mean_degree_target"] = q / (q - 1);
    Json fr = Json::array();
    for (std::size_t l = 0; l < mc.freq_ge.size(); ++l)
        fr.push_back(Json{{"l", l + 1}, {"value", mc.freq_ge[l].value}, {"stderr", mc.freq_ge[l].stderr_},
                          {"target", std::pow(q, -static_cast<double>(l))}});
    S["freq_ge"] = fr;
    S["delta"] = "q^" + std::to_string(cfg.m);
    S["k"] = "q^" + std::to_string(cfg.e_k);
    S["corollary_limit_literal"] = Json{{"exact", to_string(mc.corollary_limit_literal)},
                                        {"decimal", to_double(mc.corollary_limit_literal)}};
    S["corollary_limit_log"] = Json{{"exact", to_string(mc.corollary_limit_log)},
                                    {"decimal", to_double(mc.corollary_limit_log)}};
    S["measured_ratio_limit"] = dwe_json(mc.measured_ratio_limit);
    S["match_tolerance"] = MonteCarloReport::kMatchTolerance;
    S["matching_candidate"] = mc.matching_candidate;
    S["diagnostic_strict_threshold_limit"] = Json{{"exact", to_string(mc.strict_threshold_limit)},
                                                  {"decimal", to_double(mc.strict_threshold_limit)}};
    S["diagnostic_boundary_ratio"] = dwe_json(mc.boundary_ratio);
    return rep;
}

Report cmd_theorem(const RunConfig& cfg) {
    const FieldSpec F = cfg.field();
    if (cfg.depth < 1) throw Error(ErrorCode::InvalidArgument, "--depth must be >= 1");
    const Thresholds th = Thresholds::make(cfg.m, cfg.e_k, cfg.e_k + 1);
    const CFExpansion cf =
        expansion_of(F, cfg.alpha.empty() ? "haar" : cfg.alpha, cfg.precision, static_cast<std::size_t>(cfg.depth) + 2,
                     cfg.seed);
    const auto rows = theorem_report(cf, th, cfg.depth, cfg.allow_rational);
    Report rep = make_report(cfg, "theorem", {"n", "R", "countGprime", "measureH", "ratio", "ratio_decimal",
                                              "predicted_low", "predicted_high", "in_band"});
    std::size_t inside = 0;
    for (const auto& r : rows) {
        inside += r.in_band() ? 1 : 0;
        rep.rows.push_back({r.n, r.R, r.countGprime, rational_json(r.measureH), rational_json(r.ratio),
                            decimal(r.ratio), rational_json(r.predicted_low), rational_json(r.predicted_high),
                            r.in_band()});
    }
    rep.summary["expansion_quotients"] = cf.b.size();
    rep.summary["constant_c"] = to_string(q_power(F.q(), -(th.m0() + 1)));
    rep.summary["rows"] = rows.size();
    rep.summary["rows_in_band"] = inside;
    if (!rows.empty()) {
        rep.summary["final_ratio"] = decimal(rows.back().ratio);
        rep.summary["final_band"] = Json::array({decimal(rows.back().predicted_low), decimal(rows.back().predicted_high)});
    }
    return rep;
}

Report run_command(std::string_view command, const RunConfig& cfg) {
    if (command == "cf") return cmd_cf(cfg);
    if (command == "identities") return cmd_identities(cfg);
    if (command == "count") return cmd_count(cfg);
    if (command == "measure") return cmd_measure(cfg);
    if (command == "montecarlo") return cmd_montecarlo(cfg);
    if (command == "theorem") return cmd_theorem(cfg);
    throw Error(ErrorCode::InvalidArgument, "unknown command '" + std::string(command) + "'");
}

}  // namespace ffcf::harness
