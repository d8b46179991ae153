#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ffcf/harness.hpp"

using namespace ffcf;
using namespace ffcf::harness;

namespace {

template <class F>
std::optional<std::size_t> parse_position(F&& f) {
    try {
        f();
    } catch (const ParseError& e) {
        return e.position();
    }
    return std::nullopt;
}

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an ffcf::Error");
    return ErrorCode::InvalidArgument;
}

RunConfig base_config() {
    RunConfig cfg;
    cfg.q = 3;
    cfg.threads = 2;
    return cfg;
}

/// Minimal RFC 4180 reader for the data part of a CSV report.
std::vector<std::vector<std::string>> read_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.starts_with("#")) continue;
        std::vector<std::string> cells;
        std::string cur;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    cur += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                cells.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        cells.push_back(cur);
        rows.push_back(std::move(cells));
    }
    return rows;
}

}  // namespace

TEST_CASE("cf subcommand") {
    RunConfig cfg = base_config();
    cfg.alpha = "rat:x^2+1/x";
    const Report rep = cmd_cf(cfg);
    CHECK(rep.summary["expansion"] == "[x;x]");
    CHECK(rep.summary["identities_all_pass"] == true);
    CHECK(rep.summary["terminated"] == true);

    cfg.alpha = "cfper:[0|x]";
    cfg.n = 10;
    const Report per = cmd_cf(cfg);
    CHECK(per.summary["quotients"] == 10);
    CHECK(per.summary["certified"] == 10);
    CHECK(per.rows.size() == 10);

    cfg.alpha = "rat:x^2+/x";
    CHECK(parse_position([&] { cmd_cf(cfg); }).has_value());
    CHECK(exit_code(code_of([&] { cmd_cf(cfg); })) == 2);
}

TEST_CASE("identities subcommand over rational and window input") {
    RunConfig cfg = base_config();
    cfg.alpha = "rat:x^5+2*x+1/x^3+x^2+2";
    cfg.n = 50;
    const Report rep = cmd_identities(cfg);
    CHECK(rep.summary["all_pass"] == true);
    CHECK(rep.summary["failures"] == 0);
    cfg.alpha = "haar:60";
    CHECK(cmd_identities(cfg).summary["all_pass"] == true);
}

TEST_CASE("measure subcommand") {
    RunConfig cfg = base_config();
    cfg.m = -1;
    cfg.e_k = 1;
    cfg.R = 5;
    const Report a = cmd_measure(cfg);
    CHECK(a.summary["closed_form"] == "8");
    CHECK(a.summary["oracle"] == "8");
    CHECK(a.summary["equal"] == true);
    cfg.m = -2;
    cfg.R = 3;
    CHECK(cmd_measure(cfg).summary["closed_form"] == "4/3");
    cfg.R = 1;
    CHECK(code_of([&] { cmd_measure(cfg); }) == ErrorCode::EmptyRegion);
}

TEST_CASE("count subcommand") {
    RunConfig cfg = base_config();
    cfg.alpha = "cfper:[0|x]";
    cfg.R = 5;
    const Report zero = cmd_count(cfg);
    REQUIRE(zero.rows.size() == 4);
    for (const auto& row : zero.rows) {
        CHECK(row[2] == 0);  // countG
        CHECK(row[3] == 0);  // countGprime
    }

    cfg.alpha = "cfper:[0|x^2]";
    cfg.R = 6;
    const Report two = cmd_count(cfg);
    CHECK(two.summary["max_abs_deltaG"] == 0);
    CHECK(two.rows.back()[3] == 6);

    // Over budget: the brute-force column is empty but the stream continues.
    cfg.budget = 1000;
    const Report capped = cmd_count(cfg);
    REQUIRE(capped.rows.size() == 5);
    CHECK(capped.rows.front()[2] == 2);         // R = 2: 3^6 = 729 pairs fit
    CHECK(capped.rows.back()[2].is_null());     // R = 6 does not
    CHECK(capped.rows.back()[3] == 6);
    CHECK(capped.rows.back()[9] == "BudgetExceeded");

    cfg.budget = kDefaultBudget;
    cfg.alpha = "rat:1/x";
    CHECK(code_of([&] { cmd_count(cfg); }) == ErrorCode::RationalInput);
    cfg.allow_rational = true;
    CHECK(cmd_count(cfg).rows.size() == 5);

    cfg.alpha.clear();
    cfg.allow_rational = false;
    cfg.form = "form:a=1;b=-cfper:[0|x^2];c=0;d=-1";
    CHECK(cmd_count(cfg).rows.back()[3] == 6);
}

TEST_CASE("value and form literals") {
    const FieldSpec F = FieldSpec::from_q(3);
    CHECK(parse_value(F, "x^2+1", 10).str() == "X^2+1");
    CHECK(parse_value(F, "-x", 10).str() == "2*X");
    CHECK(parse_value(F, "cfper:[0|x]", 10).str().starts_with("X^-1+2*X^-3"));
    CHECK(parse_value(F, "haar:20", 10, 5).str() == parse_value(F, "haar:20", 10, 5).str());
    const IsotropicForm f = parse_form(F, "form:a=1;b=-cfper:[0|x];c=0;d=-1", 32);
    CHECK(f.irrational_assumed());
    CHECK(f.alpha().agrees_with(parse_value(F, "cfper:[0|x]", 32)));

    const auto pos = parse_position([&] { parse_form(F, "form:a=1;b=x^;c=0;d=-1", 32); });
    REQUIRE(pos.has_value());
    CHECK(*pos == 13);  // after "x^"
    CHECK(code_of([&] { parse_form(F, "form:a=1;c=0;d=-1", 32); }) == ErrorCode::ParseError);
    CHECK(code_of([&] { parse_form(F, "form:a=1;b=1;c=1;d=1", 32); }) == ErrorCode::DeterminantViolation);
    CHECK(code_of([&] { parse_value(F, "haar:x", 8); }) == ErrorCode::ParseError);
}

TEST_CASE("json and csv output follow the documented schema") {
    RunConfig cfg = base_config();
    cfg.alpha = "cfper:[0|x^2]";
    cfg.R = 4;
    const Report rep = cmd_count(cfg);
    const auto j = Json::parse(rep.render(Format::Json));
    for (const char* key : {"meta", "summary", "columns", "rows"}) CHECK(j.contains(key));
    for (const char* key : {"tool", "version", "schema", "command", "rng", "seed", "field", "config"})
        CHECK(j["meta"].contains(key));
    CHECK(j["meta"]["schema"] == kSchemaVersion);
    CHECK(j["meta"]["config"]["alpha"] == "cfper:[0|x^2]");
    REQUIRE(j["rows"].size() == rep.rows.size());
    for (std::size_t r = 0; r < rep.rows.size(); ++r)
        for (std::size_t c = 0; c < rep.columns.size(); ++c)
            CHECK(j["rows"][r][rep.columns[c]] == rep.rows[r][c]);
    // Round trip: dumping the parsed document reproduces the bytes.
    CHECK(j.dump(2) + "\n" == rep.render(Format::Json));

    const auto csv = read_csv(rep.render(Format::Csv));
    REQUIRE(csv.size() == rep.rows.size() + 1);
    CHECK(csv[0] == rep.columns);
    CHECK(csv[1][0] == "2");
    CHECK(csv[1][3] == "2");

    const std::string table = rep.render(Format::Table);
    CHECK(table.find("countGprime") != std::string::npos);
}

TEST_CASE("error reports carry a machine-readable code") {
    RunConfig cfg = base_config();
    cfg.format = Format::Json;
    const ParseError pe(7, "bad");
    const auto j = Json::parse(render_error(cfg, "cf", pe, Format::Json));
    CHECK(j["error"]["code"] == "ParseError");
    CHECK(j["error"]["position"] == 7);
    CHECK(j["error"]["exit_code"] == 2);
    CHECK(exit_code(ErrorCode::PrecisionExhausted) == 3);
    CHECK(exit_code(ErrorCode::InsufficientQuotients) == 3);
    CHECK(exit_code(ErrorCode::BudgetExceeded) == 4);
    CHECK(exit_code(ErrorCode::EmptyRegion) == 1);
    // An invalid field still yields a well-formed error document.
    cfg.q = 4;
    const Error bad(ErrorCode::EvenCharacteristic, "q = 4");
    CHECK(Json::parse(render_error(cfg, "measure", bad, Format::Json))["error"]["code"] == "EvenCharacteristic");
}

TEST_CASE("Monte Carlo report invariants") {
    RunConfig cfg = base_config();
    cfg.samples = 60;
    cfg.depth = 60;
    const MonteCarloReport mc = run_montecarlo(cfg);
    REQUIRE(mc.freq_ge.size() == static_cast<std::size_t>(cfg.levels));
    CHECK(mc.freq_ge[0].value == 1.0);
    CHECK(mc.freq_ge[0].stderr_ == 0.0);
    for (std::size_t l = 1; l < mc.freq_ge.size(); ++l) CHECK(mc.freq_ge[l].value <= mc.freq_ge[l - 1].value);
    CHECK(mc.corollary_limit_literal == Rational(2, 27));
    CHECK(mc.corollary_limit_log == Rational(2, 3));
    CHECK(mc.strict_threshold_limit == Rational(2, 9));
    CHECK(mc.per_sample.size() == 60);
    for (const auto& s : mc.per_sample) CHECK(s.degrees.size() == 61);
    CHECK(std::abs(mc.mean_degree.value - 1.5) < 6 * mc.mean_degree.stderr_);

    cfg.samples = 0;
    CHECK(code_of([&] { run_montecarlo(cfg); }) == ErrorCode::InvalidArgument);
    cfg.samples = 10;
    cfg.depth = 9;
    CHECK(code_of([&] { run_montecarlo(cfg); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("Monte Carlo standard errors shrink like 1/sqrt(samples)") {
    RunConfig cfg = base_config();
    cfg.depth = 40;
    cfg.samples = 100;
    const MonteCarloReport small = run_montecarlo(cfg);
    cfg.samples = 400;
    cfg.seed = 2;
    const MonteCarloReport large = run_montecarlo(cfg);
    // Four times the samples halves the error, within 30%.
    const double ratio = small.mean_degree.stderr_ / large.mean_degree.stderr_;
    CHECK(ratio > 2.0 / 1.3);
    CHECK(ratio < 2.0 * 1.3);
    const double fratio = small.freq_ge[1].stderr_ / large.freq_ge[1].stderr_;
    CHECK(fratio > 2.0 / 1.3);
    CHECK(fratio < 2.0 * 1.3);
}

TEST_CASE("reports are byte-identical for identical configs, whatever the thread count") {
    RunConfig cfg = base_config();
    cfg.samples = 30;
    cfg.depth = 40;
    cfg.threads = 1;
    const std::string a = cmd_montecarlo(cfg).render(Format::Json);
    cfg.threads = 4;
    const std::string b = cmd_montecarlo(cfg).render(Format::Json);
    CHECK(a == b);
    CHECK(cmd_montecarlo(cfg).render(Format::Csv) == cmd_montecarlo(cfg).render(Format::Csv));
    cfg.seed = 99;
    CHECK(cmd_montecarlo(cfg).render(Format::Json) != a);

    RunConfig th = base_config();
    th.alpha = "haar";
    th.depth = 100;
    th.seed = 5;
    CHECK(cmd_theorem(th).render(Format::Json) == cmd_theorem(th).render(Format::Json));
}

TEST_CASE("theorem subcommand") {
    RunConfig cfg = base_config();
    cfg.alpha = "cfper:[0|x]";
    cfg.depth = 40;
    const Report rep = cmd_theorem(cfg);
    CHECK(rep.summary["rows"] == rep.rows.size());
    for (const auto& row : rep.rows) CHECK(row[4] == "0");
    cfg.alpha = "cf:[0;x,x]";
    cfg.depth = 1;
    CHECK(code_of([&] { cmd_theorem(cfg); }) == ErrorCode::RationalInput);
}

TEST_CASE("field selection") {
    RunConfig cfg;
    cfg.p = 3;
    cfg.r = 2;
    CHECK(cfg.field() == FieldSpec::from_q(9));
    cfg.modulus = "x^2+x+2";
    CHECK(cfg.field().modulus() == std::vector<std::uint32_t>{2, 1, 1});
    cfg.modulus = "x^2+2";
    CHECK(code_of([&] { cfg.field(); }) == ErrorCode::ReducibleModulus);
    cfg.modulus.clear();
    cfg.q = 25;
    CHECK(cfg.field().p() == 5);
    CHECK(cfg.field().r() == 2);
}
