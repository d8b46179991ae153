#include <doctest.h>

#include <array>

#include "ffcf/contfrac.hpp"
#include "ffcf/laurent.hpp"
#include "test_support.hpp"

using namespace ffcf;
using ffcf::testing::random_poly;
using ffcf::testing::random_poly_exact;

namespace {

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

/// Coefficient of X^{-j} in P/Q for j in [lo, L], read off the polynomial
/// quotient floor(P X^L / Q).
std::vector<Elem> series_oracle(const Poly& P, const Poly& Q, std::int64_t lo, std::int64_t L) {
    const DivMod dm = divmod(P.shifted(static_cast<std::size_t>(L)), Q);
    std::vector<Elem> out;
    for (std::int64_t j = lo; j <= L; ++j) out.push_back(L - j >= 0 ? dm.quotient.coeff(static_cast<std::size_t>(L - j)) : 0);
    return out;
}

/// alpha = [0; x, x, ...] satisfies alpha^2 + x alpha - 1 = 0; solve for a_j.
std::vector<Elem> golden_oracle(const FieldSpec& F, std::size_t n) {
    std::vector<Elem> a(n + 1, 0);  // a[j] = coefficient of X^{-j}
    a[1] = 1;
    for (std::size_t j = 1; j + 1 <= n; ++j) {
        Elem s = 0;
        for (std::size_t i = 1; i < j; ++i) s = F.add(s, F.mul(a[i], a[j - i]));
        a[j + 1] = F.neg(s);
    }
    return a;
}

}  // namespace

TEST_CASE("expansion of P/Q matches the shifted polynomial quotient") {
    for (std::uint64_t q : {3u, 5u, 9u}) {
        const FieldSpec F = FieldSpec::from_q(q);
        Xoshiro256 rng(q * 17);
        for (int i = 0; i < 100; ++i) {
            const Poly P = random_poly_exact(F, rng, static_cast<std::int64_t>(rng.below(6)));
            const Poly Q = random_poly_exact(F, rng, static_cast<std::int64_t>(rng.below(6)));
            const LaurentNumber v = LaurentNumber::from_rational(P, Q, 30);
            CHECK(v.valuation() == Q.deg() - P.deg());
            CHECK(v.abs() == AbsExp(P.deg() - Q.deg()));
            const std::int64_t lo = v.valuation();
            const auto oracle = series_oracle(P, Q, lo, lo + 29);
            for (std::int64_t j = lo; j < lo + 30; ++j) CHECK(v.coeff(j) == oracle[static_cast<std::size_t>(j - lo)]);
            // Backed values refine on demand beyond the stored window.
            const auto far = series_oracle(P, Q, lo + 60, lo + 70);
            for (std::int64_t j = lo + 60; j <= lo + 70; ++j) CHECK(v.coeff(j) == far[static_cast<std::size_t>(j - lo - 60)]);
        }
    }
}

TEST_CASE("[0; x, x, ...] agrees with the root of alpha^2 + x alpha - 1") {
    const FieldSpec F = FieldSpec::from_q(3);
    const auto x = Poly::x(F);
    const CFExpansion cf = cf_periodic({Poly(F)}, {x}, 80);
    const LaurentNumber alpha = approx_from_cf(cf, 60);
    const auto oracle = golden_oracle(F, 60);
    for (std::int64_t j = 1; j <= 60; ++j) CHECK(alpha.coeff(j) == oracle[static_cast<std::size_t>(j)]);
    CHECK(alpha.str().starts_with("X^-1+2*X^-3+"));
    // Quadratic relation evaluated in window arithmetic.
    const LaurentNumber rel = alpha * alpha + LaurentNumber::from_poly(x) * alpha;
    CHECK(rel.valuation() == 0);
    CHECK(rel.coeff(0) == 1);
    for (std::int64_t j = 1; j < *rel.horizon(); ++j) CHECK(rel.coeff(j) == 0);
}

TEST_CASE("window precision tracking") {
    const FieldSpec F = FieldSpec::from_q(3);
    const LaurentNumber u = LaurentNumber::from_window(F, 1, {1, 2, 0, 1});      // H = 5
    const LaurentNumber v = LaurentNumber::from_window(F, 2, {2, 0, 0, 1, 1, 2});  // H = 8
    CHECK(u.valuation() == 1);
    CHECK(u.known() == 4);
    CHECK(*u.horizon() == 5);
    CHECK(*(u + v).horizon() == 5);
    CHECK(*(v - u).horizon() == 5);
    const LaurentNumber uv = u * v;
    CHECK(uv.valuation() == 3);
    CHECK(uv.known() == 4);
    const LaurentNumber ui = u.inv();
    CHECK(ui.valuation() == -1);
    CHECK(ui.known() == 4);
    CHECK((ui * u).agrees_with(LaurentNumber::from_poly(Poly::constant(F, 1))));
    CHECK(code_of([&] { (void)u.coeff(5); }) == ErrorCode::PrecisionExhausted);
    CHECK(u.coeff(0) == 0);
    CHECK(u.coeff(4) == 1);

    // Leading zeros in the window are skipped, and an all-zero inexact window
    // has no determinable valuation.
    const LaurentNumber w = LaurentNumber::from_window(F, -1, {0, 0, 2, 1});
    CHECK(w.valuation() == 1);
    CHECK(*w.horizon() == 3);
    CHECK(code_of([&] { LaurentNumber::from_window(F, 1, {0, 0}); }) == ErrorCode::PrecisionExhausted);

    // Sums that cancel every known coefficient cannot be resolved.
    CHECK(code_of([&] { (void)(u - u.truncated(3)); }) == ErrorCode::PrecisionExhausted);
}

TEST_CASE("floor needs every non-negative power") {
    const FieldSpec F = FieldSpec::from_q(3);
    const LaurentNumber a = LaurentNumber::from_window(F, -2, {1, 1, 0, 1, 2});  // X^2 + X + X^-1 + ..
    CHECK(a.floor() == Poly::parse(F, "x^2+x"));
    const LaurentNumber b = LaurentNumber::from_window(F, -2, {1, 1});  // H = 0
    CHECK(code_of([&] { (void)b.floor(); }) == ErrorCode::PrecisionExhausted);
    CHECK(LaurentNumber::from_window(F, 1, {2, 1}).floor().is_zero());
    CHECK(LaurentNumber::from_rational(Poly::parse(F, "x^3+1"), Poly::parse(F, "x"), 5).floor() ==
          Poly::parse(F, "x^2"));
}

TEST_CASE("window arithmetic agrees with exact rational arithmetic") {
    for (std::uint64_t q : {3u, 9u}) {
        const FieldSpec F = FieldSpec::from_q(q);
        Xoshiro256 rng(99 + q);
        for (int i = 0; i < 150; ++i) {
            const Poly P1 = random_poly_exact(F, rng, static_cast<std::int64_t>(rng.below(5)));
            const Poly Q1 = random_poly_exact(F, rng, static_cast<std::int64_t>(rng.below(5)));
            const Poly P2 = random_poly_exact(F, rng, static_cast<std::int64_t>(rng.below(5)));
            const Poly Q2 = random_poly_exact(F, rng, static_cast<std::int64_t>(rng.below(5)));
            const auto r1 = RationalFunction::make(P1, Q1), r2 = RationalFunction::make(P2, Q2);
            const LaurentNumber a = LaurentNumber::from_rational(r1, 25).without_backing();
            const LaurentNumber b = LaurentNumber::from_rational(r2, 25).without_backing();
            CHECK((a * b).agrees_with(LaurentNumber::from_rational(r1 * r2, 80)));
            CHECK(a.inv().agrees_with(LaurentNumber::from_rational(inverse(r1), 80)));
            CHECK((a / b).agrees_with(LaurentNumber::from_rational(r1 * inverse(r2), 80)));
            const auto sum = r1 + r2;
            if (!sum.is_zero()) {
                try {
                    CHECK((a + b).agrees_with(LaurentNumber::from_rational(sum, 80)));
                } catch (const Error& e) {
                    CHECK(e.code() == ErrorCode::PrecisionExhausted);
                }
                // With backings the sum always resolves, refining past cancellation.
                const LaurentNumber ab = LaurentNumber::from_rational(r1, 3) + LaurentNumber::from_rational(r2, 3);
                CHECK(ab.valuation() == LaurentNumber::from_rational(sum, 5).valuation());
            }
        }
    }
}

TEST_CASE("backed values resolve exact cancellation") {
    const FieldSpec F = FieldSpec::from_q(3);
    const LaurentNumber u = LaurentNumber::from_rational(Poly::constant(F, 1), Poly::parse(F, "x+2"), 5);
    const LaurentNumber v = LaurentNumber::from_rational(Poly::constant(F, 1), Poly::x(F), 5);
    const LaurentNumber d = u - v;  // 1/(x(x-1)), valuation 2
    CHECK(d.valuation() == 2);
    CHECK((u - u).is_zero());
    CHECK(d.backing().has_value());
}

TEST_CASE("rational functions stay reduced with monic denominators") {
    const FieldSpec F = FieldSpec::from_q(5);
    const auto r = RationalFunction::make(Poly::parse(F, "2*x^2+2*x"), Poly::parse(F, "3*x+3"));
    CHECK(r.num == Poly::parse(F, "4*x"));
    CHECK(r.den == Poly::constant(F, 1));
    CHECK(code_of([&] { RationalFunction::make(Poly::x(F), Poly(F)); }) == ErrorCode::DivisionByZero);
    CHECK(code_of([&] { inverse(RationalFunction::make(Poly(F), Poly::x(F))); }) == ErrorCode::DivisionByZero);
}

TEST_CASE("Haar sampling is seeded, in the unit ball, and uniform per coefficient") {
    const FieldSpec F = FieldSpec::from_q(3);
    const LaurentNumber a = LaurentNumber::sample(F, 50, 7), b = LaurentNumber::sample(F, 50, 7);
    const LaurentNumber c = LaurentNumber::sample(F, 50, 8);
    CHECK(a.str() == b.str());
    CHECK(a.str() != c.str());
    CHECK(a.valuation() >= 1);
    CHECK(*a.horizon() == 51);
    // A deeper sample with the same seed extends the same value.
    const LaurentNumber deep = LaurentNumber::sample(F, 200, 7);
    for (std::int64_t j = a.valuation(); j <= 50; ++j) CHECK(deep.coeff(j) == a.coeff(j));

    std::array<int, 3> counts{};
    for (std::uint64_t s = 0; s < 30; ++s) {
        const LaurentNumber x = LaurentNumber::sample(F, 300, 1000 + s);
        for (std::int64_t j = x.valuation(); j <= 300; ++j) ++counts[x.coeff(j)];
    }
    const double total = counts[0] + counts[1] + counts[2];
    double chi2 = 0;
    for (int k : counts) chi2 += (k - total / 3) * (k - total / 3) / (total / 3);
    CHECK(chi2 < 13.8);  // 99.9% quantile of chi^2 with 2 degrees of freedom
}

TEST_CASE("literal parsing") {
    const FieldSpec F = FieldSpec::from_q(3);
    CHECK(parse_laurent(F, "rat:x^2+1/x").str() == "X+X^-1");
    CHECK(parse_laurent(F, "coeffs:1:1,0,2").str() == "X^-1+2*X^-3+O(X^-4)");
    CHECK(parse_laurent(F, "coeffs:-1:0,1,2").valuation() == 0);
    auto pos_of = [&](const char* text) -> std::size_t {
        try {
            parse_laurent(F, text);
        } catch (const ParseError& e) {
            return e.position();
        }
        FAIL("expected ParseError for " << text);
        return 0;
    };
    CHECK(pos_of("rat:x^2+1") == 9);
    CHECK(pos_of("rat:x^2+/x") == 8);
    CHECK(pos_of("rat:1/0") == 6);
    CHECK(pos_of("coeffs:1:1,3") == 11);
    CHECK(pos_of("coeffs:1;1") == 8);
    CHECK(pos_of("series:1") == 0);
}

TEST_CASE("printing is exact for finite values and marks the horizon otherwise") {
    const FieldSpec F = FieldSpec::from_q(3);
    CHECK(LaurentNumber::from_poly(Poly::parse(F, "x^2+2")).str() == "X^2+2");
    CHECK(LaurentNumber(F).str() == "0");
    CHECK(LaurentNumber::from_window(F, 0, {1, 0, 2}).str() == "1+2*X^-2+O(X^-3)");
}

TEST_CASE("a polynomial value longer than the precision keeps an inexact tail") {
    const FieldSpec F = FieldSpec::from_q(3);
    const Poly P = Poly::parse(F, "x^9+x^8+x^7+2*x^6+2*x^4+2*x^3+x^2+x+2");
    const Poly Q = Poly::parse(F, "2*x+2");
    const LaurentNumber a = LaurentNumber::from_rational(P, Q, 8);
    CHECK_FALSE(a.exact_tail());
    CHECK(a.known() == 8);
    CHECK(a.coeff(0) == 1);  // refined from the backing
    CHECK(LaurentNumber::from_rational(P, Q, 9).exact_tail());
}
