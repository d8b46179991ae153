#include <doctest.h>

#include "ffcf/counting.hpp"
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

LaurentNumber periodic_alpha(const FieldSpec& F, const char* quotient, std::int64_t precision = 64) {
    return approx_from_cf(cf_periodic({Poly(F)}, {Poly::parse(F, quotient)}, static_cast<std::size_t>(precision) + 2),
                          precision);
}

LaurentNumber exact(const Poly& p, const Poly& q) { return LaurentNumber::from_rational(p, q, 16); }

/// Random form with exact entries: a, b, c random, d = (bc - 1)/a.
IsotropicForm random_exact_form(const FieldSpec& F, Xoshiro256& rng) {
    auto rnd = [&] {
        const Poly p = random_poly_exact(F, rng, static_cast<std::int64_t>(rng.below(3)));
        const Poly q = random_poly_exact(F, rng, static_cast<std::int64_t>(rng.below(3)));
        return RationalFunction::make(p, q);
    };
    const RationalFunction a = rnd(), b = rnd(), c = rnd();
    const RationalFunction one = RationalFunction::make(Poly::constant(F, 1), Poly::constant(F, 1));
    const RationalFunction d = (b * c - one) * inverse(a);
    auto lift = [](const RationalFunction& r) {
        return r.is_zero() ? LaurentNumber(r.num.field()) : LaurentNumber::from_rational(r, 16);
    };
    return IsotropicForm::make(lift(a), lift(b), lift(c), lift(d));
}

/// Straight from the set definition with window arithmetic on every pair.
std::int64_t count_naive(const IsotropicForm& f, const Thresholds& th, bool cutoff_on_first) {
    const auto& F = f.field();
    const auto polys = all_polys(F, th.R);
    std::int64_t n = 0;
    for (const Poly& t : polys)
        for (const Poly& s : polys) {
            if (s.is_zero() && t.is_zero()) continue;
            const LaurentNumber S = LaurentNumber::from_poly(s), T = LaurentNumber::from_poly(t);
            const LaurentNumber l1 = f.a() * S + f.b() * T;
            const LaurentNumber l2 = f.c() * S + f.d() * T;
            if (l1.is_zero() || l2.is_zero()) continue;
            const AbsExp cut = cutoff_on_first ? l1.abs() : l2.abs();
            if (!(cut > AbsExp(th.e_k))) continue;
            if (!(l1.abs() + l2.abs() < AbsExp(th.m))) continue;
            if (!coprime(s, t)) continue;
            ++n;
        }
    return n;
}

}  // namespace

TEST_CASE("threshold sandwich integers") {
    const Thresholds a = Thresholds::make(-1, 1, 5);
    CHECK(a.m0() == -1);
    CHECK(a.m0p() == -1);
    CHECK(a.t() == 2);
    CHECK(a.i() == 4);
    const Thresholds b = Thresholds::make(-2, 1, 3);
    CHECK(b.m0p() == -1);
    CHECK(b.t() == 2);
    CHECK(b.i() == 2);
    CHECK(Thresholds::make(-3, 1, 3).m0p() == -2);
    CHECK(Thresholds::make(-4, 2, 3).m0p() == -2);
    // i = R - m0' - t
    for (std::int64_t m = -6; m <= -1; ++m)
        for (std::int64_t e = 1; e <= 4; ++e) {
            const Thresholds th = Thresholds::make(m, e, e + 3);
            CHECK(th.i() == th.R - th.m0p() - th.t());
            // q^{m0'} <= sqrt(delta) < q^{m0'+1}  <=>  2 m0' <= m < 2 m0' + 2
            CHECK(2 * th.m0p() <= m);
            CHECK(m < 2 * th.m0p() + 2);
        }
    CHECK(code_of([] { Thresholds::make(0, 1, 3); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { Thresholds::make(-1, 0, 3); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("form construction") {
    const FieldSpec F = FieldSpec::from_q(3);
    const LaurentNumber alpha = periodic_alpha(F, "x");
    const IsotropicForm f = IsotropicForm::from_alpha(alpha);
    CHECK(f.alpha().agrees_with(alpha));
    CHECK(f.beta().is_zero());
    CHECK(f.irrational_assumed());

    const LaurentNumber one = LaurentNumber::from_poly(Poly::constant(F, 1));
    const LaurentNumber zero(F);
    const IsotropicForm g = IsotropicForm::make(one, zero, zero, -one);
    CHECK(g.alpha().is_zero());
    CHECK_FALSE(g.irrational_assumed());
    CHECK(code_of([&] { IsotropicForm::make(one, one, one, one); }) == ErrorCode::DeterminantViolation);
    CHECK(code_of([&] { IsotropicForm::make(zero, one, -one, zero); }) == ErrorCode::ZeroLeadingCoefficient);

    // The swap keeps the determinant and is an involution up to sign of all entries.
    Xoshiro256 rng(3);
    for (int i = 0; i < 20; ++i) {
        const IsotropicForm h = random_exact_form(F, rng);
        if (h.c().is_zero()) continue;
        const IsotropicForm hh = h.swapped().swapped();
        CHECK(hh.a().agrees_with(-h.a()));
        CHECK(hh.b().agrees_with(-h.b()));
        CHECK(hh.c().agrees_with(-h.c()));
        CHECK(hh.d().agrees_with(-h.d()));
        // Negating every entry leaves Q, the determinant and alpha unchanged.
        CHECK(hh.alpha().agrees_with(h.alpha()));
    }
}

TEST_CASE("q_eval: both evaluations agree") {
    const FieldSpec F = FieldSpec::from_q(3);
    const IsotropicForm f = IsotropicForm::from_alpha(periodic_alpha(F, "x"));
    const QValue v = q_eval(f, Poly::constant(F, 1), Poly::x(F));
    CHECK(v.direct == AbsExp(-1));
    CHECK(v.agree());
    CHECK(q_eval(f, Poly(F), Poly(F)).direct.is_neg_inf());

    Xoshiro256 rng(1000);
    for (std::uint64_t q : {3u, 9u}) {
        const FieldSpec G = FieldSpec::from_q(q);
        const IsotropicForm h = random_exact_form(G, rng);
        for (int i = 0; i < 500; ++i) {
            const Poly s = random_poly(G, rng, 5), t = random_poly(G, rng, 5);
            const QValue w = q_eval(h, s, t);
            CHECK(w.agree());
        }
    }
    // Random irrational-looking forms too: windows of Haar-random alpha.
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const IsotropicForm h = IsotropicForm::from_alpha(LaurentNumber::sample(F, 120, seed));
        for (int i = 0; i < 100; ++i) {
            const Poly s = random_poly(F, rng, 6), t = random_poly(F, rng, 6);
            if (s.is_zero() && t.is_zero()) continue;
            CHECK(q_eval(h, s, t).agree());
        }
    }
}

TEST_CASE("measure of H: closed form, shell sum, and sandwich") {
    const FieldSpec F3 = FieldSpec::from_q(3);
    CHECK(measure_H(Thresholds::make(-1, 1, 5), F3).value == 8);
    CHECK(measure_H_oracle(Thresholds::make(-1, 1, 5), F3) == 8);
    CHECK(measure_H(Thresholds::make(-2, 1, 3), F3).value == Rational(4, 3));
    CHECK(measure_H_oracle(Thresholds::make(-2, 1, 3), F3) == Rational(4, 3));
    CHECK(code_of([&] { measure_H(Thresholds::make(-1, 2, 2), F3); }) == ErrorCode::EmptyRegion);
    CHECK(code_of([&] { measure_H_oracle(Thresholds::make(-1, 2, 2), F3); }) == ErrorCode::EmptyRegion);
    int points = 0;
    for (std::uint64_t q : {3u, 5u}) {
        const FieldSpec F = FieldSpec::from_q(q);
        for (std::int64_t m = -4; m <= -1; ++m)
            for (std::int64_t e = 1; e <= 3; ++e)
                for (std::int64_t R = e + 1; R <= e + 5; ++R) {
                    const Thresholds th = Thresholds::make(m, e, R);
                    const MeasureReport rep = measure_H(th, F);
                    CHECK(rep.value == measure_H_oracle(th, F));
                    CHECK(rep.value == Rational(th.i()) * q_power(q, m + 1) * Rational(q - 1));
                    CHECK(rep.sandwich_low < rep.value);
                    CHECK(rep.value <= rep.sandwich_high);
                    // delta = q^m exactly drops the outermost |xy| shell.
                    CHECK(measure_H_boundary(th, F) * Rational(q) == rep.value);
                    ++points;
                }
    }
    CHECK(points == 120);
}

TEST_CASE("shell sum matches an enumeration of discretized pairs") {
    // Cells of radius q^-P: x = sum of digits on X^R .. X^-(P-1), read as the
    // polynomial x X^{P-1} of degree <= R + P - 1. With mu(|x| <= q^r) = q^{r+1}
    // each cell has measure q^{1-P}. Membership is constant on cells with
    // x, y != 0; with P > R - m the whole x = 0 cell lies in the region.
    const std::uint64_t q = 3;
    const FieldSpec F = FieldSpec::from_q(q);
    const std::int64_t e = 1, R = 2;
    for (std::int64_t m : {-1, -2}) {
        const std::int64_t P = R - m + 1;
        const auto cells = all_polys(F, R + P - 1);
        // `generic`: delta strictly inside (q^m, q^{m+1}), so |x||y| < delta iff dx + dy <= m.
        // `boundary`: delta = q^m exactly, so dx + dy < m.
        std::int64_t generic = 0, boundary = 0;
        Rational axis = 0;
        for (const Poly& y : cells) {
            if (y.is_zero()) continue;  // |y| <= k already excludes y = 0
            const std::int64_t dy = y.deg() - (P - 1);
            if (!(dy > e)) continue;
            for (const Poly& x : cells) {
                if (x.is_zero()) continue;
                const std::int64_t dx = x.deg() - (P - 1);
                generic += dx + dy <= m;
                boundary += dx + dy < m;
            }
            axis += q_power(q, 1 - P) * q_power(q, 1 - P);  // the x = 0 cell next to this y cell
        }
        const Rational cell = q_power(q, 2 * (1 - P));
        const Rational delta = (q_power(q, m) + q_power(q, m + 1)) / 2;
        const Thresholds th = Thresholds::make(m, e, R);
        CHECK(Rational(generic) * cell + axis == measure_A_shells(q, delta, e, R));
        CHECK(Rational(generic) * cell + axis == measure_H(th, F).value);
        CHECK(Rational(boundary) * cell + axis == measure_H_boundary(th, F));
    }
}

TEST_CASE("brute-force counts: reference instances") {
    const FieldSpec F = FieldSpec::from_q(3);
    const IsotropicForm fx = IsotropicForm::from_alpha(periodic_alpha(F, "x"));
    CHECK(count_G_bruteforce(fx, Thresholds::make(-1, 1, 3)) == 0);
    const IsotropicForm fx2 = IsotropicForm::from_alpha(periodic_alpha(F, "x^2"));
    const CFExpansion cf2 = cf_periodic({Poly(F)}, {Poly::parse(F, "x^2")}, 12);
    CHECK(count_Gprime(cf2, Thresholds::make(-1, 1, 6)) == 6);
    CHECK(count_G_bruteforce(fx2, Thresholds::make(-1, 1, 4)) == count_Gprime(cf2, Thresholds::make(-1, 1, 4)));
    CHECK(code_of([&] { count_G_bruteforce(fx2, Thresholds::make(-1, 1, 6), 1000); }) == ErrorCode::BudgetExceeded);
}

TEST_CASE("brute force matches a naive evaluation of the set definitions") {
    Xoshiro256 rng(77);
    for (std::uint64_t q : {3u, 5u}) {
        const FieldSpec F = FieldSpec::from_q(q);
        for (int i = 0; i < 8; ++i) {
            const IsotropicForm f = random_exact_form(F, rng);
            for (std::int64_t m : {-1, -2})
                for (std::int64_t R = 1; R <= (q == 3 ? 3 : 2); ++R) {
                    const Thresholds th = Thresholds::make(m, 1, R);
                    CHECK(count_G_bruteforce(f, th) == count_naive(f, th, false));
                    CHECK(count_I_bruteforce(f, th) == count_naive(f, th, true));
                }
        }
    }
}

TEST_CASE("count_I is count_G of the swapped form, and counts are independent of threads") {
    const FieldSpec F = FieldSpec::from_q(3);
    Xoshiro256 rng(5150);
    for (int i = 0; i < 20; ++i) {
        const IsotropicForm f = random_exact_form(F, rng);
        const Thresholds th = Thresholds::make(-1 - static_cast<std::int64_t>(rng.below(2)), 1, 3);
        const auto g1 = count_G_bruteforce(f, th, kDefaultBudget, 1);
        CHECK(count_I_bruteforce(f, th) == count_G_bruteforce(f.swapped(), th));
        CHECK(g1 == count_G_bruteforce(f, th, kDefaultBudget, 4));
        // Unit scaling orbits have size q - 1.
        CHECK(g1 % 2 == 0);
    }
    // The I-cutoff |s - alpha t| > k on (1, -alpha, 0, -1): |s - alpha t| <= max(|s|, |t|/q)
    // and |Q| = |s - alpha t||t| < q^-1 forces both small at R = 1.
    const IsotropicForm fx = IsotropicForm::from_alpha(periodic_alpha(F, "x"));
    CHECK(count_I_bruteforce(fx, Thresholds::make(-1, 1, 1)) == 0);
}

TEST_CASE("G' is divisible by q-1, stair-steps with deg t_n, and tracks G up to a constant") {
    const FieldSpec F = FieldSpec::from_q(3);
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const LaurentNumber alpha = LaurentNumber::sample(F, 80, 200 + seed);
        const IsotropicForm form = IsotropicForm::from_alpha(alpha);
        const CFExpansion cf = cf_expand(alpha, 30);
        const auto conv = convergents(cf);
        std::optional<std::int64_t> first_delta;
        for (std::int64_t R = 2; R <= 5; ++R) {
            const Thresholds th = Thresholds::make(-1, 1, R);
            const std::int64_t gp = count_Gprime(cf, th);
            CHECK(gp % 2 == 0);
            const std::int64_t delta = count_G_bruteforce(form, th) - gp;
            if (!first_delta) first_delta = delta;
            CHECK(delta == *first_delta);  // no growth with R
            CHECK(std::abs(delta) <= 2);
        }
        // G'(rho) = G'(|t_n|) for |t_n| <= rho < |t_{n+1}|.
        for (std::size_t n = 1; n + 1 < conv.size() && conv[n + 1].t.deg() < 40; ++n) {
            const std::int64_t base = count_Gprime(cf, Thresholds::make(-1, 1, conv[n].t.deg()));
            for (std::int64_t R = conv[n].t.deg(); R < conv[n + 1].t.deg(); ++R)
                CHECK(count_Gprime(cf, Thresholds::make(-1, 1, R)) == base);
        }
    }
    // [0; x, x, ...] never has deg b_{j+1} >= 2.
    const CFExpansion cfx = cf_periodic({Poly(F)}, {Poly::x(F)}, 50);
    for (std::int64_t R = 0; R < 45; ++R) CHECK(count_Gprime(cfx, Thresholds::make(-1, 1, R)) == 0);
    CHECK(code_of([&] { count_Gprime(cfx, Thresholds::make(-1, 1, 60)); }) == ErrorCode::TooShallow);
    // Rational alpha: finitely many convergents, count constant past the last one.
    const CFExpansion rat = parse_cf(F, "cf:[0;x^2,x^3]", 0);
    CHECK(count_Gprime(rat, Thresholds::make(-1, 1, 2)) == 2);
    CHECK(count_Gprime(rat, Thresholds::make(-1, 1, 5)) == 4);
    CHECK(count_Gprime(rat, Thresholds::make(-1, 1, 50)) == 4);
}

TEST_CASE("theorem report") {
    const FieldSpec F = FieldSpec::from_q(3);
    const Thresholds th = Thresholds::make(-1, 1, 2);
    const auto rows_x = theorem_report(cf_periodic({Poly(F)}, {Poly::x(F)}, 60), th, 50);
    REQUIRE_FALSE(rows_x.empty());
    for (const auto& r : rows_x) {
        CHECK(r.ratio == 0);
        CHECK(r.predicted_low == 0);
        CHECK(r.predicted_high == 0);
        CHECK(r.in_band());
    }
    // Periodic x^2: every b_{j+1} counts, ratio = 2n / (2(2n - 1)) -> 1/2 and the band
    // collapses to c * 1 / 2 = 1/2 (c = q^0).
    const auto rows_x2 = theorem_report(cf_periodic({Poly(F)}, {Poly::parse(F, "x^2")}, 60), th, 50);
    for (const auto& r : rows_x2) {
        CHECK(r.R == 2 * r.n);
        CHECK(r.countGprime == 2 * r.n);
        CHECK(r.measureH == Rational(2 * (2 * r.n - 1)));
        CHECK(r.predicted_low == Rational(1, 2));
        CHECK(r.predicted_high == Rational(1, 2));
        CHECK(r.stats_used.alpha_minus == r.stats_used.alpha_plus);
    }
    CHECK(code_of([&] { theorem_report(parse_cf(F, "cf:[0;x,x,x]", 0), th, 1); }) == ErrorCode::RationalInput);
    CHECK(theorem_report(parse_cf(F, "cf:[0;x,x^2,x]", 0), th, 2, true).size() == 1);
    CHECK(code_of([&] { theorem_report(cf_periodic({Poly(F)}, {Poly::x(F)}, 10), th, 9); }) == ErrorCode::TooShallow);
}

TEST_CASE("q-power literals") {
    CHECK(parse_q_power("q^-1") == -1);
    CHECK(parse_q_power("q^3") == 3);
    CHECK(parse_q_power("q^+2") == 2);
    auto pos_of = [](const char* text) -> std::size_t {
        try {
            parse_q_power(text);
        } catch (const ParseError& e) {
            return e.position();
        }
        FAIL("expected ParseError for " << text);
        return 0;
    };
    CHECK(pos_of("3^2") == 0);
    CHECK(pos_of("q^") == 2);
    CHECK(pos_of("q^2x") == 3);
}
