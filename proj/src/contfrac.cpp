#include "ffcf/contfrac.hpp"

#include <algorithm>

#include "contfrac_detail.hpp"

namespace ffcf {

std::vector<std::int64_t> CFExpansion::degrees() const {
    std::vector<std::int64_t> d;
    d.reserve(certified);
    for (std::size_t j = 0; j < certified; ++j) d.push_back(b[j].is_zero() ? -1 : b[j].deg());
    return d;
}

std::string CFExpansion::str() const {
    std::string out = "[";
    for (std::size_t j = 0; j < certified; ++j) {
        if (j == 1) out += ';';
        if (j > 1) out += ',';
        out += b[j].str();
    }
    return out + "]";
}

CFExpansion cf_expand_rational(const Poly& p, const Poly& q) {
    require_same_field(p.field(), q.field());
    if (q.is_zero()) throw Error(ErrorCode::DivisionByZero, "continued fraction of P/0");
    CFExpansion cf{p.field(), {}, 0, true, "rat:" + p.str() + "/" + q.str()};
    Poly a = p, c = q;
    while (true) {
        auto [quo, rem] = divmod(a, c);
        cf.b.push_back(std::move(quo));
        if (rem.is_zero()) break;
        a = std::move(c);
        c = std::move(rem);
    }
    cf.certified = cf.b.size();
    return cf;
}

CFExpansion cf_expand(const LaurentNumber& alpha, std::size_t max_n) {
    const auto& F = alpha.field();
    if (alpha.backing()) {
        CFExpansion cf = cf_expand_rational(alpha.backing()->num, alpha.backing()->den);
        if (cf.b.size() > max_n + 1) {
            cf.b.erase(cf.b.begin() + static_cast<std::ptrdiff_t>(max_n + 1), cf.b.end());
            cf.terminated = false;
        }
        cf.certified = cf.b.size();
        cf.source = alpha.str();
        return cf;
    }
    if (alpha.exact_tail()) {
        // Exact values without a backing are only zero.
        return CFExpansion{F, {Poly(F)}, 1, true, "0"};
    }
    const std::int64_t h = *alpha.horizon();
    const std::int64_t nu = alpha.valuation();
    // Truncation T = sum_{j=nu}^{h-1} a_j X^{-j} = num / X^L with L = max(h-1, 0).
    const std::int64_t last = h - 1;
    const std::int64_t shift = std::max<std::int64_t>(last, 0);
    std::vector<Elem> num(static_cast<std::size_t>(shift - nu + 1), 0);
    for (std::int64_t j = nu; j < h; ++j) num[static_cast<std::size_t>(shift - j)] = alpha.window()[static_cast<std::size_t>(j - nu)];
    Poly a(F, std::move(num));
    Poly c = Poly::monomial(F, 1, static_cast<std::size_t>(shift));

    CFExpansion cf{F, {}, 0, false, alpha.str()};
    std::int64_t deg_t = 0;
    while (cf.b.size() <= max_n) {
        auto [quo, rem] = divmod(a, c);
        if (!cf.b.empty()) deg_t += quo.deg();
        const bool ok = 2 * deg_t < h;
        cf.b.push_back(std::move(quo));
        if (!ok) break;
        cf.certified = cf.b.size();
        if (rem.is_zero()) break;
        a = std::move(c);
        c = std::move(rem);
    }
    return cf;
}

CFExpansion cf_expand_complete_quotients(const LaurentNumber& alpha, std::size_t max_n) {
    const auto& F = alpha.field();
    CFExpansion cf{F, {}, 0, false, alpha.str()};
    LaurentNumber a = alpha;
    while (cf.b.size() <= max_n) {
        Poly b(F);
        try {
            b = a.floor();
        } catch (const Error& e) {
            if (e.code() != ErrorCode::PrecisionExhausted) throw;
            break;
        }
        cf.b.push_back(b);
        cf.certified = cf.b.size();
        if (cf.b.size() > max_n) break;
        try {
            LaurentNumber frac = a - LaurentNumber::from_poly(b);
            if (frac.is_zero()) {
                cf.terminated = true;
                break;
            }
            a = frac.inv();
        } catch (const Error& e) {
            if (e.code() != ErrorCode::PrecisionExhausted) throw;
            break;
        }
    }
    return cf;
}

CFExpansion cf_periodic(const std::vector<Poly>& pre, const std::vector<Poly>& period, std::size_t n) {
    if (period.empty()) throw Error(ErrorCode::InvalidArgument, "period must be nonempty");
    const FieldSpec& F = period.front().field();
    CFExpansion cf{F, {}, 0, false, {}};
    auto check = [&](const Poly& b, std::size_t j) {
        require_same_field(F, b.field());
        if (j >= 1 && (b.is_zero() || b.deg() < 1))
            throw Error(ErrorCode::DegreeViolation,
                        "partial quotient b_" + std::to_string(j) + " = " + b.str() + " has degree < 1");
    };
    for (std::size_t j = 0; j < pre.size(); ++j) check(pre[j], j);
    // Every period entry recurs at some index >= 1.
    for (std::size_t k = 0; k < period.size(); ++k) check(period[k], pre.size() + k + period.size());
    cf.b.reserve(n);
    for (std::size_t j = 0; j < n; ++j)
        cf.b.push_back(j < pre.size() ? pre[j] : period[(j - pre.size()) % period.size()]);
    cf.certified = n;
    std::string src = "cfper:[";
    for (std::size_t j = 0; j < pre.size(); ++j) src += (j ? "," : "") + pre[j].str();
    src += "|";
    for (std::size_t k = 0; k < period.size(); ++k) src += (k ? "," : "") + period[k].str();
    cf.source = src + "]";
    return cf;
}

std::vector<Convergent> convergents(const CFExpansion& cf) {
    const auto& F = cf.field;
    std::vector<Convergent> out;
    out.reserve(cf.certified);
    Poly s2(F), s1 = Poly::constant(F, 1);  // s_{-2}, s_{-1}
    Poly t2 = Poly::constant(F, 1), t1(F);  // t_{-2}, t_{-1}
    for (std::size_t n = 0; n < cf.certified; ++n) {
        Poly s = cf.b[n] * s1 + s2;
        Poly t = cf.b[n] * t1 + t2;
        out.push_back({n, s, t});
        s2 = std::move(s1);
        s1 = std::move(s);
        t2 = std::move(t1);
        t1 = std::move(t);
    }
    return out;
}

LaurentNumber approx_from_cf(const CFExpansion& cf, std::int64_t precision) {
    if (precision < 1) throw Error(ErrorCode::InvalidArgument, "precision must be >= 1");
    if (cf.certified == 0) throw Error(ErrorCode::InsufficientQuotients, "no certified partial quotients");
    const auto conv = convergents(cf);
    const auto& last = conv.back();
    if (cf.terminated && cf.certified == cf.b.size())
        return LaurentNumber::from_rational(last.s, last.t, precision);
    // Coefficients with index < 2 deg t_M + 1 are those of the limit.
    const std::int64_t h = 2 * last.t.deg() + 1;
    if (last.s.is_zero())
        throw Error(ErrorCode::InsufficientQuotients, "valuation of the limit is not yet determined");
    const std::int64_t nu = last.t.deg() - last.s.deg();
    if (nu + precision > h)
        throw Error(ErrorCode::InsufficientQuotients,
                    "quotients pin " + std::to_string(std::max<std::int64_t>(h - nu, 0)) +
                        " coefficients, requested " + std::to_string(precision));
    return LaurentNumber::from_rational(last.s, last.t, precision).truncated(precision);
}

bool IdentityRow::all() const noexcept {
    return recurrence && determinant.value_or(true) && degree_sum && error_by_quotient.value_or(true) &&
           error_by_denominators.value_or(true) && convergent_test && coprime;
}

IdentityReport verify_identities(const CFExpansion& cf, const LaurentNumber& alpha) {
    require_same_field(cf.field, alpha.field());
    const auto& F = cf.field;
    const auto conv = convergents(cf);
    IdentityReport rep;
    std::int64_t deg_sum = 0;
    for (std::size_t n = 0; n < conv.size(); ++n) {
        IdentityRow row;
        row.n = n;
        const Poly& s = conv[n].s;
        const Poly& t = conv[n].t;
        const Poly s1 = n >= 1 ? conv[n - 1].s : Poly::constant(F, 1);
        const Poly t1 = n >= 1 ? conv[n - 1].t : Poly(F);
        const Poly s2 = n >= 2 ? conv[n - 2].s : (n == 1 ? Poly::constant(F, 1) : Poly(F));
        const Poly t2 = n >= 2 ? conv[n - 2].t : (n == 1 ? Poly(F) : Poly::constant(F, 1));
        row.recurrence = s == cf.b[n] * s1 + s2 && t == cf.b[n] * t1 + t2;
        if (n + 1 < conv.size()) {
            const Poly det = conv[n + 1].s * t - s * conv[n + 1].t;
            row.determinant = det == Poly::constant(F, F.from_int(n % 2 == 0 ? 1 : -1));
        }
        if (n >= 1) deg_sum += cf.b[n].deg();
        row.degree_sum = !t.is_zero() && t.deg() == deg_sum;
        row.coprime = coprime(s, t);

        const LinearAbs lin = abs_linear(alpha, t, s);
        const std::int64_t dt = t.deg();
        if (!lin.resolved) {
            // Only the convergent-test comparison can be settled from a bound.
            if (lin.below >= -dt)
                throw Error(ErrorCode::PrecisionExhausted, "alpha too short to check index " + std::to_string(n));
            row.convergent_test = true;
        } else {
            const AbsExp err = lin.exp - dt;  // |alpha - s_n/t_n|
            row.convergent_test = err < AbsExp(-2 * dt);
            if (n + 1 < conv.size()) {
                const std::int64_t db = cf.b[n + 1].deg();
                row.error_by_quotient = err == AbsExp(-(db + 2 * dt));
                row.error_by_denominators = err == AbsExp(-(conv[n + 1].t.deg() + dt));
            }
        }
        rep.all_pass = rep.all_pass && row.all();
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

bool is_convergent(const LaurentNumber& alpha, const Poly& s, const Poly& t) {
    if (t.is_zero()) throw Error(ErrorCode::InvalidArgument, "is_convergent needs t != 0");
    const std::int64_t dt = t.deg();
    const LinearAbs lin = abs_linear(alpha, t, s);
    // |alpha - s/t| < |t|^-2  <=>  |t alpha - s| < |t|^-1
    if (lin.resolved) return lin.exp < AbsExp(-dt);
    if (lin.below < -dt) return true;
    throw Error(ErrorCode::PrecisionExhausted, "alpha too short to decide |alpha - s/t| < 1/|t|^2");
}

namespace detail {

StatsPrefix stats_prefix(const std::vector<std::int64_t>& deg, std::int64_t threshold) {
    StatsPrefix p;
    const std::size_t L = deg.size();  // deg[0] is b_0 and unused
    p.sum.assign(L, 0);
    p.literal.assign(L, 0);
    p.strict.assign(L, 0);
    p.literal_proof.assign(L, 0);
    p.strict_proof.assign(L, 0);
    for (std::size_t k = 1; k < L; ++k) {
        p.sum[k] = p.sum[k - 1] + deg[k];
        p.literal_proof[k] = p.literal_proof[k - 1] + (deg[k] >= threshold);
        p.strict_proof[k] = p.strict_proof[k - 1] + (deg[k] >= threshold + 1);
        if (k + 1 < L) {
            p.literal[k] = p.literal[k - 1] + (deg[k + 1] >= threshold);
            p.strict[k] = p.strict[k - 1] + (deg[k + 1] >= threshold + 1);
        }
    }
    return p;
}

namespace {

struct Extremes {
    std::int64_t min_num, min_den, max_num, max_den;
};

// min/max of v[k]/k over k in [ceil(n/2), n]; exact via cross-multiplication.
Extremes window_extremes(const std::vector<std::int64_t>& v, std::int64_t n) {
    const std::int64_t lo = std::max<std::int64_t>(1, (n + 1) / 2);
    Extremes e{v[static_cast<std::size_t>(n)], n, v[static_cast<std::size_t>(n)], n};
    for (std::int64_t k = lo; k < n; ++k) {
        const std::int64_t x = v[static_cast<std::size_t>(k)];
        if (x * e.min_den < e.min_num * k) e.min_num = x, e.min_den = k;
        if (x * e.max_den > e.max_num * k) e.max_num = x, e.max_den = k;
    }
    return e;
}

}  // namespace

CFStats stats_at(const StatsPrefix& p, std::int64_t n, std::int64_t threshold, bool with_sums) {
    CFStats st;
    st.n = n;
    st.threshold = threshold;
    const auto N = static_cast<std::size_t>(n);
    if (with_sums) st.degree_sums.assign(p.sum.begin(), p.sum.begin() + static_cast<std::ptrdiff_t>(N + 2));
    st.alpha_hat = Rational(p.sum[N], n);
    const auto a = window_extremes(p.sum, n);
    st.alpha_minus = Rational(a.min_num, a.min_den);
    st.alpha_plus = Rational(a.max_num, a.max_den);
    st.count_literal = p.literal[N];
    st.count_strict = p.strict[N];
    st.count_literal_proof = p.literal_proof[N];
    st.count_strict_proof = p.strict_proof[N];
    st.freq_literal = Rational(st.count_literal, n);
    st.freq_strict = Rational(st.count_strict, n);
    const auto l = window_extremes(p.literal, n);
    st.e_hat_literal = Rational(l.min_num, l.min_den);
    st.f_hat_literal = Rational(l.max_num, l.max_den);
    const auto s = window_extremes(p.strict, n);
    st.e_hat_strict = Rational(s.min_num, s.min_den);
    st.f_hat_strict = Rational(s.max_num, s.max_den);
    return st;
}

}  // namespace detail

CFStats cf_stats(const CFExpansion& cf, std::int64_t threshold, std::optional<std::int64_t> n) {
    if (threshold < 1) throw Error(ErrorCode::InvalidArgument, "threshold exponent D must be >= 1");
    const auto deg = cf.degrees();
    const std::int64_t n_max = static_cast<std::int64_t>(deg.size()) - 2;
    if (n_max < 1) throw Error(ErrorCode::TooShallow, "statistics need certified b_1 and b_2");
    const std::int64_t depth = n.value_or(n_max);
    if (depth < 1 || depth > n_max)
        throw Error(ErrorCode::TooShallow,
                    "depth " + std::to_string(depth) + " needs b_" + std::to_string(depth + 1) + " certified");
    return detail::stats_at(detail::stats_prefix(deg, threshold), depth, threshold, true);
}

namespace {

std::vector<Poly> parse_poly_list(const FieldSpec& field, std::string_view text, std::size_t offset,
                                  std::vector<std::size_t>* positions = nullptr) {
    std::vector<Poly> out;
    if (text.find_first_not_of(" \t") == std::string_view::npos) return out;
    std::size_t start = 0;
    while (true) {
        const std::size_t end = text.find_first_of(",;", start);
        const std::string_view item = text.substr(start, end == std::string_view::npos ? end : end - start);
        try {
            out.push_back(Poly::parse(field, item));
        } catch (const ParseError& e) {
            throw ParseError(offset + start + e.position(), "bad partial quotient");
        }
        if (positions) positions->push_back(offset + start);
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return out;
}

}  // namespace

CFExpansion parse_cf(const FieldSpec& field, std::string_view text, std::size_t n) {
    const bool periodic = text.starts_with("cfper:");
    if (!periodic && !text.starts_with("cf:")) throw ParseError(0, "expected 'cf:' or 'cfper:' literal");
    const std::size_t open = periodic ? 6 : 3;
    if (open >= text.size() || text[open] != '[') throw ParseError(open, "expected '['");
    if (text.back() != ']') throw ParseError(text.size(), "expected closing ']'");
    const std::string_view body = text.substr(open + 1, text.size() - open - 2);
    const std::size_t base = open + 1;
    if (!periodic) {
        std::vector<std::size_t> pos;
        auto b = parse_poly_list(field, body, base, &pos);
        if (b.empty()) throw ParseError(base, "empty continued fraction");
        for (std::size_t j = 1; j < b.size(); ++j)
            if (b[j].is_zero() || b[j].deg() < 1) throw ParseError(pos[j], "partial quotient b_j (j >= 1) needs degree >= 1");
        CFExpansion cf{field, std::move(b), 0, true, std::string(text)};
        cf.certified = cf.b.size();
        return cf;
    }
    const std::size_t bar = body.find('|');
    if (bar == std::string_view::npos) throw ParseError(base + body.size(), "expected '|' in cfper literal");
    auto pre = parse_poly_list(field, body.substr(0, bar), base);
    auto period = parse_poly_list(field, body.substr(bar + 1), base + bar + 1);
    if (period.empty()) throw ParseError(base + bar + 1, "empty period");
    try {
        CFExpansion cf = cf_periodic(pre, period, n);
        cf.source = std::string(text);
        return cf;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::DegreeViolation) throw ParseError(base, e.what());
        throw;
    }
}

}  // namespace ffcf
