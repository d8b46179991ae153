#include "ffcf/laurent.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include "ffcf/rng.hpp"

namespace ffcf {

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

struct Expansion {
    std::int64_t nu = 0;
    std::vector<Elem> coeffs;
    bool exact = false;
};

// Long division of P/Q into `n` coefficients counted from the valuation.
Expansion expand_rational(const RationalFunction& r, std::int64_t n) {
    const auto& F = r.num.field();
    Expansion out;
    if (r.num.is_zero()) {
        out.exact = true;
        return out;
    }
    const std::int64_t dq = r.den.deg();
    out.nu = dq - r.num.deg();
    auto [poly_part, rem] = divmod(r.num, r.den);
    // Indices j <= 0 come from the polynomial part, highest degree first.
    if (!poly_part.is_zero())
        for (std::int64_t k = poly_part.deg(); k >= 0 && std::ssize(out.coeffs) < n; --k)
            out.coeffs.push_back(poly_part.coeff(static_cast<std::size_t>(k)));
    // Fractional part: r <- r*X, digit = lead / lead(Q), r <- r - digit*Q.
    std::vector<Elem> rv(static_cast<std::size_t>(dq), 0);
    for (std::size_t i = 0; i < rem.coeffs().size(); ++i) rv[i] = rem.coeffs()[i];
    const auto& qc = r.den.coeffs();
    const Elem lead_inv = F.inv(r.den.leading());
    bool rem_zero = rem.is_zero();
    std::int64_t j = 1;
    while (std::ssize(out.coeffs) < n && !rem_zero) {
        const Elem top = dq > 0 ? rv[static_cast<std::size_t>(dq - 1)] : 0;
        const Elem digit = F.mul(top, lead_inv);
        const Elem nd = F.neg(digit);
        for (std::int64_t i = dq - 1; i >= 1; --i)
            rv[static_cast<std::size_t>(i)] = F.add(rv[static_cast<std::size_t>(i - 1)], F.mul(nd, qc[static_cast<std::size_t>(i)]));
        if (dq > 0) rv[0] = F.mul(nd, qc[0]);
        if (j >= out.nu) out.coeffs.push_back(digit);
        rem_zero = std::all_of(rv.begin(), rv.end(), [](Elem e) { return e == 0; });
        ++j;
    }
    // A polynomial part longer than n is truncated, so the tail is not exact.
    const bool poly_complete = poly_part.is_zero() || std::ssize(out.coeffs) > poly_part.deg();
    out.exact = rem_zero && poly_complete;
    if (out.exact)
        while (!out.coeffs.empty() && out.coeffs.back() == 0) out.coeffs.pop_back();
    return out;
}

std::int64_t horizon_or_inf(const LaurentNumber& v) { return v.horizon().value_or(kInf); }

}  // namespace

RationalFunction RationalFunction::make(const Poly& num, const Poly& den) {
    require_same_field(num.field(), den.field());
    if (den.is_zero()) throw Error(ErrorCode::DivisionByZero, "rational function with zero denominator");
    if (num.is_zero()) return {num, Poly::constant(den.field(), 1)};
    const Poly g = gcd(num, den);
    Poly n = divmod(num, g).quotient;
    Poly d = divmod(den, g).quotient;
    const Elem li = d.field().inv(d.leading());
    return {n.scaled(li), d.scaled(li)};
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    return RationalFunction::make(a.num * b.den + b.num * a.den, a.den * b.den);
}
RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
    return RationalFunction::make(a.num * b.den - b.num * a.den, a.den * b.den);
}
RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    return RationalFunction::make(a.num * b.num, a.den * b.den);
}
RationalFunction inverse(const RationalFunction& a) {
    if (a.is_zero()) throw Error(ErrorCode::DivisionByZero, "inverse of zero");
    return RationalFunction::make(a.den, a.num);
}

LaurentNumber::LaurentNumber(FieldSpec field) : field_(std::move(field)) {}

LaurentNumber::LaurentNumber(FieldSpec field, std::int64_t nu, std::vector<Elem> coeffs, bool exact,
                             std::optional<RationalFunction> backing)
    : field_(std::move(field)), nu_(nu), c_(std::move(coeffs)), exact_(exact), backing_(std::move(backing)) {
    auto first = std::find_if(c_.begin(), c_.end(), [](Elem e) { return e != 0; });
    nu_ += std::distance(c_.begin(), first);
    c_.erase(c_.begin(), first);
    if (exact_)
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    if (c_.empty()) {
        if (!exact_)
            throw Error(ErrorCode::PrecisionExhausted, "no nonzero coefficient inside the known window");
        nu_ = 0;
    }
}

LaurentNumber LaurentNumber::from_rational(const RationalFunction& r, std::int64_t precision) {
    if (precision < 1) throw Error(ErrorCode::InvalidArgument, "precision must be >= 1");
    Expansion e = expand_rational(r, precision);
    return LaurentNumber(r.num.field(), e.nu, std::move(e.coeffs), e.exact, r);
}

LaurentNumber LaurentNumber::from_rational(const Poly& p, const Poly& q, std::int64_t precision) {
    return from_rational(RationalFunction::make(p, q), precision);
}

LaurentNumber LaurentNumber::from_poly(const Poly& p) {
    const auto& F = p.field();
    if (p.is_zero()) return LaurentNumber(F);
    std::vector<Elem> c(p.coeffs().rbegin(), p.coeffs().rend());
    return LaurentNumber(F, -p.deg(), std::move(c), true, RationalFunction{p, Poly::constant(F, 1)});
}

LaurentNumber LaurentNumber::from_window(const FieldSpec& field, std::int64_t start, std::vector<Elem> coeffs,
                                         bool exact) {
    for (Elem e : coeffs)
        if (e >= field.q()) throw Error(ErrorCode::InvalidArgument, "coefficient out of range");
    std::optional<RationalFunction> backing;
    if (exact) {
        // sum a_j X^{-j} over the window, as num / X^{last} (or a polynomial).
        const std::int64_t last = start + std::ssize(coeffs) - 1;
        const std::int64_t shift = std::max<std::int64_t>(last, 0);
        std::vector<Elem> num(static_cast<std::size_t>(std::max<std::int64_t>(shift - start + 1, 0)), 0);
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            const std::int64_t j = start + static_cast<std::int64_t>(i);
            num[static_cast<std::size_t>(shift - j)] = coeffs[i];
        }
        backing = RationalFunction::make(Poly(field, std::move(num)),
                                         Poly::monomial(field, 1, static_cast<std::size_t>(shift)));
    }
    return LaurentNumber(field, start, std::move(coeffs), exact, std::move(backing));
}

LaurentNumber LaurentNumber::sample(const FieldSpec& field, std::int64_t depth, std::uint64_t seed) {
    if (depth < 1) throw Error(ErrorCode::InvalidArgument, "sample depth must be >= 1");
    Xoshiro256 rng(seed);
    std::vector<Elem> c(static_cast<std::size_t>(depth));
    for (auto& e : c) e = static_cast<Elem>(rng.below(field.q()));
    return from_window(field, 1, std::move(c), false);
}

std::int64_t LaurentNumber::valuation() const {
    if (is_zero()) throw Error(ErrorCode::InvalidArgument, "valuation of zero is +infinity");
    return nu_;
}

AbsExp LaurentNumber::abs() const { return is_zero() ? AbsExp::neg_inf() : AbsExp(-nu_); }

std::optional<std::int64_t> LaurentNumber::horizon() const noexcept {
    if (exact_) return std::nullopt;
    return nu_ + std::ssize(c_);
}

Elem LaurentNumber::coeff(std::int64_t j) const {
    if (is_zero() || j < nu_) return 0;
    const std::int64_t off = j - nu_;
    if (off < std::ssize(c_)) return c_[static_cast<std::size_t>(off)];
    if (exact_) return 0;
    if (backing_) return refined(std::max<std::int64_t>(2 * known(), off + 1)).coeff(j);
    throw Error(ErrorCode::PrecisionExhausted,
                "coefficient of X^" + std::to_string(-j) + " lies past the known window");
}

Poly LaurentNumber::floor() const {
    if (is_zero() || nu_ >= 1) return Poly(field_);
    if (!exact_ && horizon_or_inf(*this) < 1) {
        if (backing_) return refined(1 - nu_).floor();
        throw Error(ErrorCode::PrecisionExhausted, "floor needs every coefficient with index <= 0");
    }
    std::vector<Elem> p(static_cast<std::size_t>(-nu_ + 1), 0);
    for (std::int64_t j = nu_; j <= 0; ++j) p[static_cast<std::size_t>(-j)] = coeff(j);
    return Poly(field_, std::move(p));
}

LaurentNumber LaurentNumber::refined(std::int64_t precision) const {
    if (exact_) return *this;
    if (!backing_) throw Error(ErrorCode::PrecisionExhausted, "value has no backing to refine from");
    return from_rational(*backing_, std::max(precision, known()));
}

LaurentNumber LaurentNumber::truncated(std::int64_t precision) const {
    if (precision < 1) throw Error(ErrorCode::InvalidArgument, "precision must be >= 1");
    if (is_zero()) throw Error(ErrorCode::PrecisionExhausted, "truncating zero leaves no known coefficient");
    std::vector<Elem> c;
    c.reserve(static_cast<std::size_t>(precision));
    for (std::int64_t k = 0; k < precision; ++k) {
        if (!exact_ && k >= known()) break;
        c.push_back(k < known() ? c_[static_cast<std::size_t>(k)] : 0);
    }
    return LaurentNumber(field_, nu_, std::move(c), false, std::nullopt);
}

LaurentNumber LaurentNumber::without_backing() const {
    if (exact_) return *this;
    return LaurentNumber(field_, nu_, c_, false, std::nullopt);
}

LaurentNumber LaurentNumber::operator-() const {
    std::vector<Elem> c(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) c[i] = field_.neg(c_[i]);
    std::optional<RationalFunction> b;
    if (backing_) b = RationalFunction{-backing_->num, backing_->den};
    LaurentNumber out(field_);
    out.nu_ = nu_;
    out.c_ = std::move(c);
    out.exact_ = exact_;
    out.backing_ = std::move(b);
    return out;
}

LaurentNumber LaurentNumber::combine(const LaurentNumber& u, const LaurentNumber& v, bool subtract) {
    require_same_field(u.field_, v.field_);
    const auto& F = u.field_;
    std::optional<RationalFunction> backing;
    if (u.backing_ && v.backing_) backing = subtract ? *u.backing_ - *v.backing_ : *u.backing_ + *v.backing_;
    if (u.is_zero()) return subtract ? -v : v;
    if (v.is_zero()) return u;

    const std::int64_t h = std::min(horizon_or_inf(u), horizon_or_inf(v));
    const std::int64_t lo = std::min(u.nu_, v.nu_);
    std::int64_t hi = h;
    if (h >= kInf) hi = std::max(u.nu_ + u.known(), v.nu_ + v.known());
    std::vector<Elem> c;
    if (hi > lo) {
        c.resize(static_cast<std::size_t>(hi - lo));
        for (std::int64_t j = lo; j < hi; ++j) {
            const Elem a = j >= u.nu_ && j - u.nu_ < u.known() ? u.c_[static_cast<std::size_t>(j - u.nu_)] : 0;
            const Elem b = j >= v.nu_ && j - v.nu_ < v.known() ? v.c_[static_cast<std::size_t>(j - v.nu_)] : 0;
            c[static_cast<std::size_t>(j - lo)] = subtract ? F.sub(a, b) : F.add(a, b);
        }
    }
    const bool exact = h >= kInf;
    const bool any = std::any_of(c.begin(), c.end(), [](Elem e) { return e != 0; });
    if (!any && !exact) {
        if (!backing)
            throw Error(ErrorCode::PrecisionExhausted, "sum cancels every known coefficient");
        if (backing->is_zero()) return LaurentNumber(F);
        const std::int64_t nu = backing->den.deg() - backing->num.deg();
        return from_rational(*backing, std::max<std::int64_t>(1, h - nu));
    }
    return LaurentNumber(F, lo, std::move(c), exact, std::move(backing));
}

LaurentNumber operator+(const LaurentNumber& u, const LaurentNumber& v) { return LaurentNumber::combine(u, v, false); }
LaurentNumber operator-(const LaurentNumber& u, const LaurentNumber& v) { return LaurentNumber::combine(u, v, true); }

LaurentNumber operator*(const LaurentNumber& u, const LaurentNumber& v) {
    require_same_field(u.field_, v.field_);
    const auto& F = u.field_;
    if (u.is_zero() || v.is_zero()) return LaurentNumber(F);
    std::optional<RationalFunction> backing;
    if (u.backing_ && v.backing_) backing = *u.backing_ * *v.backing_;
    const bool exact = u.exact_ && v.exact_;
    const std::int64_t nu = u.nu_ + v.nu_;
    std::int64_t n;
    if (exact)
        n = u.known() + v.known() - 1;
    else
        n = std::min(u.exact_ ? kInf : u.known(), v.exact_ ? kInf : v.known());
    std::vector<Elem> c(static_cast<std::size_t>(n), 0);
    for (std::int64_t i = 0; i < std::min(n, u.known()); ++i) {
        const Elem a = u.c_[static_cast<std::size_t>(i)];
        if (a == 0) continue;
        const std::int64_t jmax = std::min(n - i, v.known());
        for (std::int64_t j = 0; j < jmax; ++j)
            c[static_cast<std::size_t>(i + j)] =
                F.add(c[static_cast<std::size_t>(i + j)], F.mul(a, v.c_[static_cast<std::size_t>(j)]));
    }
    return LaurentNumber(F, nu, std::move(c), exact, std::move(backing));
}

LaurentNumber LaurentNumber::inv() const {
    if (is_zero()) throw Error(ErrorCode::DivisionByZero, "inverse of zero in K");
    const auto& F = field_;
    if (exact_ && c_.size() == 1) {
        return from_window(F, -nu_, {F.inv(c_[0])}, true);
    }
    if (backing_) {
        const std::int64_t n = exact_ ? std::max(known(), kDefaultPrecision) : known();
        return from_rational(inverse(*backing_), n);
    }
    // Unit part c0 (1 + w): v_0 = 1/c0, v_k = -(1/c0) sum_{i=1}^{k} c_i v_{k-i}.
    const std::size_t n = c_.size();
    std::vector<Elem> out(n, 0);
    const Elem c0i = F.inv(c_[0]);
    out[0] = c0i;
    for (std::size_t k = 1; k < n; ++k) {
        Elem acc = 0;
        for (std::size_t i = 1; i <= k; ++i) acc = F.add(acc, F.mul(c_[i], out[k - i]));
        out[k] = F.neg(F.mul(c0i, acc));
    }
    return LaurentNumber(F, -nu_, std::move(out), false, std::nullopt);
}

LaurentNumber operator/(const LaurentNumber& u, const LaurentNumber& v) { return u * v.inv(); }

bool LaurentNumber::agrees_with(const LaurentNumber& other) const {
    require_same_field(field_, other.field_);
    const std::int64_t h = std::min(horizon_or_inf(*this), horizon_or_inf(other));
    std::int64_t lo = std::min(is_zero() ? kInf : nu_, other.is_zero() ? kInf : other.nu_);
    if (lo >= kInf) return true;
    std::int64_t hi = h;
    if (hi >= kInf) hi = std::max(nu_ + known(), other.nu_ + other.known());
    for (std::int64_t j = lo; j < hi; ++j) {
        const auto at = [j](const LaurentNumber& x) -> Elem {
            if (x.is_zero() || j < x.nu_ || j - x.nu_ >= x.known()) return 0;
            return x.c_[static_cast<std::size_t>(j - x.nu_)];
        };
        if (at(*this) != at(other)) return false;
    }
    return true;
}

std::string LaurentNumber::str() const {
    if (is_zero()) return "0";
    std::string out;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        const Elem a = c_[i];
        if (a == 0) continue;
        const std::int64_t power = -(nu_ + static_cast<std::int64_t>(i));
        if (!out.empty()) out += '+';
        if (power == 0) {
            out += std::to_string(a);
            continue;
        }
        if (a != 1) out += std::to_string(a) + "*";
        out += "X";
        if (power != 1) out += "^" + std::to_string(power);
    }
    if (!exact_) out += "+O(X^" + std::to_string(-(nu_ + known())) + ")";
    return out;
}

LinearAbs abs_linear(const LaurentNumber& alpha, const Poly& t, const Poly& s) {
    require_same_field(alpha.field(), t.field());
    require_same_field(alpha.field(), s.field());
    const auto& F = alpha.field();
    LinearAbs out;
    if (t.is_zero() || alpha.is_zero()) {
        out.resolved = true;
        out.exp = s.degree();
        return out;
    }
    LaurentNumber a = alpha;
    const std::int64_t dt = t.deg();
    while (true) {
        const std::int64_t h = horizon_or_inf(a);
        const std::int64_t nu = a.valuation();
        // Coefficient of X^{-j} in t*alpha is sum_k t_k a_{j+k}; known iff j + dt < h.
        std::int64_t j = std::min(nu - dt, s.is_zero() ? kInf : -s.deg());
        const std::int64_t last_nonzero = a.exact_tail() ? nu + a.known() - 1 : kInf;
        const std::int64_t stop = std::min(h - dt, std::max<std::int64_t>(last_nonzero, 0) + 1);
        for (; j < stop; ++j) {
            Elem c = 0;
            for (std::int64_t k = 0; k <= dt; ++k) {
                const Elem tk = t.coeff(static_cast<std::size_t>(k));
                if (tk == 0) continue;
                const std::int64_t idx = j + k;
                if (idx < nu || idx - nu >= a.known()) continue;
                c = F.add(c, F.mul(tk, a.window()[static_cast<std::size_t>(idx - nu)]));
            }
            if (j <= 0) c = F.sub(c, s.coeff(static_cast<std::size_t>(-j)));
            if (c != 0) {
                out.resolved = true;
                out.exp = AbsExp(-j);
                return out;
            }
        }
        if (a.exact_tail()) {
            out.resolved = true;
            out.exp = AbsExp::neg_inf();
            return out;
        }
        if (a.backing()) {
            const auto& b = *a.backing();
            if ((t * b.num - s * b.den).is_zero()) {
                out.resolved = true;
                out.exp = AbsExp::neg_inf();
                return out;
            }
            a = a.refined(2 * a.known() + dt + 2);
            continue;
        }
        out.resolved = false;
        out.below = -(h - dt);
        return out;
    }
}

namespace {

std::int64_t parse_int(std::string_view s, std::size_t& pos, std::size_t base_offset) {
    const std::size_t start = pos;
    bool neg = false;
    if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) {
        neg = s[pos] == '-';
        ++pos;
    }
    std::int64_t v = 0;
    const std::size_t digits = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        v = v * 10 + (s[pos] - '0');
        if (v > (std::int64_t{1} << 40)) throw ParseError(base_offset + start, "integer too large");
        ++pos;
    }
    if (pos == digits) throw ParseError(base_offset + start, "expected an integer");
    return neg ? -v : v;
}

}  // namespace

LaurentNumber parse_laurent(const FieldSpec& field, std::string_view text, std::int64_t precision) {
    if (text.starts_with("rat:")) {
        const std::size_t slash = text.find('/');
        if (slash == std::string_view::npos) throw ParseError(text.size(), "expected '/' in rat: literal");
        Poly num(field), den(field);
        try {
            num = Poly::parse(field, text.substr(4, slash - 4));
        } catch (const ParseError& e) {
            throw ParseError(4 + e.position(), "bad numerator");
        }
        try {
            den = Poly::parse(field, text.substr(slash + 1));
        } catch (const ParseError& e) {
            throw ParseError(slash + 1 + e.position(), "bad denominator");
        }
        if (den.is_zero()) throw ParseError(slash + 1, "zero denominator");
        return LaurentNumber::from_rational(num, den, precision);
    }
    if (text.starts_with("coeffs:")) {
        std::size_t pos = 7;
        const std::int64_t start = parse_int(text, pos, 0);
        if (pos >= text.size() || text[pos] != ':') throw ParseError(pos, "expected ':' after start index");
        ++pos;
        std::vector<Elem> c;
        while (true) {
            const std::size_t at = pos;
            const std::int64_t v = parse_int(text, pos, 0);
            if (v < 0 || v >= field.q()) throw ParseError(at, "element literal not in [0, q-1]");
            c.push_back(static_cast<Elem>(v));
            if (pos >= text.size()) break;
            if (text[pos] != ',') throw ParseError(pos, "expected ','");
            ++pos;
        }
        try {
            return LaurentNumber::from_window(field, start, std::move(c), false);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::PrecisionExhausted) throw ParseError(7, "window has no nonzero coefficient");
            throw;
        }
    }
    throw ParseError(0, "expected 'rat:' or 'coeffs:' literal");
}

}  // namespace ffcf
