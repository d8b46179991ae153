#include "ffcf/poly.hpp"

#include <cctype>

namespace ffcf {

Poly::Poly(FieldSpec field, std::vector<Elem> coeffs) : field_(std::move(field)), c_(std::move(coeffs)) {
    for (Elem c : c_)
        if (c >= field_.q()) throw Error(ErrorCode::InvalidArgument, "coefficient out of range");
    trim();
}

void Poly::trim() noexcept {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Poly Poly::constant(const FieldSpec& field, Elem c) { return Poly(field, {c}); }

Poly Poly::monomial(const FieldSpec& field, Elem c, std::size_t k) {
    std::vector<Elem> v(k + 1, 0);
    v[k] = c;
    return Poly(field, std::move(v));
}

Poly Poly::monic() const {
    if (is_zero()) return *this;
    return scaled(field_.inv(leading()));
}

Poly Poly::scaled(Elem c) const {
    Poly out(field_);
    if (c == 0) return out;
    out.c_.resize(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) out.c_[i] = field_.mul(c_[i], c);
    return out;
}

Poly Poly::shifted(std::size_t k) const {
    if (is_zero()) return *this;
    Poly out(field_);
    out.c_.assign(k, 0);
    out.c_.insert(out.c_.end(), c_.begin(), c_.end());
    return out;
}

Poly operator+(const Poly& f, const Poly& g) {
    require_same_field(f.field_, g.field_);
    const auto& F = f.field_;
    Poly out(F);
    out.c_.resize(std::max(f.c_.size(), g.c_.size()));
    for (std::size_t i = 0; i < out.c_.size(); ++i) out.c_[i] = F.add(f.coeff(i), g.coeff(i));
    out.trim();
    return out;
}

Poly operator-(const Poly& f, const Poly& g) {
    require_same_field(f.field_, g.field_);
    const auto& F = f.field_;
    Poly out(F);
    out.c_.resize(std::max(f.c_.size(), g.c_.size()));
    for (std::size_t i = 0; i < out.c_.size(); ++i) out.c_[i] = F.sub(f.coeff(i), g.coeff(i));
    out.trim();
    return out;
}

Poly Poly::operator-() const {
    Poly out(field_);
    out.c_.resize(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) out.c_[i] = field_.neg(c_[i]);
    return out;
}

Poly operator*(const Poly& f, const Poly& g) {
    require_same_field(f.field_, g.field_);
    const auto& F = f.field_;
    Poly out(F);
    if (f.is_zero() || g.is_zero()) return out;
    out.c_.assign(f.c_.size() + g.c_.size() - 1, 0);
    if (F.r() == 1) {
        // Accumulate in 64 bits and reduce once per output coefficient.
        const std::uint64_t p = F.p();
        std::vector<std::uint64_t> acc(out.c_.size(), 0);
        for (std::size_t i = 0; i < f.c_.size(); ++i) {
            const std::uint64_t a = f.c_[i];
            if (a == 0) continue;
            for (std::size_t j = 0; j < g.c_.size(); ++j) acc[i + j] += a * g.c_[j];
            if ((i & 0xffff) == 0xffff)
                for (auto& v : acc) v %= p;
        }
        for (std::size_t k = 0; k < acc.size(); ++k) out.c_[k] = static_cast<Elem>(acc[k] % p);
    } else {
        for (std::size_t i = 0; i < f.c_.size(); ++i) {
            if (f.c_[i] == 0) continue;
            for (std::size_t j = 0; j < g.c_.size(); ++j)
                out.c_[i + j] = F.add(out.c_[i + j], F.mul(f.c_[i], g.c_[j]));
        }
    }
    out.trim();
    return out;
}

std::string Poly::str() const {
    if (is_zero()) return "0";
    std::string out;
    for (std::size_t i = c_.size(); i-- > 0;) {
        const Elem c = c_[i];
        if (c == 0) continue;
        if (!out.empty()) out += '+';
        if (i == 0) {
            out += std::to_string(c);
            continue;
        }
        if (c != 1) out += std::to_string(c) + "*";
        out += 'x';
        if (i > 1) out += '^' + std::to_string(i);
    }
    return out;
}

namespace {

class PolyParser {
public:
    PolyParser(const FieldSpec& field, std::string_view text) : field_(field), s_(text) {}

    Poly run() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError(pos_, "empty polynomial");
        std::vector<Elem> acc;
        bool first = true;
        while (true) {
            skip_ws();
            bool negate = false;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
                if (first && s_[pos_] == '+') throw ParseError(pos_, "unexpected '+'");
                negate = s_[pos_] == '-';
                ++pos_;
                skip_ws();
            } else if (!first) {
                throw ParseError(pos_, "expected '+' between terms");
            }
            auto [c, k] = term();
            if (negate) c = field_.neg(c);
            if (acc.size() <= k) acc.resize(k + 1, 0);
            acc[k] = field_.add(acc[k], c);
            first = false;
            skip_ws();
            if (pos_ >= s_.size()) break;
        }
        return Poly(field_, std::move(acc));
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    std::uint64_t number() {
        const std::size_t start = pos_;
        std::uint64_t v = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            v = v * 10 + static_cast<std::uint64_t>(s_[pos_] - '0');
            if (v > (1ull << 40)) throw ParseError(start, "number too large");
            ++pos_;
        }
        if (pos_ == start) throw ParseError(pos_, "expected a number");
        return v;
    }

    std::pair<Elem, std::size_t> term() {
        Elem c = 1;
        bool have_coeff = false;
        if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            const std::size_t at = pos_;
            const std::uint64_t v = number();
            if (v >= field_.q())
                throw ParseError(at, "element literal " + std::to_string(v) + " not in [0, q-1]");
            c = static_cast<Elem>(v);
            have_coeff = true;
            skip_ws();
            if (pos_ < s_.size() && s_[pos_] == '*') {
                ++pos_;
                skip_ws();
            } else {
                return {c, 0};
            }
        }
        if (pos_ >= s_.size() || (s_[pos_] != 'x' && s_[pos_] != 'X'))
            throw ParseError(pos_, have_coeff ? "expected 'x' after '*'" : "expected a term");
        ++pos_;
        skip_ws();
        std::size_t k = 1;
        if (pos_ < s_.size() && s_[pos_] == '^') {
            ++pos_;
            skip_ws();
            const std::size_t at = pos_;
            const std::uint64_t e = number();
            if (e > (1u << 24)) throw ParseError(at, "exponent too large");
            k = static_cast<std::size_t>(e);
        }
        return {c, k};
    }

    const FieldSpec& field_;
    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

Poly Poly::parse(const FieldSpec& field, std::string_view text) { return PolyParser(field, text).run(); }

DivMod divmod(const Poly& f, const Poly& g) {
    require_same_field(f.field(), g.field());
    if (g.is_zero()) throw Error(ErrorCode::DivisionByZero, "polynomial division by zero");
    const auto& F = f.field();
    if (f.is_zero() || f.deg() < g.deg()) return {Poly(F), f};
    std::vector<Elem> r = f.coeffs();
    const auto& gc = g.coeffs();
    const std::size_t dg = gc.size() - 1;
    const Elem lead_inv = F.inv(g.leading());
    std::vector<Elem> quo(r.size() - dg, 0);
    for (std::size_t k = r.size(); k-- > dg;) {
        const Elem c = F.mul(r[k], lead_inv);
        quo[k - dg] = c;
        if (c == 0) continue;
        const Elem nc = F.neg(c);
        for (std::size_t i = 0; i <= dg; ++i) r[k - dg + i] = F.add(r[k - dg + i], F.mul(nc, gc[i]));
    }
    r.resize(dg);
    return {Poly(F, std::move(quo)), Poly(F, std::move(r))};
}

Poly gcd(const Poly& f, const Poly& g) {
    require_same_field(f.field(), g.field());
    if (f.is_zero() && g.is_zero()) throw Error(ErrorCode::BothZero, "gcd(0, 0) is undefined");
    Poly a = f, b = g;
    while (!b.is_zero()) {
        Poly r = divmod(a, b).remainder;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

bool coprime(const Poly& s, const Poly& t) {
    if (s.is_zero() && t.is_zero()) return false;
    return gcd(s, t).is_unit();
}

Poly poly_from_index(const FieldSpec& field, std::uint64_t index) {
    std::vector<Elem> c;
    const std::uint64_t q = field.q();
    while (index > 0) {
        c.push_back(static_cast<Elem>(index % q));
        index /= q;
    }
    return Poly(field, std::move(c));
}

void enumerate_polys(const FieldSpec& field, std::int64_t max_deg,
                     const std::function<bool(const Poly&)>& visit) {
    if (max_deg < 0) throw Error(ErrorCode::InvalidArgument, "max_deg must be >= 0");
    const std::size_t len = static_cast<std::size_t>(max_deg) + 1;
    const Elem q = field.q();
    std::vector<Elem> digits(len, 0);
    while (true) {
        if (!visit(Poly(field, digits))) return;
        std::size_t i = 0;
        while (i < len && ++digits[i] == q) digits[i++] = 0;
        if (i == len) return;
    }
}

std::vector<Poly> all_polys(const FieldSpec& field, std::int64_t max_deg) {
    std::vector<Poly> out;
    enumerate_polys(field, max_deg, [&](const Poly& f) {
        out.push_back(f);
        return true;
    });
    return out;
}

}  // namespace ffcf
