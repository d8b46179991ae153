#include "ffcf/field.hpp"

#include <sstream>

namespace ffcf {

std::string_view error_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NonPrimeP: return "NonPrimeP";
        case ErrorCode::EvenCharacteristic: return "EvenCharacteristic";
        case ErrorCode::ReducibleModulus: return "ReducibleModulus";
        case ErrorCode::DegreeMismatch: return "DegreeMismatch";
        case ErrorCode::DivisionByZero: return "DivisionByZero";
        case ErrorCode::FieldMismatch: return "FieldMismatch";
        case ErrorCode::BothZero: return "BothZero";
        case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
        case ErrorCode::InsufficientQuotients: return "InsufficientQuotients";
        case ErrorCode::DegreeViolation: return "DegreeViolation";
        case ErrorCode::TooShallow: return "TooShallow";
        case ErrorCode::DeterminantViolation: return "DeterminantViolation";
        case ErrorCode::ZeroLeadingCoefficient: return "ZeroLeadingCoefficient";
        case ErrorCode::EmptyRegion: return "EmptyRegion";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::RationalInput: return "RationalInput";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

bool is_prime(std::uint64_t n) noexcept {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

namespace {

constexpr std::uint32_t kMaxQ = 1u << 20;
constexpr std::uint32_t kAddTableMaxQ = 1024;

using Coords = std::vector<std::uint32_t>;

Coords to_coords(Elem v, std::uint32_t p, std::uint32_t r) {
    Coords c(r);
    for (std::uint32_t i = 0; i < r; ++i) {
        c[i] = v % p;
        v /= p;
    }
    return c;
}

Elem from_coords(const Coords& c, std::uint32_t p) {
    Elem v = 0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * p + c[i];
    return v;
}

// Product of coordinate vectors reduced modulo the monic modulus.
Coords mul_coords(const Coords& a, const Coords& b, const std::vector<std::uint32_t>& modulus,
                  std::uint32_t p) {
    const std::size_t r = a.size();
    std::vector<std::uint64_t> prod(2 * r - 1, 0);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) prod[i + j] = (prod[i + j] + std::uint64_t(a[i]) * b[j]) % p;
    for (std::size_t k = prod.size(); k-- > r;) {
        const std::uint64_t c = prod[k];
        if (c == 0) continue;
        for (std::size_t i = 0; i <= r; ++i)
            prod[k - r + i] = (prod[k - r + i] + (p - c) * modulus[i]) % p;
    }
    Coords out(r);
    for (std::size_t i = 0; i < r; ++i) out[i] = static_cast<std::uint32_t>(prod[i]);
    return out;
}

// Remainder of `f` modulo monic `g`, both ascending over F_p.
std::vector<std::uint32_t> rem_mod_p(std::vector<std::uint32_t> f, std::span<const std::uint32_t> g,
                                     std::uint32_t p) {
    const std::size_t dg = g.size() - 1;
    while (!f.empty() && f.back() == 0) f.pop_back();
    while (f.size() > dg) {
        const std::uint64_t c = f.back();
        const std::size_t shift = f.size() - 1 - dg;
        for (std::size_t i = 0; i <= dg; ++i)
            f[shift + i] = static_cast<std::uint32_t>((f[shift + i] + (p - c) * g[i]) % p);
        while (!f.empty() && f.back() == 0) f.pop_back();
    }
    return f;
}

}  // namespace

bool is_irreducible_mod_p(std::span<const std::uint32_t> monic, std::uint32_t p) {
    const std::size_t deg = monic.size() - 1;
    if (deg == 0) return false;
    if (deg == 1) return true;
    // Trial division by every monic polynomial of degree 1..deg/2.
    for (std::size_t d = 1; d <= deg / 2; ++d) {
        std::uint64_t count = 1;
        for (std::size_t i = 0; i < d; ++i) count *= p;
        for (std::uint64_t idx = 0; idx < count; ++idx) {
            std::vector<std::uint32_t> g(d + 1);
            std::uint64_t v = idx;
            for (std::size_t i = 0; i < d; ++i) {
                g[i] = static_cast<std::uint32_t>(v % p);
                v /= p;
            }
            g[d] = 1;
            std::vector<std::uint32_t> f(monic.begin(), monic.end());
            if (rem_mod_p(std::move(f), g, p).empty()) return false;
        }
    }
    return true;
}

namespace detail {

class FieldData {
public:
    std::uint32_t p = 0, r = 0, q = 0;
    std::vector<std::uint32_t> modulus;
    std::vector<Elem> neg;
    std::vector<Elem> add;  // q*q when q <= kAddTableMaxQ, else empty
    std::vector<Elem> exp;  // exp[k] = g^k, k in [0, 2(q-1))
    std::vector<std::uint32_t> log;

    Elem add_slow(Elem a, Elem b) const {
        Elem out = 0, scale = 1;
        for (std::uint32_t i = 0; i < r; ++i) {
            out += ((a % p + b % p) % p) * scale;
            a /= p;
            b /= p;
            scale *= p;
        }
        return out;
    }
};

}  // namespace detail

FieldSpec FieldSpec::make(std::uint32_t p, std::uint32_t r,
                          std::optional<std::vector<std::uint32_t>> modulus) {
    if (p == 2) throw Error(ErrorCode::EvenCharacteristic, "characteristic 2 is not supported");
    if (!is_prime(p)) throw Error(ErrorCode::NonPrimeP, std::to_string(p) + " is not prime");
    if (r < 1) throw Error(ErrorCode::DegreeMismatch, "extension degree must be >= 1");
    std::uint64_t q = 1;
    for (std::uint32_t i = 0; i < r; ++i) {
        q *= p;
        if (q > kMaxQ) throw Error(ErrorCode::InvalidArgument, "field too large (q > 2^20)");
    }

    auto d = std::make_shared<detail::FieldData>();
    d->p = p;
    d->r = r;
    d->q = static_cast<std::uint32_t>(q);

    if (modulus) {
        auto& m = *modulus;
        while (!m.empty() && m.back() == 0) m.pop_back();
        for (auto& c : m) c %= p;
        if (m.size() != r + 1)
            throw Error(ErrorCode::DegreeMismatch, "modulus degree must equal r");
        if (m.back() != 1) throw Error(ErrorCode::DegreeMismatch, "modulus must be monic");
        if (r > 1 && !is_irreducible_mod_p(m, p))
            throw Error(ErrorCode::ReducibleModulus, "modulus is reducible over F_p");
        if (r > 1) d->modulus = m;
    } else if (r > 1) {
        std::uint64_t lower = q;  // number of choices for the r lower coefficients
        for (std::uint64_t idx = 0; idx < lower; ++idx) {
            std::vector<std::uint32_t> m = to_coords(static_cast<Elem>(idx), p, r);
            m.push_back(1);
            if (is_irreducible_mod_p(m, p)) {
                d->modulus = std::move(m);
                break;
            }
        }
    }

    const std::uint32_t qq = d->q;
    d->neg.resize(qq);
    for (Elem a = 0; a < qq; ++a) {
        auto c = to_coords(a, p, r);
        for (auto& x : c) x = (p - x) % p;
        d->neg[a] = from_coords(c, p);
    }
    if (qq <= kAddTableMaxQ) {
        d->add.resize(std::size_t(qq) * qq);
        for (Elem a = 0; a < qq; ++a)
            for (Elem b = 0; b < qq; ++b) d->add[std::size_t(a) * qq + b] = d->add_slow(a, b);
    }

    // Find a generator of the multiplicative group and tabulate exp/log.
    auto mul_raw = [&](Elem a, Elem b) -> Elem {
        if (r == 1) return static_cast<Elem>(std::uint64_t(a) * b % p);
        return from_coords(mul_coords(to_coords(a, p, r), to_coords(b, p, r), d->modulus, p), p);
    };
    const std::uint32_t order = qq - 1;
    d->exp.assign(2 * std::size_t(order), 0);
    d->log.assign(qq, 0);
    for (Elem g = 1; g < qq; ++g) {
        Elem x = 1;
        std::uint32_t k = 0;
        bool ok = true;
        for (; k < order; ++k) {
            if (k > 0 && x == 1) {
                ok = false;
                break;
            }
            d->exp[k] = x;
            x = mul_raw(x, g);
        }
        if (ok) break;
    }
    for (std::uint32_t k = 0; k < order; ++k) {
        d->exp[k + order] = d->exp[k];
        d->log[d->exp[k]] = k;
    }
    return FieldSpec(std::move(d));
}

FieldSpec FieldSpec::from_q(std::uint64_t q) {
    if (q < 2) throw Error(ErrorCode::NonPrimeP, "q must be a prime power >= 3");
    std::uint64_t p = 2;
    while (q % p != 0) ++p;
    std::uint32_t r = 0;
    std::uint64_t rest = q;
    while (rest % p == 0) {
        rest /= p;
        ++r;
    }
    if (rest != 1) throw Error(ErrorCode::NonPrimeP, std::to_string(q) + " is not a prime power");
    return make(static_cast<std::uint32_t>(p), r);
}

std::uint32_t FieldSpec::p() const noexcept { return d_->p; }
std::uint32_t FieldSpec::r() const noexcept { return d_->r; }
std::uint32_t FieldSpec::q() const noexcept { return d_->q; }
const std::vector<std::uint32_t>& FieldSpec::modulus() const noexcept { return d_->modulus; }

Elem FieldSpec::add(Elem a, Elem b) const noexcept {
    if (d_->r == 1) {
        Elem s = a + b;
        return s >= d_->p ? s - d_->p : s;
    }
    if (!d_->add.empty()) return d_->add[std::size_t(a) * d_->q + b];
    return d_->add_slow(a, b);
}

Elem FieldSpec::neg(Elem a) const noexcept { return d_->neg[a]; }

Elem FieldSpec::sub(Elem a, Elem b) const noexcept { return add(a, neg(b)); }

Elem FieldSpec::mul(Elem a, Elem b) const noexcept {
    if (a == 0 || b == 0) return 0;
    if (d_->r == 1) return static_cast<Elem>(std::uint64_t(a) * b % d_->p);
    return d_->exp[std::size_t(d_->log[a]) + d_->log[b]];
}

Elem FieldSpec::inv(Elem a) const {
    if (a == 0) throw Error(ErrorCode::DivisionByZero, "inverse of zero in F_q");
    if (a == 1) return 1;
    return d_->exp[d_->q - 1 - d_->log[a]];
}

Elem FieldSpec::div(Elem a, Elem b) const { return mul(a, inv(b)); }

Elem FieldSpec::from_int(std::int64_t n) const noexcept {
    std::int64_t m = n % static_cast<std::int64_t>(d_->p);
    if (m < 0) m += d_->p;
    return static_cast<Elem>(m);
}

FieldElement FieldSpec::element(Elem v) const { return FieldElement(*this, v); }
FieldElement FieldSpec::zero() const { return FieldElement(*this, 0); }
FieldElement FieldSpec::one() const { return FieldElement(*this, 1); }

std::string FieldSpec::describe() const {
    std::ostringstream os;
    os << "F_" << d_->q;
    if (d_->r > 1) {
        os << " (p=" << d_->p << ", modulus ";
        bool first = true;
        for (std::size_t i = d_->modulus.size(); i-- > 0;) {
            const auto c = d_->modulus[i];
            if (c == 0) continue;
            if (!first) os << '+';
            first = false;
            if (i == 0 || c != 1) os << c;
            if (i > 0) os << (c != 1 ? "*x" : "x");
            if (i > 1) os << '^' << i;
        }
        os << ')';
    }
    return os.str();
}

bool operator==(const FieldSpec& a, const FieldSpec& b) noexcept {
    if (a.d_ == b.d_) return true;
    return a.d_->p == b.d_->p && a.d_->r == b.d_->r && a.d_->modulus == b.d_->modulus;
}

void require_same_field(const FieldSpec& a, const FieldSpec& b) {
    if (!(a == b)) throw Error(ErrorCode::FieldMismatch, a.describe() + " vs " + b.describe());
}

FieldElement::FieldElement(FieldSpec field, Elem v) : field_(std::move(field)), v_(v) {
    if (v_ >= field_.q())
        throw Error(ErrorCode::InvalidArgument, "element literal " + std::to_string(v) + " out of range");
}

FieldElement FieldElement::inv() const { return {field_, field_.inv(v_)}; }

FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    require_same_field(a.field_, b.field_);
    return {a.field_, a.field_.add(a.v_, b.v_)};
}
FieldElement operator-(const FieldElement& a, const FieldElement& b) {
    require_same_field(a.field_, b.field_);
    return {a.field_, a.field_.sub(a.v_, b.v_)};
}
FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    require_same_field(a.field_, b.field_);
    return {a.field_, a.field_.mul(a.v_, b.v_)};
}
FieldElement operator/(const FieldElement& a, const FieldElement& b) {
    require_same_field(a.field_, b.field_);
    return {a.field_, a.field_.div(a.v_, b.v_)};
}

}  // namespace ffcf
