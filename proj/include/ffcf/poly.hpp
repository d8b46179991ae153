#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ffcf/abs_exp.hpp"
#include "ffcf/field.hpp"

namespace ffcf {

/// Element of F_q[X], coefficients ascending. The leading coefficient is
/// nonzero; the zero polynomial has no coefficients and degree -infinity.
class Poly {
public:
    explicit Poly(FieldSpec field) : field_(std::move(field)) {}
    Poly(FieldSpec field, std::vector<Elem> coeffs);

    static Poly constant(const FieldSpec& field, Elem c);
    static Poly monomial(const FieldSpec& field, Elem c, std::size_t k);
    static Poly x(const FieldSpec& field) { return monomial(field, 1, 1); }
    /// Parses the polynomial grammar: terms `c`, `c*x^k`, `c*x`, `x^k`, `x` joined by `+`.
    static Poly parse(const FieldSpec& field, std::string_view text);

    const FieldSpec& field() const noexcept { return field_; }
    const std::vector<Elem>& coeffs() const noexcept { return c_; }

    bool is_zero() const noexcept { return c_.empty(); }
    bool is_unit() const noexcept { return c_.size() == 1; }
    Degree degree() const noexcept {
        return c_.empty() ? Degree::neg_inf() : Degree(static_cast<std::int64_t>(c_.size()) - 1);
    }
    /// Degree as an integer; the caller guarantees the polynomial is nonzero.
    std::int64_t deg() const { return degree().value(); }
    Elem coeff(std::size_t k) const noexcept { return k < c_.size() ? c_[k] : 0; }
    Elem leading() const noexcept { return c_.empty() ? 0 : c_.back(); }

    Poly monic() const;
    Poly scaled(Elem c) const;
    Poly shifted(std::size_t k) const;  // multiply by X^k

    friend Poly operator+(const Poly& f, const Poly& g);
    friend Poly operator-(const Poly& f, const Poly& g);
    friend Poly operator*(const Poly& f, const Poly& g);
    Poly operator-() const;

    Poly& operator+=(const Poly& g) { return *this = *this + g; }
    Poly& operator-=(const Poly& g) { return *this = *this - g; }
    Poly& operator*=(const Poly& g) { return *this = *this * g; }

    friend bool operator==(const Poly& f, const Poly& g) noexcept {
        return f.field_ == g.field_ && f.c_ == g.c_;
    }

    /// Canonical text: descending degree, zero terms omitted, `0` for zero.
    std::string str() const;

private:
    void trim() noexcept;

    FieldSpec field_;
    std::vector<Elem> c_;
};

struct DivMod {
    Poly quotient;
    Poly remainder;
};

/// f = q*g + r with deg r < deg g.
DivMod divmod(const Poly& f, const Poly& g);

/// Monic gcd; throws BothZero when f = g = 0.
Poly gcd(const Poly& f, const Poly& g);

/// True iff gcd(s, t) is a unit, i.e. (s, t) is a primitive pair.
bool coprime(const Poly& s, const Poly& t);

/// Visits every polynomial of degree <= max_deg and the zero polynomial,
/// q^{max_deg+1} in total, in order of the base-q value of the coefficient
/// vector. Returning false from the visitor stops the walk.
void enumerate_polys(const FieldSpec& field, std::int64_t max_deg,
                     const std::function<bool(const Poly&)>& visit);

/// Materialized form of `enumerate_polys`.
std::vector<Poly> all_polys(const FieldSpec& field, std::int64_t max_deg);

/// The index-th polynomial in enumeration order (base-q digits of index).
Poly poly_from_index(const FieldSpec& field, std::uint64_t index);

}  // namespace ffcf
