#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ffcf/abs_exp.hpp"
#include "ffcf/poly.hpp"

namespace ffcf {

/// Reduced fraction P/Q in F_q(X): gcd(P, Q) = 1 and Q monic.
struct RationalFunction {
    Poly num;
    Poly den;

    static RationalFunction make(const Poly& num, const Poly& den);
    bool is_zero() const noexcept { return num.is_zero(); }
};

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
RationalFunction inverse(const RationalFunction& a);

/// Element of K = F_q((X^{-1})), alpha = sum_{j >= nu} a_j X^{-j}, stored as
/// the window a_nu .. a_{nu+N-1} of guaranteed coefficients. Everything past
/// the window is unknown unless `exact_tail()` holds, in which case it is
/// zero. A value may carry an exact rational backing, in which case any
/// operation that needs more coefficients refines from it instead of failing.
///
/// |alpha| = q^{-nu(alpha)}; see `abs()`.
class LaurentNumber {
public:
    /// The exact zero of `field`.
    explicit LaurentNumber(FieldSpec field);

    /// Expansion of P/Q with `precision` known coefficients and backing (P, Q).
    static LaurentNumber from_rational(const Poly& p, const Poly& q, std::int64_t precision);
    static LaurentNumber from_rational(const RationalFunction& r, std::int64_t precision);
    static LaurentNumber from_poly(const Poly& p);
    /// Window whose first coefficient sits at exponent index `start`
    /// (coefficient of X^{-start}). Leading zeros are skipped. An inexact
    /// window with no nonzero coefficient has no determinable valuation and
    /// is rejected with PrecisionExhausted.
    static LaurentNumber from_window(const FieldSpec& field, std::int64_t start, std::vector<Elem> coeffs,
                                     bool exact = false);
    /// sum_{j=1}^{depth} a_j X^{-j}, a_j i.i.d. uniform on F_q from the seeded
    /// xoshiro256** stream; the restriction of normalized Haar measure on the
    /// unit ball to the stored window.
    static LaurentNumber sample(const FieldSpec& field, std::int64_t depth, std::uint64_t seed);

    const FieldSpec& field() const noexcept { return field_; }
    bool is_zero() const noexcept { return exact_ && c_.empty(); }
    bool exact_tail() const noexcept { return exact_; }
    const std::optional<RationalFunction>& backing() const noexcept { return backing_; }

    /// nu(alpha); throws InvalidArgument for zero.
    std::int64_t valuation() const;
    /// Exponent e with |alpha| = q^e, i.e. -nu(alpha); -infinity for zero.
    AbsExp abs() const;
    /// Number of guaranteed coefficients N counted from nu.
    std::int64_t known() const noexcept { return static_cast<std::int64_t>(c_.size()); }
    /// First exponent index whose coefficient is unknown (nu + N);
    /// nullopt when the tail is exact.
    std::optional<std::int64_t> horizon() const noexcept;
    /// Coefficient of X^{-j}; PrecisionExhausted past the horizon (after
    /// trying to refine from the backing).
    Elem coeff(std::int64_t j) const;
    const std::vector<Elem>& window() const noexcept { return c_; }

    /// Polynomial part: sum_{j=nu}^{0} a_j X^{-j}; 0 when nu >= 1.
    Poly floor() const;

    /// Same value with at least `precision` known coefficients; requires a backing.
    LaurentNumber refined(std::int64_t precision) const;
    /// Drops the backing and keeps at most `precision` coefficients.
    LaurentNumber truncated(std::int64_t precision) const;
    LaurentNumber without_backing() const;

    LaurentNumber inv() const;
    LaurentNumber operator-() const;
    friend LaurentNumber operator+(const LaurentNumber& u, const LaurentNumber& v);
    friend LaurentNumber operator-(const LaurentNumber& u, const LaurentNumber& v);
    friend LaurentNumber operator*(const LaurentNumber& u, const LaurentNumber& v);
    friend LaurentNumber operator/(const LaurentNumber& u, const LaurentNumber& v);

    /// Coefficients agree on every index both values know.
    bool agrees_with(const LaurentNumber& other) const;

    /// e.g. `X^-1+2*X^-3+O(X^-5)`; exact values omit the O-term.
    std::string str() const;

private:
    LaurentNumber(FieldSpec field, std::int64_t nu, std::vector<Elem> coeffs, bool exact,
                  std::optional<RationalFunction> backing);

    static LaurentNumber combine(const LaurentNumber& u, const LaurentNumber& v, bool subtract);

    FieldSpec field_;
    std::int64_t nu_ = 0;
    std::vector<Elem> c_;
    bool exact_ = true;
    std::optional<RationalFunction> backing_;
};

/// Outcome of evaluating |t*alpha - s| from a finite window.
struct LinearAbs {
    bool resolved = false;
    AbsExp exp;               // |t alpha - s| = q^exp when resolved
    std::int64_t below = 0;   // otherwise |t alpha - s| <= q^below
};

/// |t*alpha - s| computed on alpha's window without building intermediate values.
LinearAbs abs_linear(const LaurentNumber& alpha, const Poly& t, const Poly& s);

/// Exact precision used for the expansion of exact values when no other
/// precision is implied (e.g. inverting a polynomial).
inline constexpr std::int64_t kDefaultPrecision = 64;

/// Parses `rat:<poly>/<poly>` and `coeffs:<j0>:<e1>,<e2>,...`.
LaurentNumber parse_laurent(const FieldSpec& field, std::string_view text,
                            std::int64_t precision = kDefaultPrecision);

}  // namespace ffcf
