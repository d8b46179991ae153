#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>

#include "ffcf/error.hpp"

namespace ffcf {

/// An absolute value |x| = q^e held as its integer exponent e, with a
/// distinguished -infinity for |0| = 0. Also serves as the degree of a
/// polynomial, since |t| = q^{deg t} for t in F_q[X].
class AbsExp {
public:
    constexpr AbsExp() noexcept = default;  // -infinity
    constexpr explicit AbsExp(std::int64_t e) noexcept : e_(e) {}

    static constexpr AbsExp neg_inf() noexcept { return AbsExp{}; }

    constexpr bool is_neg_inf() const noexcept { return e_ == kNegInf; }

    std::int64_t value() const {
        if (is_neg_inf())
            throw Error(ErrorCode::InvalidArgument, "exponent of zero is -infinity");
        return e_;
    }

    /// Exponent addition; -infinity absorbs (|0 * y| = 0).
    friend constexpr AbsExp operator+(AbsExp a, AbsExp b) noexcept {
        if (a.is_neg_inf() || b.is_neg_inf()) return neg_inf();
        return AbsExp{a.e_ + b.e_};
    }
    friend constexpr AbsExp operator+(AbsExp a, std::int64_t k) noexcept {
        return a.is_neg_inf() ? a : AbsExp{a.e_ + k};
    }
    friend constexpr AbsExp operator-(AbsExp a, std::int64_t k) noexcept {
        return a.is_neg_inf() ? a : AbsExp{a.e_ - k};
    }

    friend constexpr auto operator<=>(AbsExp, AbsExp) noexcept = default;
    friend constexpr bool operator==(AbsExp, AbsExp) noexcept = default;

    std::string str() const { return is_neg_inf() ? "-inf" : std::to_string(e_); }

    friend std::ostream& operator<<(std::ostream& os, AbsExp a) { return os << a.str(); }

private:
    static constexpr std::int64_t kNegInf = std::numeric_limits<std::int64_t>::min();
    std::int64_t e_ = kNegInf;
};

using Degree = AbsExp;

}  // namespace ffcf
