#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ffcf/error.hpp"

namespace ffcf {

/// Raw element of F_q. The value is the integer whose base-p digits are the
/// polynomial-basis coordinates, so 0..q-1 is a bijection with the field.
using Elem = std::uint32_t;

namespace detail {
class FieldData;
}

class FieldElement;

/// Handle to an immutable finite field F_q, q = p^r, p an odd prime.
/// Copies share the same tables; two handles compare equal iff they
/// describe the same (p, r, modulus).
class FieldSpec {
public:
    /// Validates p, r and the modulus. `modulus` holds ascending F_p
    /// coefficients of a monic irreducible of degree r; it must be absent
    /// (or of degree 1) when r == 1. For r > 1 and no modulus the least
    /// monic irreducible (ordered by the base-p value of its lower
    /// coefficients) is used.
    static FieldSpec make(std::uint32_t p, std::uint32_t r = 1,
                          std::optional<std::vector<std::uint32_t>> modulus = std::nullopt);

    /// Prime field shortcut; also accepts any prime power q, using the default modulus.
    static FieldSpec from_q(std::uint64_t q);

    std::uint32_t p() const noexcept;
    std::uint32_t r() const noexcept;
    std::uint32_t q() const noexcept;
    /// Ascending coefficients of the modulus (size r+1), empty when r == 1.
    const std::vector<std::uint32_t>& modulus() const noexcept;

    Elem add(Elem a, Elem b) const noexcept;
    Elem sub(Elem a, Elem b) const noexcept;
    Elem neg(Elem a) const noexcept;
    Elem mul(Elem a, Elem b) const noexcept;
    Elem inv(Elem a) const;
    Elem div(Elem a, Elem b) const;
    /// Image of an integer under Z -> F_p -> F_q.
    Elem from_int(std::int64_t n) const noexcept;

    FieldElement element(Elem v) const;
    FieldElement zero() const;
    FieldElement one() const;

    std::string describe() const;

    friend bool operator==(const FieldSpec& a, const FieldSpec& b) noexcept;

private:
    explicit FieldSpec(std::shared_ptr<const detail::FieldData> d) : d_(std::move(d)) {}
    std::shared_ptr<const detail::FieldData> d_;
};

/// Throws FieldMismatch unless both handles describe the same field.
void require_same_field(const FieldSpec& a, const FieldSpec& b);

/// True iff the monic polynomial (ascending coefficients over F_p) is irreducible.
bool is_irreducible_mod_p(std::span<const std::uint32_t> monic, std::uint32_t p);

bool is_prime(std::uint64_t n) noexcept;

/// A value of F_q bound to its field.
class FieldElement {
public:
    FieldElement(FieldSpec field, Elem v);

    const FieldSpec& field() const noexcept { return field_; }
    Elem value() const noexcept { return v_; }
    bool is_zero() const noexcept { return v_ == 0; }

    FieldElement inv() const;

    friend FieldElement operator+(const FieldElement& a, const FieldElement& b);
    friend FieldElement operator-(const FieldElement& a, const FieldElement& b);
    friend FieldElement operator*(const FieldElement& a, const FieldElement& b);
    friend FieldElement operator/(const FieldElement& a, const FieldElement& b);
    FieldElement operator-() const { return {field_, field_.neg(v_)}; }

    friend bool operator==(const FieldElement& a, const FieldElement& b) noexcept {
        return a.field_ == b.field_ && a.v_ == b.v_;
    }

private:
    FieldSpec field_;
    Elem v_;
};

}  // namespace ffcf
