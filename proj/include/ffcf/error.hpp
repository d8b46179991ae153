#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ffcf {

enum class ErrorCode {
    NonPrimeP,
    EvenCharacteristic,
    ReducibleModulus,
    DegreeMismatch,
    DivisionByZero,
    FieldMismatch,
    BothZero,
    PrecisionExhausted,
    InsufficientQuotients,
    DegreeViolation,
    TooShallow,
    DeterminantViolation,
    ZeroLeadingCoefficient,
    EmptyRegion,
    BudgetExceeded,
    InvalidArgument,
    RationalInput,
    ParseError,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised by the literal parsers; `position` is a 0-based offset into the input.
class ParseError : public Error {
public:
    ParseError(std::size_t position, const std::string& what)
        : Error(ErrorCode::ParseError, what + " at position " + std::to_string(position)),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

}  // namespace ffcf
