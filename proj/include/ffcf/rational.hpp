#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace ffcf {

/// Exact rational used for measures and ratios.
using Rational = boost::multiprecision::cpp_rational;

/// q^e as an exact rational (e may be negative).
Rational q_power(std::uint64_t q, std::int64_t e);

/// `n/d` or `n` when the denominator is 1.
std::string to_string(const Rational& r);

double to_double(const Rational& r);

}  // namespace ffcf
