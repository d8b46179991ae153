#include "ffcf/rational.hpp"

namespace ffcf {

Rational q_power(std::uint64_t q, std::int64_t e) {
    boost::multiprecision::cpp_int v = 1;
    const std::int64_t n = e < 0 ? -e : e;
    for (std::int64_t i = 0; i < n; ++i) v *= q;
    return e < 0 ? Rational(1, v) : Rational(v);
}

std::string to_string(const Rational& r) {
    const auto n = boost::multiprecision::numerator(r);
    const auto d = boost::multiprecision::denominator(r);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace ffcf
