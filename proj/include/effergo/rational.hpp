#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

#include "effergo/errors.hpp"

namespace effergo {

using Integer = boost::multiprecision::cpp_int;

/// Exact, always-reduced rational with arbitrary-precision numerator and denominator.
using Rational = boost::multiprecision::cpp_rational;

inline Integer numerator_of(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer denominator_of(const Rational& q) { return boost::multiprecision::denominator(q); }

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
    if (den == 0) throw SchemaError("zero denominator");
    return Rational(Integer(num), Integer(den));
}

/// 2^-k
inline Rational dyadic(std::size_t k) {
    Integer den = 1;
    den <<= k;
    return Rational(Integer(1), den);
}

inline Rational pow(const Rational& base, std::size_t exponent) {
    Rational result = 1;
    Rational b = base;
    while (exponent != 0) {
        if (exponent & 1u) result *= b;
        b *= b;
        exponent >>= 1u;
    }
    return result;
}

/// Smallest integer >= q.
inline Integer ceil_of(const Rational& q) {
    Integer num = numerator_of(q);
    Integer den = denominator_of(q);
    Integer quot = num / den;  // truncates toward zero
    if (quot * den != num && num > 0) quot += 1;
    return quot;
}

/// Largest integer <= q.
inline Integer floor_of(const Rational& q) {
    Integer num = numerator_of(q);
    Integer den = denominator_of(q);
    Integer quot = num / den;
    if (quot * den != num && num < 0) quot -= 1;
    return quot;
}

/// Wire form: always "num/den", including integers ("1/1", "0/1").
inline std::string to_string(const Rational& q) {
    return numerator_of(q).str() + "/" + denominator_of(q).str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Accepts "num/den" or a plain integer "num".
inline Rational parse_rational(std::string_view text) {
    auto parse_int = [&](std::string_view part) {
        if (part.empty()) throw SchemaError("malformed rational '" + std::string(text) + "'");
        std::size_t i = (part[0] == '-' || part[0] == '+') ? 1 : 0;
        if (i == part.size()) throw SchemaError("malformed rational '" + std::string(text) + "'");
        for (; i < part.size(); ++i) {
            if (part[i] < '0' || part[i] > '9') {
                throw SchemaError("malformed rational '" + std::string(text) + "'");
            }
        }
        std::string s(part);
        if (s[0] == '+') s.erase(0, 1);
        return Integer(s);
    };
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text));
    Integer num = parse_int(text.substr(0, slash));
    Integer den = parse_int(text.substr(slash + 1));
    if (den == 0) throw SchemaError("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
}

/// A rational u with sqrt(x) <= u <= sqrt(x) + 2^-bits. x must be nonnegative.
inline Rational sqrt_upper(const Rational& x, std::size_t bits = 16) {
    if (x < 0) throw PreconditionError("sqrt_upper of a negative number");
    // s = isqrt(floor(x * 4^bits)); then s/2^bits <= sqrt(x) < (s+1)/2^bits.
    Integer scaled = numerator_of(x) << (2 * bits);
    scaled /= denominator_of(x);
    Integer s = boost::multiprecision::sqrt(scaled);
    Integer den = 1;
    den <<= bits;
    Rational lower(s, den);
    if (lower * lower == x) return lower;
    return Rational(Integer(s + 1), den);
}

} // namespace effergo
