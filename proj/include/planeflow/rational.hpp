#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <limits>
#include <stdexcept>
#include <string>

namespace planeflow {

// Exact coefficient arithmetic. cpp_rational keeps values in lowest terms
// with a positive denominator, which is exactly the invariant we need.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline int sign_of(const Rational& q) { return q.sign(); }

/// Parse a decimal digit string "123.456" into the exact rational 123456/1000.
/// Digits are accumulated explicitly: a leading zero must not switch the
/// integer constructor into octal.
inline Rational rational_from_decimal(const std::string& digits) {
    BigInt num = 0, den = 1;
    bool seen_dot = false, seen_digit = false;
    for (char c : digits) {
        if (c == '.') {
            if (seen_dot) throw std::invalid_argument("malformed decimal literal: " + digits);
            seen_dot = true;
            continue;
        }
        if (c < '0' || c > '9')
            throw std::invalid_argument("malformed decimal literal: " + digits);
        num = num * 10 + (c - '0');
        if (seen_dot) den *= 10;
        seen_digit = true;
    }
    if (!seen_digit) throw std::invalid_argument("malformed decimal literal: " + digits);
    return Rational(num, den);
}

inline std::string to_string(const Rational& q) {
    return q.str();
}

}  // namespace planeflow
