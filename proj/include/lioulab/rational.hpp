// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace lioulab {

/// Exact rational scalar used for all symbolic coefficient arithmetic.
/// Arbitrary precision, so bracket/divergence identities can be asserted
/// with structural equality instead of tolerances.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline Rational rational_pow(const Rational& base, unsigned exp) {
    Rational out = 1;
    Rational b = base;
    unsigned e = exp;
    while (e > 0) {
        if (e & 1u) out *= b;
        b *= b;
        e >>= 1u;
    }
    return out;
}

/// Parses "p" or "p/q"; throws std::invalid_argument on malformed input.
inline Rational rational_from_string(const std::string& s) {
    try {
        Rational r(s);
        return r;
    } catch (const std::exception&) {
        throw std::invalid_argument("invalid rational literal: '" + s + "'");
    }
}

inline std::string to_string(const Rational& r) { return r.str(); }

/// Nearest rational with denominator 10^6; exact for the short decimal
/// parameters used in configurations.
inline Rational rational_approx(double v) {
    return Rational(static_cast<long long>(v * 1e6 + (v >= 0 ? 0.5 : -0.5)), 1000000LL);
}

}  // namespace lioulab
