#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace wtsdist {

/// Arbitrary-precision exact rational, always kept canonical.
using Rational = mpq_class;

/// Parses "p/q", an integer, or a finite decimal such as "-0.125".
/// Throws ParseError on anything else.
Rational parse_rational(std::string_view text);

/// Canonical text: "p" for integers, otherwise "p/q" in lowest terms.
std::string to_string(const Rational& r);

/// base^exponent for a nonnegative exponent; 0^0 = 1.
Rational pow(const Rational& base, std::size_t exponent);

}  // namespace wtsdist
