#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace ectrl {

using Rational = mpq_class;
using BigInt = mpz_class;

// Accepts "n", "n/d" and decimal notation ("0.25", "-1.5e-2"); the decimal
// form is converted exactly, so "0.1" is 1/10 rather than its binary double.
Rational parse_rational(std::string_view text);

// Exact value of the shortest decimal that round-trips `value`.
Rational rational_from_double(double value);

// Nearest double (ties to even). Plain get_d() truncates.
double to_double(const Rational& q);

// "n" for integers, "n/d" otherwise.
std::string format_rational(const Rational& q);

}  // namespace ectrl
