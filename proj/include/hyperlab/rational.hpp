#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <string_view>

namespace hyperlab {

// Exact rational, always in lowest terms with a positive denominator.
using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);

Integer floor(const Rational& r);
Integer ceil(const Rational& r);
Rational abs(const Rational& r);
Rational pow(const Rational& r, long n);
Rational pow2(long n);  // 2^n, n may be negative

bool is_integer(const Rational& r);
double to_double(const Rational& r);

}  // namespace hyperlab
