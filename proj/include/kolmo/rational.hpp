#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace kolmo {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// "num/den" with den > 0, always including the denominator ("1/1", "0/1").
std::string to_string(const Rational& r);

// Accepts "num/den" or a plain integer. Throws UsageError otherwise.
Rational parse_rational(std::string_view text);

// 2^-c for c >= 0.
Rational pow2_neg(unsigned c);

}  // namespace kolmo
