#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

#include "mapwalk/errors.hpp"

namespace mapwalk {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// "num/den" in lowest terms; integers are written as "k/1".
inline std::string to_string(const Rational& q) {
  return numerator(q).str() + "/" + denominator(q).str();
}

// Accepts "a/b" or a bare integer "a". Whitespace is not allowed.
inline Rational parse_rational(std::string_view text) {
  auto digits_ok = [](std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') return false;
    }
    return true;
  };
  const auto slash = text.find('/');
  const std::string_view num = text.substr(0, slash);
  const std::string_view den =
      slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!digits_ok(num) || !digits_ok(den)) {
    throw InputError("malformed rational '" + std::string(text) + "'");
  }
  BigInt n(std::string(num[0] == '+' ? num.substr(1) : num));
  BigInt d(std::string(den[0] == '+' ? den.substr(1) : den));
  if (d == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
  return Rational(n, d);
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

// Bit size used to rank pivot candidates in exact elimination.
inline std::size_t bit_size(const Rational& q) {
  auto bits = [](const BigInt& v) -> std::size_t {
    if (v == 0) return 0;
    return boost::multiprecision::msb(boost::multiprecision::abs(v)) + 1;
  };
  return bits(numerator(q)) + bits(denominator(q));
}

}  // namespace mapwalk
