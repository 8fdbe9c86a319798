#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>

#include "c00kit/errors.hpp"

namespace c00 {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Accepts "p", "-p", "p/q" with decimal integers; anything else is a ParseError.
// cpp_rational normalizes, so the round trip through format_rat is canonical.
inline Rat parse_rat(const std::string& s) {
  if (s.empty()) throw ParseError("empty rational literal");
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) throw ParseError("sign without digits in rational literal");
  bool seen_slash = false;
  for (std::size_t j = i; j < s.size(); ++j) {
    if (s[j] == '/' && !seen_slash && j > i && j + 1 < s.size()) {
      seen_slash = true;
      continue;
    }
    if (s[j] < '0' || s[j] > '9')
      throw ParseError("bad character in rational literal '" + s + "'", j);
  }
  try {
    Rat r(s);
    return r;
  } catch (const std::exception&) {
    throw ParseError("cannot parse rational literal '" + s + "'");
  }
}

inline std::string format_rat(const Rat& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

inline double to_double(const Rat& r) { return r.convert_to<double>(); }
inline double to_double(double x) { return x; }

// Shortest-round-trip style formatting for doubles: %.17g is bitwise faithful,
// which keeps serialized output reproducible run to run.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

// Engines are templated on the scalar; these traits are the only place the two
// modes differ (exactness flag, conversion from stored rational parameters,
// comparison slack for iterative code).
template <class T>
struct scalar_traits;

template <>
struct scalar_traits<Rat> {
  static constexpr bool exact = true;
  static Rat from_rat(const Rat& r) { return r; }
  static Rat abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }
  static std::string str(const Rat& x) { return format_rat(x); }
  static double approx(const Rat& x) { return to_double(x); }
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static double from_rat(const Rat& r) { return to_double(r); }
  static double abs(double x) { return std::fabs(x); }
  static std::string str(double x) { return format_double(x); }
  static double approx(double x) { return x; }
};

} // namespace c00
