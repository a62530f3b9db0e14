#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace kite {

// Exact rational scalar used by the chart algebra and the domain constants.
// Floating point (double) is used everywhere speed matters.
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }
inline double to_double(double x) { return x; }

inline Rat rat(long long num, long long den = 1) { return Rat(num, den); }

// Parses "p/q" or "p" (used by the domain-constants JSON round trip).
inline Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rat(boost::multiprecision::cpp_int(s));
  boost::multiprecision::cpp_int num(s.substr(0, slash));
  boost::multiprecision::cpp_int den(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("rational with zero denominator: " + s);
  return Rat(num, den);
}

inline std::string format_rat(const Rat& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

// Scalar-kind traits shared by the templated geometry kernel.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static double zero() { return 0.0; }
  static bool is_finite(double x) { return std::isfinite(x); }
};

template <>
struct ScalarTraits<Rat> {
  static constexpr bool exact = true;
  static Rat zero() { return Rat(0); }
  static bool is_finite(const Rat&) { return true; }
};

}  // namespace kite
