#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace hcvx {

/// Extended-precision real used to confirm witnesses: 50 significant decimal
/// digits, MPFR-backed, expression templates off so `auto` is safe.
using HighPrecision = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<50>,
    boost::multiprecision::et_off>;

inline constexpr int kHighPrecisionDigits = 50;

template <class Real>
inline double to_double(const Real& x) {
  return static_cast<double>(x);
}

template <class Real>
inline Real pi() {
  return boost::math::constants::pi<Real>();
}

template <class Real>
inline Real infinity() {
  return std::numeric_limits<Real>::infinity();
}

/// Decimal rendering with `digits` significant digits (scientific when needed).
inline std::string to_string(const HighPrecision& x,
                             int digits = kHighPrecisionDigits) {
  if (boost::multiprecision::isnan(x)) return "nan";
  if (boost::multiprecision::isinf(x)) return x < 0 ? "-inf" : "inf";
  return x.str(digits, std::ios_base::scientific);
}

inline HighPrecision parse_high_precision(const std::string& s) {
  return HighPrecision(s);
}

}  // namespace hcvx
