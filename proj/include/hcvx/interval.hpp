#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "hcvx/errors.hpp"

namespace hcvx {

/// Real interval with explicit endpoint openness. Infinite endpoints are
/// allowed and are always open.
class Interval {
 public:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  Interval() = default;

  Interval(double lo, double hi, bool lo_open, bool hi_open)
      : lo_(lo), hi_(hi), lo_open_(lo_open), hi_open_(hi_open) {
    if (std::isnan(lo) || std::isnan(hi)) {
      throw InvalidArgument("interval endpoint is NaN");
    }
    if (lo > hi) {
      throw InvalidArgument("interval has lo > hi: " + describe());
    }
    if (std::isinf(lo)) lo_open_ = true;
    if (std::isinf(hi)) hi_open_ = true;
    if (lo == hi && (lo_open_ || hi_open_)) {
      throw InvalidArgument("degenerate interval must be closed: " +
                            describe());
    }
  }

  static Interval closed(double lo, double hi) {
    return {lo, hi, false, false};
  }
  static Interval open(double lo, double hi) { return {lo, hi, true, true}; }
  // (lo, hi]
  static Interval left_open(double lo, double hi) {
    return {lo, hi, true, false};
  }
  // [lo, hi)
  static Interval right_open(double lo, double hi) {
    return {lo, hi, false, true};
  }
  static Interval point(double x) { return {x, x, false, false}; }
  static Interval real_line() { return {-kInf, kInf, true, true}; }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  bool lo_open() const noexcept { return lo_open_; }
  bool hi_open() const noexcept { return hi_open_; }
  bool degenerate() const noexcept { return lo_ == hi_; }
  bool bounded() const noexcept {
    return std::isfinite(lo_) && std::isfinite(hi_);
  }
  double width() const noexcept { return hi_ - lo_; }

  template <class Real>
  bool contains(const Real& t) const {
    if (lo_open_ ? !(t > lo_) : !(t >= lo_)) return false;
    if (hi_open_ ? !(t < hi_) : !(t <= hi_)) return false;
    return true;
  }

  /// Membership with `slack` allowed past closed endpoints only.
  bool contains_with_slack(double t, double slack) const {
    if (lo_open_ ? !(t > lo_) : !(t >= lo_ - slack)) return false;
    if (hi_open_ ? !(t < hi_) : !(t <= hi_ + slack)) return false;
    return true;
  }

  /// True when every point of `other` is a point of this interval.
  bool includes(const Interval& other) const {
    const bool lo_ok = other.lo_ > lo_ ||
                       (other.lo_ == lo_ && (!lo_open_ || other.lo_open_));
    const bool hi_ok = other.hi_ < hi_ ||
                       (other.hi_ == hi_ && (!hi_open_ || other.hi_open_));
    return lo_ok && hi_ok;
  }

  /// Intersection; throws InvalidArgument when empty.
  Interval intersect(const Interval& other) const {
    double lo = lo_;
    bool lo_open = lo_open_;
    if (other.lo_ > lo || (other.lo_ == lo && other.lo_open_)) {
      lo = other.lo_;
      lo_open = other.lo_open_ || (other.lo_ == lo_ && lo_open_);
    }
    double hi = hi_;
    bool hi_open = hi_open_;
    if (other.hi_ < hi || (other.hi_ == hi && other.hi_open_)) {
      hi = other.hi_;
      hi_open = other.hi_open_ || (other.hi_ == hi_ && hi_open_);
    }
    if (lo > hi || (lo == hi && (lo_open || hi_open))) {
      throw InvalidArgument("empty intersection of " + describe() + " and " +
                            other.describe());
    }
    return {lo, hi, lo_open, hi_open};
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    os << (lo_open_ ? '(' : '[') << lo_ << ", " << hi_ << (hi_open_ ? ')' : ']');
    return os.str();
  }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
  bool lo_open_ = false;
  bool hi_open_ = false;
};

}  // namespace hcvx
