#pragma once

#include <cmath>
#include <string>

#include "hcvx/errors.hpp"
#include "hcvx/functions.hpp"
#include "hcvx/interval.hpp"

namespace hcvx {

inline constexpr double kDefaultClampEpsilon = 1e-9;

/// The conditional interval [g(v), v] restricted to an ambient domain.
struct GateInterval {
  Interval interval;
  double gate_value = 0.0;  // g(v) before clamping; may be -inf
  bool degenerate = false;  // g(v) == v
  bool clamped = false;     // lower endpoint moved up to the ambient infimum
};

/// [g(v), v] intersected with `ambient`. A lower endpoint below the ambient
/// infimum (including -inf) is clamped to the infimum, or to infimum + eps
/// when that endpoint is open.
inline GateInterval gate_interval(const ScalarFunction& g, double v,
                                  const Interval& ambient,
                                  double clamp_eps = kDefaultClampEpsilon) {
  if (!ambient.contains(v)) {
    throw DomainError("v = " + std::to_string(v) + " is outside " +
                      ambient.describe());
  }
  const double gv = g.evaluate(v);
  if (std::isnan(gv)) {
    throw DomainError(std::string(g.name()) + "(v) is NaN");
  }
  if (gv > v) {
    throw InfeasibleGate("g(v) = " + std::to_string(gv) + " > v = " +
                         std::to_string(v));
  }
  GateInterval out;
  out.gate_value = gv;
  double lo = gv;
  const bool below = gv < ambient.lo() || (gv == ambient.lo() && ambient.lo_open());
  if (below) {
    if (!std::isfinite(ambient.lo())) {
      throw DomainError("gate interval is unbounded below");
    }
    lo = ambient.lo_open() ? ambient.lo() + clamp_eps : ambient.lo();
    lo = std::min(lo, v);
    out.clamped = true;
  }
  out.degenerate = lo == v;
  out.interval = Interval::closed(lo, v);
  return out;
}

}  // namespace hcvx
