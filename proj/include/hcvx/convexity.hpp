#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hcvx/errors.hpp"
#include "hcvx/functions.hpp"
#include "hcvx/gate.hpp"
#include "hcvx/interval.hpp"
#include "hcvx/parallel.hpp"
#include "hcvx/precision.hpp"

namespace hcvx {

inline constexpr double kViolationTolerance = 1e-10;
inline constexpr std::size_t kDefaultGridPoints = 256;
inline constexpr int kDefaultRefineIterations = 40;

/// Signed h-convexity gap at (u, lambda) for the pair (u, v):
///   h(lambda) f(u) + h(1 - lambda) f(v) - f(lambda u + (1 - lambda) v).
/// Nonnegative exactly when the defining inequality holds at that point.
template <class Real = double>
Real gap(const ScalarFunction& f, const ScalarFunction& h, const Real& v,
         const Real& u, const Real& lambda) {
  if (!(lambda >= 0 && lambda <= 1)) {
    throw DomainError("lambda = " + std::to_string(to_double(lambda)) +
                      " outside [0, 1]");
  }
  const Real one(1);
  const Real rest = one - lambda;
  Real mix = lambda * u + rest * v;
  // The convex combination must stay between u and v despite rounding.
  const Real lo = u < v ? u : v;
  const Real hi = u < v ? v : u;
  if (mix < lo) mix = lo;
  if (mix > hi) mix = hi;
  return h.evaluate(lambda) * f.evaluate(u) + h.evaluate(rest) * f.evaluate(v) -
         f.evaluate(mix);
}

struct GridSize {
  std::size_t n_u = kDefaultGridPoints;
  std::size_t n_lambda = kDefaultGridPoints;
};

enum class Verdict { Certified, Violated, Degenerate };

inline std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Certified:
      return "Certified";
    case Verdict::Violated:
      return "Violated";
    case Verdict::Degenerate:
      return "Degenerate";
  }
  return "?";
}

struct CertifyOptions {
  GridSize grid;
  int refine_iterations = kDefaultRefineIterations;
  double violation_tolerance = kViolationTolerance;
  double clamp_eps = kDefaultClampEpsilon;
  // Re-evaluate sub-tolerance minima at 50 digits before calling Violated.
  bool confirm = true;
};

struct Certificate {
  double min_value = 0.0;
  double arg_u = 0.0;
  double arg_lambda = 0.0;
  double grid_min_value = 0.0;
  GridSize grid;
  bool refined = false;
  int refine_iterations = 0;
  Verdict verdict = Verdict::Certified;
  double tolerance = kViolationTolerance;
  GateInterval gate;
  double v = 0.0;
  // 50-digit value of the gap at the arg-min, present when the double
  // minimum fell below -tolerance.
  std::optional<std::string> confirmed_min;
};

namespace detail {

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * (static_cast<double>(i) /
                               static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

inline constexpr double kGoldenRatioConjugate = 0.6180339887498949;

// Best point seen so far; ties keep the earlier point.
struct Best {
  double value = std::numeric_limits<double>::infinity();
  double x = 0.0;
  double y = 0.0;

  void offer(double val, double px, double py) {
    if (val < value) {
      value = val;
      x = px;
      y = py;
    }
  }
};

}  // namespace detail

/// Grid certification of g-conditional h-convexity of f at v: evaluates the
/// gap over [g(v), v] x [0, 1], then shrinks golden-section brackets around
/// the grid minimum, one coordinate at a time.
inline Certificate certify(const ScalarFunction& f, const ScalarFunction& g,
                           const ScalarFunction& h, double v,
                           const CertifyOptions& options = {}) {
  if (options.grid.n_u < 2 || options.grid.n_lambda < 2) {
    throw InvalidArgument("certify needs at least 2 grid points per axis");
  }
  Certificate cert;
  cert.v = v;
  cert.grid = options.grid;
  cert.tolerance = options.violation_tolerance;
  cert.gate = gate_interval(g, v, f.domain(), options.clamp_eps);

  const double u_lo = cert.gate.interval.lo();
  const std::vector<double> us =
      cert.gate.degenerate ? std::vector<double>{v}
                           : detail::linspace(u_lo, v, options.grid.n_u);
  const std::vector<double> lambdas =
      detail::linspace(0.0, 1.0, options.grid.n_lambda);

  // Row minima in parallel, reduced in row order.
  std::vector<detail::Best> rows(us.size());
  std::vector<std::size_t> row_arg(us.size(), 0);
  parallel_for(us.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < lambdas.size(); ++j) {
        const double val = gap(f, h, v, us[i], lambdas[j]);
        if (val < rows[i].value) {
          rows[i].offer(val, us[i], lambdas[j]);
          row_arg[i] = j;
        }
      }
    }
  });
  std::size_t bi = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].value < rows[bi].value) bi = i;
  }
  detail::Best best = rows[bi];
  const std::size_t bj = row_arg[bi];
  cert.grid_min_value = best.value;

  if (options.refine_iterations > 0) {
    double ua = us[bi > 0 ? bi - 1 : 0];
    double ub = us[std::min(bi + 1, us.size() - 1)];
    double la = lambdas[bj > 0 ? bj - 1 : 0];
    double lb = lambdas[std::min(bj + 1, lambdas.size() - 1)];
    constexpr double phi = detail::kGoldenRatioConjugate;
    for (int it = 0; it < options.refine_iterations; ++it) {
      if (ub > ua) {
        const double x1 = ub - phi * (ub - ua);
        const double x2 = ua + phi * (ub - ua);
        const double f1 = gap(f, h, v, x1, best.y);
        const double f2 = gap(f, h, v, x2, best.y);
        best.offer(f1, x1, best.y);
        best.offer(f2, x2, best.y);
        if (f1 < f2) {
          ub = x2;
        } else {
          ua = x1;
        }
      }
      if (lb > la) {
        const double y1 = lb - phi * (lb - la);
        const double y2 = la + phi * (lb - la);
        const double f1 = gap(f, h, v, best.x, y1);
        const double f2 = gap(f, h, v, best.x, y2);
        best.offer(f1, best.x, y1);
        best.offer(f2, best.x, y2);
        if (f1 < f2) {
          lb = y2;
        } else {
          la = y1;
        }
      }
    }
    cert.refined = true;
    cert.refine_iterations = options.refine_iterations;
  }

  cert.min_value = best.value;
  cert.arg_u = best.x;
  cert.arg_lambda = best.y;

  bool violated = cert.min_value < -options.violation_tolerance;
  if (violated && options.confirm) {
    const HighPrecision precise = gap<HighPrecision>(
        f, h, HighPrecision(v), HighPrecision(cert.arg_u),
        HighPrecision(cert.arg_lambda));
    cert.confirmed_min = to_string(precise);
    violated = precise < -options.violation_tolerance;
  }
  if (violated) {
    cert.verdict = Verdict::Violated;
  } else {
    cert.verdict =
        cert.gate.degenerate ? Verdict::Degenerate : Verdict::Certified;
  }
  return cert;
}

/// Estimate of inf_{t in K} h(t)/t.
struct JensenCoefficient {
  double value = 0.0;
  double argmin = 0.0;          // sample point realizing `value`
  bool boundary_limit = false;  // still decreasing toward an excluded endpoint
  Interval K;
  std::size_t evaluations = 0;

  std::optional<double> attained_at() const {
    if (boundary_limit) return std::nullopt;
    return argmin;
  }
};

inline constexpr std::size_t kDefaultJcoeffSamples = 4096;
inline constexpr double kEndpointApproach = 1e-9;

/// Jensen coefficient inf_{t in K} h(t)/t on a dense grid. Excluded
/// endpoints (open ones, and a closed 0 where the quotient is undefined) are
/// approached by a halving sequence of offsets down to 1e-9.
inline JensenCoefficient jcoeff(const ScalarFunction& h, const Interval& K,
                                std::size_t samples = kDefaultJcoeffSamples) {
  if (!K.bounded()) throw DomainError("jcoeff needs a bounded K");
  if (!h.domain().includes(K)) {
    throw DomainError("K = " + K.describe() + " is not inside the domain " +
                      h.domain().describe() + " of " + std::string(h.name()));
  }
  if (samples < 2) throw InvalidArgument("jcoeff needs at least 2 samples");

  const double lo = K.lo();
  const double hi = K.hi();
  if (lo < 0.0 && hi > 0.0) {
    throw SingularQuotient("0 lies inside K = " + K.describe());
  }
  bool lo_excluded = K.lo_open();
  bool hi_excluded = K.hi_open();
  // A closed endpoint at 0: h(t)/t -> +inf is harmless to the infimum,
  // -inf is not, and h(0) = 0 leaves a limit to approach.
  if (lo == 0.0 && !K.lo_open()) {
    const double h0 = h.evaluate(0.0);
    if (h0 < 0.0) throw SingularQuotient("h(0) < 0 makes h(t)/t -> -inf");
    lo_excluded = true;
  }
  if (hi == 0.0 && !K.hi_open()) {
    const double h0 = h.evaluate(0.0);
    if (h0 > 0.0) throw SingularQuotient("h(0) > 0 makes h(t)/t -> -inf");
    hi_excluded = true;
  }

  JensenCoefficient out;
  out.K = K;
  if (K.degenerate()) {
    if (lo == 0.0) throw SingularQuotient("K = {0}");
    out.value = h.evaluate(lo) / lo;
    out.argmin = lo;
    out.evaluations = 1;
    return out;
  }

  const double step = (hi - lo) / static_cast<double>(samples - 1);
  std::vector<double> ts;
  ts.reserve(samples + 128);
  auto approach = [&](double endpoint, double direction) {
    // direction +1 approaches from above (lo endpoint), -1 from below.
    std::vector<double> offsets;
    for (double d = step * 0.5; d > kEndpointApproach; d *= 0.5) {
      offsets.push_back(d);
    }
    offsets.push_back(kEndpointApproach);
    for (double d : offsets) ts.push_back(endpoint + direction * d);
  };
  if (lo_excluded) approach(lo, +1.0);
  for (std::size_t i = 0; i < samples; ++i) {
    if ((i == 0 && lo_excluded) || (i + 1 == samples && hi_excluded)) continue;
    ts.push_back(i + 1 == samples
                     ? hi
                     : lo + step * static_cast<double>(i));
  }
  if (hi_excluded) approach(hi, -1.0);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  std::vector<double> qs(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    qs[i] = h.evaluate(ts[i]) / ts[i];
  }
  out.evaluations = ts.size();
  std::size_t best = 0;
  for (std::size_t i = 1; i < qs.size(); ++i) {
    if (qs[i] < qs[best]) best = i;
  }
  out.value = qs[best];
  out.argmin = ts[best];

  // Strictly decreasing run into an excluded endpoint marks a boundary limit.
  constexpr std::size_t kRun = 3;
  if (lo_excluded && best == 0 && qs.size() > kRun) {
    bool decreasing = true;
    for (std::size_t i = 0; i < kRun; ++i) decreasing &= qs[i] < qs[i + 1];
    out.boundary_limit = decreasing;
  }
  if (hi_excluded && best + 1 == qs.size() && qs.size() > kRun) {
    bool decreasing = true;
    const std::size_t n = qs.size();
    for (std::size_t i = 0; i < kRun; ++i) {
      decreasing &= qs[n - 1 - i] < qs[n - 2 - i];
    }
    out.boundary_limit = decreasing;
  }

  // Interior minimum: golden-section shrink between the neighbouring samples.
  if (!out.boundary_limit && best > 0 && best + 1 < ts.size()) {
    double a = ts[best - 1];
    double b = ts[best + 1];
    constexpr double phi = detail::kGoldenRatioConjugate;
    for (int it = 0; it < 60 && b - a > 0; ++it) {
      const double x1 = b - phi * (b - a);
      const double x2 = a + phi * (b - a);
      const double f1 = h.evaluate(x1) / x1;
      const double f2 = h.evaluate(x2) / x2;
      out.evaluations += 2;
      if (f1 < out.value) {
        out.value = f1;
        out.argmin = x1;
      }
      if (f2 < out.value) {
        out.value = f2;
        out.argmin = x2;
      }
      if (f1 < f2) {
        b = x2;
      } else {
        a = x1;
      }
    }
  }
  return out;
}

}  // namespace hcvx
