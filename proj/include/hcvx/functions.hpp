#pragma once

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/special_functions/expm1.hpp>
#include <boost/math/special_functions/log1p.hpp>

#include "hcvx/errors.hpp"
#include "hcvx/interval.hpp"
#include "hcvx/precision.hpp"

namespace hcvx {

/// Closed-form families. Weights play the role of h, gates of g, targets of f;
/// any family can be used in any role (e.g. IdentityWeight as a target).
enum class Family {
  // weights h
  ExpWeight,       // (alpha/beta) e^{t(1-t)}
  PowerWeight,     // t^beta
  IdentityWeight,  // t
  // gates g
  KyFanGate,      // t^a / (t^a + (1-t)^a)
  PowerGate,      // t^a
  ChrystalGate,   // ln((1+e^t)^{beta/alpha-1} - 1)
  RootGate,       // t (beta/alpha - 1)^{1/p}
  PiecewiseGate,  // 1 at t=2, 2 elsewhere
  CosineGate,     // cos(4 pi t / 3)
  ConstantGate,   // c
  // targets f
  LogitTarget,     // ln((1-t)/t)
  NegLogTarget,    // -ln t
  SoftplusTarget,  // ln(1+e^t)
  PowerTarget,     // t^p
  CubicTarget,     // (t-1)^3
  ExpDecayTarget,  // e^{-t}
  ExpTarget,       // e^t
  AbsTarget,       // |t|
  AffineTarget,    // c0 + c1 t
};

struct FamilyInfo {
  Family family;
  std::string_view name;
  std::vector<std::string_view> params;
  // Largest set on which the closed form is finite (gates may return -inf on
  // their parameter boundary, see ChrystalGate).
  Interval natural;
  // Domain used when none is given: the one the family is stated on.
  Interval default_domain;
};

namespace detail {

inline const std::vector<FamilyInfo>& family_table() {
  constexpr double inf = Interval::kInf;
  static const std::vector<FamilyInfo> table = {
      {Family::ExpWeight, "ExpWeight", {"alpha", "beta"},
       Interval::real_line(), Interval::closed(0, 1)},
      {Family::PowerWeight, "PowerWeight", {"beta"},
       Interval::right_open(0, inf), Interval::closed(0, 1)},
      {Family::IdentityWeight, "IdentityWeight", {},
       Interval::real_line(), Interval::real_line()},
      {Family::KyFanGate, "KyFanGate", {"alpha"},
       Interval::closed(0, 1), Interval::left_open(0, 0.5)},
      {Family::PowerGate, "PowerGate", {"alpha"},
       Interval::right_open(0, inf), Interval::left_open(0, 1)},
      {Family::ChrystalGate, "ChrystalGate", {"alpha", "beta"},
       Interval::real_line(), Interval::open(0, inf)},
      {Family::RootGate, "RootGate", {"alpha", "beta", "p"},
       Interval::real_line(), Interval::right_open(0, inf)},
      {Family::PiecewiseGate, "PiecewiseGate", {},
       Interval::real_line(), Interval::closed(0, 2)},
      {Family::CosineGate, "CosineGate", {},
       Interval::real_line(), Interval::closed(0, 2)},
      {Family::ConstantGate, "ConstantGate", {"c"},
       Interval::real_line(), Interval::real_line()},
      {Family::LogitTarget, "LogitTarget", {},
       Interval::open(0, 1), Interval::left_open(0, 0.5)},
      {Family::NegLogTarget, "NegLogTarget", {},
       Interval::open(0, inf), Interval::left_open(0, 1)},
      {Family::SoftplusTarget, "SoftplusTarget", {},
       Interval::real_line(), Interval::open(0, inf)},
      {Family::PowerTarget, "PowerTarget", {"p"},
       Interval::right_open(0, inf), Interval::right_open(0, inf)},
      {Family::CubicTarget, "CubicTarget", {},
       Interval::real_line(), Interval::closed(0, 2)},
      {Family::ExpDecayTarget, "ExpDecayTarget", {},
       Interval::real_line(), Interval::right_open(0, inf)},
      {Family::ExpTarget, "ExpTarget", {},
       Interval::real_line(), Interval::real_line()},
      {Family::AbsTarget, "AbsTarget", {},
       Interval::real_line(), Interval::real_line()},
      {Family::AffineTarget, "AffineTarget", {"c0", "c1"},
       Interval::real_line(), Interval::real_line()},
  };
  return table;
}

template <class Real>
Real expm1(const Real& x) {
  if constexpr (std::is_same_v<Real, double>) {
    return std::expm1(x);
  } else {
    return boost::math::expm1(x);
  }
}

template <class Real>
Real log1p(const Real& x) {
  if constexpr (std::is_same_v<Real, double>) {
    return std::log1p(x);
  } else {
    return boost::math::log1p(x);
  }
}

}  // namespace detail

inline const FamilyInfo& family_info(Family family) {
  for (const auto& info : detail::family_table()) {
    if (info.family == family) return info;
  }
  throw InvalidArgument("unknown family");
}

inline std::string_view family_name(Family family) {
  return family_info(family).name;
}

inline std::optional<Family> parse_family(std::string_view name) {
  for (const auto& info : detail::family_table()) {
    if (info.name == name) return info.family;
  }
  return std::nullopt;
}

/// An immutable, parameterized member of one of the closed-form families.
/// Parameters and domain are validated at construction; evaluation only
/// checks the argument against the domain.
class ScalarFunction {
 public:
  using Params = std::map<std::string, double>;

  // t on the real line
  ScalarFunction() : ScalarFunction(Family::IdentityWeight, {}) {}

  ScalarFunction(Family family, const Params& params,
                 std::optional<Interval> domain = std::nullopt)
      : family_(family) {
    const FamilyInfo& info = family_info(family);
    for (const auto& [key, _] : params) {
      bool known = false;
      for (auto name : info.params) known = known || name == key;
      if (!known) {
        throw InvalidArgument(std::string(info.name) +
                              ": unknown parameter '" + key + "'");
      }
    }
    for (std::size_t i = 0; i < info.params.size(); ++i) {
      auto it = params.find(std::string(info.params[i]));
      if (it == params.end()) {
        throw InvalidArgument(std::string(info.params[i]) +
                              " is required for " + std::string(info.name));
      }
      if (!std::isfinite(it->second)) {
        throw InvalidArgument(std::string(info.name) + ": parameter " +
                              it->first + " must be finite");
      }
      values_[i] = it->second;
    }
    validate_params();
    domain_ = domain.value_or(info.default_domain);
    if (!info.natural.includes(domain_)) {
      throw InvalidArgument(std::string(info.name) + " is not defined on " +
                            domain_.describe() + " (natural domain " +
                            info.natural.describe() + ")");
    }
  }

  static ScalarFunction exp_weight(double alpha, double beta) {
    return {Family::ExpWeight, {{"alpha", alpha}, {"beta", beta}}};
  }
  static ScalarFunction power_weight(double beta) {
    return {Family::PowerWeight, {{"beta", beta}}};
  }
  static ScalarFunction identity_weight() {
    return {Family::IdentityWeight, {}};
  }
  static ScalarFunction kyfan_gate(double alpha) {
    return {Family::KyFanGate, {{"alpha", alpha}}};
  }
  static ScalarFunction power_gate(double alpha) {
    return {Family::PowerGate, {{"alpha", alpha}}};
  }
  static ScalarFunction chrystal_gate(double alpha, double beta) {
    return {Family::ChrystalGate, {{"alpha", alpha}, {"beta", beta}}};
  }
  static ScalarFunction root_gate(double alpha, double beta, double p) {
    return {Family::RootGate, {{"alpha", alpha}, {"beta", beta}, {"p", p}}};
  }
  static ScalarFunction constant_gate(double c) {
    return {Family::ConstantGate, {{"c", c}}};
  }
  static ScalarFunction power_target(double p) {
    return {Family::PowerTarget, {{"p", p}}};
  }
  static ScalarFunction of(Family family,
                           std::optional<Interval> domain = std::nullopt) {
    return {family, {}, domain};
  }

  Family family() const noexcept { return family_; }
  std::string_view name() const { return family_name(family_); }
  const Interval& domain() const noexcept { return domain_; }

  Params params() const {
    Params out;
    const auto& names = family_info(family_).params;
    for (std::size_t i = 0; i < names.size(); ++i) {
      out[std::string(names[i])] = values_[i];
    }
    return out;
  }

  double param(std::string_view key) const {
    const auto& names = family_info(family_).params;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == key) return values_[i];
    }
    throw InvalidArgument(std::string(name()) + " has no parameter " +
                          std::string(key));
  }

  ScalarFunction with_domain(const Interval& domain) const {
    return {family_, params(), domain};
  }

  template <class Real>
  Real evaluate(const Real& t) const {
    if (!domain_.contains(t)) {
      throw DomainError(std::string(name()) + " evaluated at " +
                        std::to_string(to_double(t)) + " outside " +
                        domain_.describe());
    }
    return closed_form(t);
  }

  double operator()(double t) const { return evaluate(t); }

  friend bool operator==(const ScalarFunction&, const ScalarFunction&) =
      default;

 private:
  void validate_params() const {
    auto fail = [&](const char* why) {
      throw InvalidArgument(std::string(name()) + ": " + why);
    };
    const double a = values_[0];
    const double b = values_[1];
    switch (family_) {
      case Family::ExpWeight:
      case Family::ChrystalGate:
        if (!(a > 0 && a <= b)) fail("requires 0 < alpha <= beta");
        break;
      case Family::RootGate:
        if (!(a > 0 && a <= b)) fail("requires 0 < alpha <= beta");
        if (!(values_[2] > 0)) fail("requires p > 0");
        break;
      case Family::PowerWeight:
        if (!(a > 0)) fail("requires beta > 0");
        break;
      case Family::KyFanGate:
      case Family::PowerGate:
        if (!(a > 0)) fail("requires alpha > 0");
        break;
      case Family::PowerTarget:
        if (!(a > 0)) fail("requires p > 0");
        break;
      default:
        break;
    }
  }

  template <class Real>
  Real closed_form(const Real& t) const {
    using std::abs;
    using std::cos;
    using std::exp;
    using std::log;
    using std::pow;
    const Real a(values_[0]);
    const Real b(values_[1]);
    const Real c(values_[2]);
    const Real one(1);
    switch (family_) {
      case Family::ExpWeight:
        return a / b * exp(t * (one - t));
      case Family::PowerWeight:
        return pow(t, a);
      case Family::IdentityWeight:
        return t;
      case Family::KyFanGate: {
        const Real num = pow(t, a);
        return num / (num + pow(one - t, a));
      }
      case Family::PowerGate:
        return pow(t, a);
      case Family::ChrystalGate: {
        // (1+e^t)^k - 1 via expm1(k log1p(e^t)); k = 0 gives ln 0 = -inf.
        const Real k = b / a - one;
        const Real inner = detail::expm1(Real(k * detail::log1p(Real(exp(t)))));
        if (inner <= 0) return -infinity<Real>();
        return log(inner);
      }
      case Family::RootGate:
        return t * pow(Real(b / a - one), Real(one / c));
      case Family::PiecewiseGate:
        return t == Real(2) ? Real(1) : Real(2);
      case Family::CosineGate:
        return cos(Real(4) * pi<Real>() * t / Real(3));
      case Family::ConstantGate:
        return a;
      case Family::LogitTarget:
        return detail::log1p(Real(-t)) - log(t);
      case Family::NegLogTarget:
        return -log(t);
      case Family::SoftplusTarget: {
        const Real pos = t > 0 ? t : Real(0);
        return pos + detail::log1p(Real(exp(Real(-abs(t)))));
      }
      case Family::PowerTarget:
        return pow(t, a);
      case Family::CubicTarget: {
        const Real d = t - one;
        return d * d * d;
      }
      case Family::ExpDecayTarget:
        return exp(-t);
      case Family::ExpTarget:
        return exp(t);
      case Family::AbsTarget:
        return abs(t);
      case Family::AffineTarget:
        return a + b * t;
    }
    throw InvalidArgument("unhandled family");
  }

  Family family_;
  std::array<double, 3> values_{};
  Interval domain_;
};

/// Free-function spelling of ScalarFunction::evaluate.
template <class Real = double>
Real evaluate(const ScalarFunction& fn, const Real& t) {
  return fn.evaluate(t);
}

}  // namespace hcvx
