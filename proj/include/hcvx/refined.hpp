#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hcvx/errors.hpp"
#include "hcvx/functions.hpp"
#include "hcvx/opcalc.hpp"
#include "hcvx/precision.hpp"

namespace hcvx {

inline constexpr std::size_t kMaxSampleSize = 10000;
inline constexpr double kWeightSumTolerance = 1e-12;
// Gate endpoints like v^alpha are rounded, so membership allows this much.
inline constexpr double kMembershipSlack = 1e-12;

enum class Corollary { KyFan, AmGm, Chrystal, HolderMcCarthy };

inline std::string_view corollary_name(Corollary c) {
  switch (c) {
    case Corollary::KyFan: return "KyFan";
    case Corollary::AmGm: return "AmGm";
    case Corollary::Chrystal: return "Chrystal";
    case Corollary::HolderMcCarthy: return "HolderMcCarthy";
  }
  return "?";
}

inline Corollary parse_corollary(std::string_view s) {
  for (auto c : {Corollary::KyFan, Corollary::AmGm, Corollary::Chrystal,
                 Corollary::HolderMcCarthy}) {
    if (corollary_name(c) == s) return c;
  }
  throw InvalidArgument("unknown corollary '" + std::string(s) + "'");
}

/// Values a (and b for Chrystal) with weights q.
/// A single point may carry q = 1; otherwise every weight is in (0, 1).
class WeightedSample {
 public:
  WeightedSample() = default;

  WeightedSample(std::vector<double> a, std::vector<double> q,
                 std::vector<double> b = {})
      : a_(std::move(a)), b_(std::move(b)), q_(std::move(q)) {
    const std::size_t n = a_.size();
    if (n == 0) throw InvalidArgument("sample is empty");
    if (n > kMaxSampleSize) {
      throw InvalidArgument("sample size " + std::to_string(n) +
                            " exceeds cap " + std::to_string(kMaxSampleSize));
    }
    if (q_.size() != n || (!b_.empty() && b_.size() != n)) {
      throw DimensionMismatch("sample lists have different lengths");
    }
    double sum = 0.0;
    for (double w : q_) {
      const bool ok = n == 1 ? (w > 0 && w <= 1) : (w > 0 && w < 1);
      if (!ok) throw InvalidArgument("weight outside (0, 1)");
      sum += w;
    }
    if (std::abs(sum - 1.0) > kWeightSumTolerance) {
      throw InvalidArgument("weights do not sum to 1");
    }
    for (double v : a_) {
      if (!std::isfinite(v)) throw InvalidArgument("sample value not finite");
    }
    for (double v : b_) {
      if (!std::isfinite(v)) throw InvalidArgument("sample value not finite");
    }
  }

  static WeightedSample equal_weights(std::vector<double> a,
                                      std::vector<double> b = {}) {
    std::vector<double> q(a.size(), a.empty() ? 0.0 : 1.0 / a.size());
    return {std::move(a), std::move(q), std::move(b)};
  }

  std::size_t size() const noexcept { return a_.size(); }
  const std::vector<double>& a() const noexcept { return a_; }
  const std::vector<double>& b() const noexcept { return b_; }
  const std::vector<double>& q() const noexcept { return q_; }
  bool has_b() const noexcept { return !b_.empty(); }

  friend bool operator==(const WeightedSample&, const WeightedSample&) = default;

 private:
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<double> q_;
};

namespace detail {

inline double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

}  // namespace detail

/// Spread of the values relevant to `c`. Chrystal takes the largest of the
/// a-spread, the b-spread and every |a_i - b_j|.
inline double gamma(const WeightedSample& s, Corollary c) {
  if (c != Corollary::Chrystal) return detail::spread(s.a());
  if (!s.has_b()) throw InvalidArgument("Chrystal sample needs b values");
  const auto [alo, ahi] = std::minmax_element(s.a().begin(), s.a().end());
  const auto [blo, bhi] = std::minmax_element(s.b().begin(), s.b().end());
  return std::max({*ahi - *alo, *bhi - *blo, *ahi - *blo, *bhi - *alo});
}

template <class Real>
Real gamma(const SpectralDecomposition<Real>& d) {
  return d.spread();
}

struct FeasibilityFlag {
  std::string name;
  bool value = false;
  // Informational flags are reported but do not gate feasibility.
  bool required = true;

  friend bool operator==(const FeasibilityFlag&, const FeasibilityFlag&) = default;
};

struct Feasibility {
  std::vector<FeasibilityFlag> flags;
  double gamma = 0.0;
  double beta = 0.0;
  // Lower end of the gate interval [g(v), v] the values must lie in.
  double gate_lower = 0.0;

  bool all() const {
    return std::all_of(flags.begin(), flags.end(),
                       [](const auto& f) { return f.value || !f.required; });
  }
  std::optional<bool> flag(std::string_view name) const {
    for (const auto& f : flags) {
      if (f.name == name) return f.value;
    }
    return std::nullopt;
  }
};

namespace detail {

inline std::optional<double> gate_at(const ScalarFunction& g, double v) {
  try {
    const double r = g.evaluate<double>(v);
    if (std::isnan(r)) return std::nullopt;
    return r;
  } catch (const Error&) {
    return std::nullopt;
  }
}

template <class Fn>
std::optional<ScalarFunction> try_make(Fn make) {
  try {
    return make();
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline bool all_within(const std::vector<double>& xs, double lo, double hi,
                       double slack = 0.0) {
  return std::all_of(xs.begin(), xs.end(), [&](double x) {
    return x >= lo - slack && x <= hi + slack;
  });
}

inline Feasibility scalar_feasibility(const WeightedSample& s, double alpha,
                                      double v, Corollary c) {
  Feasibility out;
  out.gamma = gamma(s, c);
  out.beta = alpha + out.gamma;
  const double beta = out.beta;
  auto add = [&](std::string name, bool value, bool required = true) {
    out.flags.push_back({std::move(name), value, required});
  };
  std::optional<ScalarFunction> gate;
  switch (c) {
    case Corollary::KyFan:
      add("alpha_range", alpha > 1);
      add("v_range", v > 0 && v <= 0.5);
      add("domain", all_within(s.a(), 0, 0.5) &&
                        std::none_of(s.a().begin(), s.a().end(),
                                     [](double x) { return x == 0; }));
      gate = try_make([&] { return ScalarFunction::kyfan_gate(alpha); });
      add("beta_range", alpha > 1 && alpha <= beta && beta <= alpha + 1);
      break;
    case Corollary::AmGm:
      add("alpha_range", alpha > 1);
      add("v_range", v > 0 && v <= 1);
      add("domain", std::all_of(s.a().begin(), s.a().end(),
                                [](double x) { return x > 0 && x <= 1; }));
      gate = try_make([&] { return ScalarFunction::power_gate(alpha); });
      add("beta_range", alpha > 1 && alpha <= beta && beta <= alpha + 1);
      break;
    case Corollary::Chrystal:
      add("alpha_range", alpha > 0);
      add("v_range", v > 0 && v <= alpha);
      add("domain", std::all_of(s.a().begin(), s.a().end(),
                                [](double x) { return x > 0; }) &&
                        std::all_of(s.b().begin(), s.b().end(),
                                    [](double x) { return x > 0; }));
      gate = try_make([&] { return ScalarFunction::chrystal_gate(alpha, beta); });
      add("beta_range", alpha > 0 && alpha <= beta && beta <= 2 * alpha);
      break;
    case Corollary::HolderMcCarthy:
      throw InvalidArgument("HolderMcCarthy feasibility needs a matrix");
  }
  const auto lower = gate ? gate_at(*gate, v) : std::nullopt;
  out.gate_lower = lower.value_or(std::nan(""));
  const bool have = lower.has_value();
  if (c == Corollary::Chrystal) {
    // Both readings of which quantities live in [g(v), v].
    add("values_in_gate_interval",
        have && all_within(s.a(), *lower, v, kMembershipSlack) &&
            all_within(s.b(), *lower, v, kMembershipSlack));
    bool ratios = have;
    for (std::size_t i = 0; ratios && i < s.size(); ++i) {
      const double r = std::log(s.a()[i] / s.b()[i]);
      ratios = r >= *lower - kMembershipSlack && r <= v + kMembershipSlack;
    }
    add("log_ratio_in_gate_interval", ratios, false);
  } else {
    add("values_in_gate_interval",
        have && all_within(s.a(), *lower, v, kMembershipSlack));
  }
  return out;
}

}  // namespace detail

/// Post hoc feasibility: gamma comes from the sample, beta = alpha + gamma,
/// then every clause is checked against the gamma-dependent interval.
inline Feasibility feasible(const WeightedSample& s, double alpha, double v,
                            Corollary c) {
  return detail::scalar_feasibility(s, alpha, v, c);
}

inline Feasibility feasible(const SpectralDecomposition<double>& d, double p,
                            double alpha, double v) {
  Feasibility out;
  out.gamma = d.spread();
  out.beta = alpha + out.gamma;
  const double beta = out.beta;
  out.flags.push_back({"alpha_range", alpha > 0, true});
  out.flags.push_back({"v_range", v > 0 && v <= alpha, true});
  out.flags.push_back({"p_range", p > 1, true});
  out.flags.push_back({"domain", d.eigenvalues.front() > 0, true});
  out.flags.push_back(
      {"beta_range", alpha > 0 && alpha <= beta && beta <= 2 * alpha, true});
  const auto gate = detail::try_make(
      [&] { return ScalarFunction::root_gate(alpha, beta, p); });
  const auto lower = gate ? detail::gate_at(*gate, v) : std::nullopt;
  out.gate_lower = lower.value_or(std::nan(""));
  out.flags.push_back(
      {"spectrum_in_gate_interval",
       lower && detail::all_within(d.eigenvalues, *lower, v, kMembershipSlack),
       true});
  return out;
}

inline Feasibility feasible(const SymmetricMatrix<double>& A, double p,
                            double alpha, double v) {
  return feasible(spectral_decompose(A), p, alpha, v);
}

/// Three chain terms at working precision.
template <class Real>
struct ChainTerms {
  Real lhs;
  Real mid;
  Real rhs;
  Real gamma;
  Real beta;
};

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

template <class Real>
Real weighted_log_sum(const WeightedSample& s, auto&& term) {
  Real sum(0);
  for (std::size_t i = 0; i < s.size(); ++i) sum += Real(s.q()[i]) * term(i);
  return sum;
}

}  // namespace detail

template <class Real = double>
ChainTerms<Real> kyfan_terms(const WeightedSample& s, double alpha) {
  using std::exp;
  using std::log;
  for (double x : s.a()) detail::require(x > 0 && x <= 0.5, "KyFan needs a_i in (0, 1/2]");
  ChainTerms<Real> t;
  t.gamma = Real(std::ranges::max(s.a())) - Real(std::ranges::min(s.a()));
  t.beta = Real(alpha) + t.gamma;
  Real num(0), den(0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Real a(s.a()[i]);
    num += Real(s.q()[i]) * (Real(1) - a);
    den += Real(s.q()[i]) * a;
  }
  t.lhs = num / den;
  const Real log_rhs = detail::weighted_log_sum<Real>(s, [&](std::size_t i) {
    const Real a(s.a()[i]);
    return Real(detail::log1p(Real(-a)) - log(a));
  });
  t.rhs = exp(log_rhs);
  t.mid = exp(Real(alpha) / t.beta * log_rhs);
  return t;
}

template <class Real = double>
ChainTerms<Real> amgm_terms(const WeightedSample& s, double alpha) {
  using std::exp;
  using std::log;
  for (double x : s.a()) detail::require(x > 0, "AmGm needs positive a_i");
  ChainTerms<Real> t;
  t.gamma = Real(std::ranges::max(s.a())) - Real(std::ranges::min(s.a()));
  t.beta = Real(alpha) + t.gamma;
  const Real log_geo = detail::weighted_log_sum<Real>(
      s, [&](std::size_t i) { return Real(log(Real(s.a()[i]))); });
  t.lhs = exp(log_geo);
  t.mid = exp(Real(alpha) / t.beta * log_geo);
  t.rhs = detail::weighted_log_sum<Real>(s, [&](std::size_t i) { return Real(s.a()[i]); });
  return t;
}

template <class Real = double>
ChainTerms<Real> chrystal_terms(const WeightedSample& s, double alpha) {
  using std::exp;
  using std::log;
  if (!s.has_b()) throw InvalidArgument("Chrystal sample needs b values");
  for (std::size_t i = 0; i < s.size(); ++i) {
    detail::require(s.a()[i] > 0 && s.b()[i] > 0, "Chrystal needs positive a_i, b_i");
  }
  ChainTerms<Real> t;
  {
    Real lo(s.a()[0]), hi(s.a()[0]);
    for (double x : s.a()) lo = std::min(lo, Real(x)), hi = std::max(hi, Real(x));
    Real blo(s.b()[0]), bhi(s.b()[0]);
    for (double x : s.b()) blo = std::min(blo, Real(x)), bhi = std::max(bhi, Real(x));
    t.gamma = std::max({Real(hi - lo), Real(bhi - blo), Real(hi - blo), Real(bhi - lo)});
  }
  t.beta = Real(alpha) + t.gamma;
  const Real k = Real(alpha) / t.beta;
  Real log_a(0), log_b(0), log_mid(0), log_rhs(0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Real q(s.q()[i]);
    const Real la = log(Real(s.a()[i]));
    const Real lb = log(Real(s.b()[i]));
    const Real lab = log(Real(Real(s.a()[i]) + Real(s.b()[i])));
    log_a += q * la;
    log_b += q * lb;
    // (a+b)^k / b^(k-1)
    log_mid += q * (k * lab - (k - Real(1)) * lb);
    log_rhs += q * lab;
  }
  t.lhs = exp(log_a) + exp(log_b);
  t.mid = exp(log_mid);
  t.rhs = exp(log_rhs);
  return t;
}

/// Chrystal chain through the substitution c_i = ln(a_i / b_i): the scalar
/// softplus chain, exponentiated and scaled by prod b_i^q_i.
template <class Real = double>
ChainTerms<Real> chrystal_terms_substituted(const WeightedSample& s, double alpha) {
  using std::exp;
  using std::log;
  ChainTerms<Real> t = chrystal_terms<Real>(s, alpha);
  Real mean_c(0), mean_sp(0), log_b(0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Real q(s.q()[i]);
    const Real c = log(Real(s.a()[i])) - log(Real(s.b()[i]));
    mean_c += q * c;
    mean_sp += q * detail::log1p(Real(exp(c)));
    log_b += q * log(Real(s.b()[i]));
  }
  const Real scale = exp(log_b);
  t.lhs = scale * (Real(1) + exp(mean_c));
  t.mid = scale * exp(Real(alpha) / t.beta * mean_sp);
  t.rhs = scale * exp(mean_sp);
  return t;
}

template <class Real = double>
ChainTerms<Real> hm_terms(const SymmetricMatrix<double>& A, const UnitVector<double>& x,
                          double p, double alpha,
                          const SpectralDecomposition<double>* seed = nullptr) {
  using std::pow;
  if (!(p > 1)) throw InvalidArgument("HolderMcCarthy needs p > 1");
  if (A.dim() != x.dim()) throw DimensionMismatch("matrix and vector dimensions differ");
  const auto base = seed ? *seed : spectral_decompose(A);
  const auto f = ScalarFunction::power_target(p);
  ChainTerms<Real> t;
  auto fill = [&](const SymmetricMatrix<Real>& Ar, const SpectralDecomposition<Real>& d,
                  const UnitVector<Real>& xr) {
    if (!(d.eigenvalues.front() > 0)) {
      throw SpectrumDomainError("HolderMcCarthy needs a positive spectrum",
                                {static_cast<double>(d.eigenvalues.front())});
    }
    t.gamma = d.spread();
    t.beta = Real(alpha) + t.gamma;
    t.lhs = pow(quadratic_form(Ar, xr), Real(p));
    t.rhs = spectral_expansion(f, d, xr);
    t.mid = Real(alpha) / t.beta * t.rhs;
  };
  if constexpr (std::is_same_v<Real, double>) {
    fill(A, base, x);
  } else {
    const auto Ar = A.cast<Real>();
    fill(Ar, spectral_decompose(Ar, base.eigenvectors), x.cast<Real>());
  }
  return t;
}

/// How M(h) for the chains' weight was taken; both give alpha / beta.
enum class MConvention { OpenInterval, ClosedInterval };

inline std::string_view convention_name(MConvention m) {
  return m == MConvention::OpenInterval ? "inf over (0,1)" : "inf over [0,1]";
}

struct ChainReport {
  Corollary corollary = Corollary::AmGm;
  std::size_t n = 0;
  double alpha = 0, v = 0;
  std::optional<double> p;
  double gamma = 0, beta = 0;
  double lhs = 0, mid = 0, rhs = 0;
  double margin1 = 0;  // mid - lhs
  double margin2 = 0;  // rhs - mid
  Feasibility feasibility;
  MConvention convention = MConvention::OpenInterval;

  bool feasible() const { return feasibility.all(); }
  double min_margin() const { return std::min(margin1, margin2); }
  // Classical outer inequality lhs <= rhs.
  double outer_margin() const { return rhs - lhs; }
};

namespace detail {

inline ChainReport make_report(Corollary c, std::size_t n, double alpha, double v,
                               const ChainTerms<double>& t, Feasibility f,
                               MConvention m) {
  ChainReport r;
  r.corollary = c;
  r.n = n;
  r.alpha = alpha;
  r.v = v;
  r.gamma = t.gamma;
  r.beta = t.beta;
  r.lhs = t.lhs;
  r.mid = t.mid;
  r.rhs = t.rhs;
  r.margin1 = r.mid - r.lhs;
  r.margin2 = r.rhs - r.mid;
  r.feasibility = std::move(f);
  r.convention = m;
  return r;
}

}  // namespace detail

inline ChainReport kyfan_chain(const WeightedSample& s, double alpha, double v,
                               MConvention m = MConvention::OpenInterval) {
  return detail::make_report(Corollary::KyFan, s.size(), alpha, v,
                             kyfan_terms(s, alpha),
                             feasible(s, alpha, v, Corollary::KyFan), m);
}

inline ChainReport amgm_chain(const WeightedSample& s, double alpha, double v,
                              MConvention m = MConvention::OpenInterval) {
  return detail::make_report(Corollary::AmGm, s.size(), alpha, v,
                             amgm_terms(s, alpha),
                             feasible(s, alpha, v, Corollary::AmGm), m);
}

inline ChainReport chrystal_chain(const WeightedSample& s, double alpha, double v,
                                  MConvention m = MConvention::OpenInterval) {
  return detail::make_report(Corollary::Chrystal, s.size(), alpha, v,
                             chrystal_terms(s, alpha),
                             feasible(s, alpha, v, Corollary::Chrystal), m);
}

inline ChainReport hm_chain(const SymmetricMatrix<double>& A, const UnitVector<double>& x,
                            double p, double alpha, double v,
                            MConvention m = MConvention::OpenInterval) {
  const auto d = spectral_decompose(A);
  auto r = detail::make_report(Corollary::HolderMcCarthy, A.dim(), alpha, v,
                               hm_terms<double>(A, x, p, alpha, &d),
                               feasible(d, p, alpha, v), m);
  r.p = p;
  return r;
}

inline ChainReport chain(Corollary c, const WeightedSample& s, double alpha, double v,
                         MConvention m = MConvention::OpenInterval) {
  switch (c) {
    case Corollary::KyFan: return kyfan_chain(s, alpha, v, m);
    case Corollary::AmGm: return amgm_chain(s, alpha, v, m);
    case Corollary::Chrystal: return chrystal_chain(s, alpha, v, m);
    case Corollary::HolderMcCarthy: break;
  }
  throw InvalidArgument("HolderMcCarthy chain needs a matrix");
}

template <class Real = double>
ChainTerms<Real> chain_terms(Corollary c, const WeightedSample& s, double alpha) {
  switch (c) {
    case Corollary::KyFan: return kyfan_terms<Real>(s, alpha);
    case Corollary::AmGm: return amgm_terms<Real>(s, alpha);
    case Corollary::Chrystal: return chrystal_terms<Real>(s, alpha);
    case Corollary::HolderMcCarthy: break;
  }
  throw InvalidArgument("HolderMcCarthy chain needs a matrix");
}

}  // namespace hcvx
