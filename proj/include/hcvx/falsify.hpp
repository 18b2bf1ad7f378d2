#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "hcvx/convexity.hpp"
#include "hcvx/errors.hpp"
#include "hcvx/functions.hpp"
#include "hcvx/gate.hpp"
#include "hcvx/opcalc.hpp"
#include "hcvx/parallel.hpp"
#include "hcvx/precision.hpp"
#include "hcvx/refined.hpp"

namespace hcvx {

inline constexpr double kCandidateThreshold = -1e-10;
inline constexpr double kConfirmThreshold = -1e-6;

// ---------------------------------------------------------------------------
// Counter-based generator: draw i of a campaign depends only on (seed, i).

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

class DrawRng {
 public:
  DrawRng(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed;
    const std::uint64_t a = detail::splitmix64(s);
    std::uint64_t t = index ^ a;
    state_ = detail::splitmix64(t);
  }

  std::uint64_t next() { return detail::splitmix64(state_); }

  /// Uniform on the open interval (0, 1).
  double unit() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  std::size_t integer(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(next() % (hi - lo + 1));
  }

  double normal() {
    if (spare_) {
      const double z = *spare_;
      spare_.reset();
      return z;
    }
    const double r = std::sqrt(-2.0 * std::log(unit()));
    const double theta = 2.0 * pi<double>() * unit();
    spare_ = r * std::sin(theta);
    return r * std::cos(theta);
  }

 private:
  std::uint64_t state_ = 0;
  std::optional<double> spare_;
};

/// Parameter range; endpoints are never drawn. Log-uniform ranges with
/// lo = 0 start at hi * 1e-6.
struct Range {
  double lo = 0.0;
  double hi = 1.0;
  bool log_uniform = false;

  static constexpr double kLogFloor = 1e-6;

  double draw(DrawRng& rng, double cap_lo = -Interval::kInf,
              double cap_hi = Interval::kInf) const {
    const double a = std::max(lo, cap_lo);
    const double b = std::min(hi, cap_hi);
    if (!(a < b)) throw EmptyRegion("parameter range is empty");
    if (!log_uniform) return rng.uniform(a, b);
    const double floor = a > 0 ? a : b * kLogFloor;
    return std::exp(rng.uniform(std::log(floor), std::log(b)));
  }

  friend bool operator==(const Range&, const Range&) = default;
};

// ---------------------------------------------------------------------------
// Lemma fixtures: (f, g, h) triples known to be conditionally h-convex.

struct LemmaSetup {
  ScalarFunction f;
  ScalarFunction g;
  ScalarFunction h;
};

inline LemmaSetup lemma_setup(Corollary which, double alpha, double beta, double p = 2.0) {
  const auto h = ScalarFunction::exp_weight(alpha, beta);
  switch (which) {
    case Corollary::KyFan:
      return {ScalarFunction::of(Family::LogitTarget), ScalarFunction::kyfan_gate(alpha), h};
    case Corollary::AmGm:
      return {ScalarFunction::of(Family::NegLogTarget), ScalarFunction::power_gate(alpha), h};
    case Corollary::Chrystal:
      return {ScalarFunction::of(Family::SoftplusTarget),
              ScalarFunction::chrystal_gate(alpha, beta), h};
    case Corollary::HolderMcCarthy:
      return {ScalarFunction::power_target(p), ScalarFunction::root_gate(alpha, beta, p), h};
  }
  throw InvalidArgument("unknown lemma");
}

/// Stated parameter ranges of the lemma behind each corollary.
inline bool lemma_parameters_ok(Corollary which, double alpha, double beta, double v,
                                double p = 2.0) {
  switch (which) {
    case Corollary::KyFan:
      return alpha > 1 && alpha <= beta && beta <= alpha + 1 && v > 0 && v <= 0.5;
    case Corollary::AmGm:
      return alpha > 1 && alpha <= beta && beta <= alpha + 1 && v > 0 && v <= 1;
    case Corollary::Chrystal:
      return alpha > 0 && alpha <= beta && beta <= 2 * alpha && v > 0;
    case Corollary::HolderMcCarthy:
      return alpha > 0 && alpha <= beta && beta <= 2 * alpha && v >= 0 && p > 1;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Instances. Each holds everything needed to re-evaluate it.

enum class ChainLink { Refined, Outer };

inline std::string_view chain_link_name(ChainLink l) {
  return l == ChainLink::Refined ? "refined" : "outer";
}

inline ChainLink parse_chain_link(std::string_view s) {
  if (s == "refined") return ChainLink::Refined;
  if (s == "outer") return ChainLink::Outer;
  throw InvalidArgument("unknown chain link '" + std::string(s) + "'");
}

struct JensenInstance {
  ScalarFunction f;
  ScalarFunction h;
  // Hypothesis gate; without one the spectrum only has to sit in f's domain.
  std::optional<ScalarFunction> g;
  double v = 0.0;
  // Lemma whose parameter ranges the instance claims.
  std::optional<Corollary> lemma;
  SymmetricMatrix<double> A;
  std::vector<double> x;
  JensenModeSpec mode;
  std::optional<JensenCoefficient> jc;
  // extra hypothesis of the per-lambda form: h(t)/t decreasing on (0, 1)
  bool require_decreasing_quotient = false;
};

struct ChainInstance {
  Corollary corollary = Corollary::AmGm;
  WeightedSample sample;
  double alpha = 0.0;
  double v = 0.0;
  ChainLink link = ChainLink::Refined;
};

struct HMInstance {
  SymmetricMatrix<double> A;
  std::vector<double> x;
  double p = 2.0;
  double alpha = 0.0;
  double v = 0.0;
  ChainLink link = ChainLink::Refined;
};

struct CertifyInstance {
  Corollary lemma = Corollary::AmGm;
  double alpha = 0.0;
  double beta = 0.0;
  double p = 2.0;
  double v = 0.0;
  GridSize grid;
  int refine_iterations = kDefaultRefineIterations;
};

using Instance = std::variant<JensenInstance, ChainInstance, HMInstance, CertifyInstance>;

struct Evaluation {
  double margin = 0.0;
  Feasibility feasibility;
  // Named intermediate values, in a fixed order.
  std::vector<std::pair<std::string, double>> details;
};

namespace detail {

inline constexpr std::size_t kQuotientGrid = 64;

/// h(t)/t strictly decreasing on a uniform grid over (0, 1).
inline bool quotient_decreasing(const ScalarFunction& h) {
  double prev = Interval::kInf;
  for (std::size_t k = 1; k <= kQuotientGrid; ++k) {
    const double t = static_cast<double>(k) / (kQuotientGrid + 1);
    const double q = h(t) / t;
    if (!(q < prev)) return false;
    prev = q;
  }
  return true;
}

inline Feasibility jensen_feasibility(const JensenInstance& in,
                                      const SpectralDecomposition<double>& d) {
  Feasibility out;
  const auto& mu = d.eigenvalues;
  const Interval dom = in.f.domain();
  out.flags.push_back({"spectrum_in_domain",
                       std::all_of(mu.begin(), mu.end(),
                                   [&](double m) {
                                     return dom.contains_with_slack(m, kSpectrumSlack);
                                   }),
                       true});
  if (in.g) {
    bool ok = false;
    try {
      const auto gi = gate_interval(*in.g, in.v, dom);
      out.gate_lower = gi.interval.lo();
      ok = detail::all_within(mu, gi.interval.lo(), gi.interval.hi(), kSpectrumSlack);
    } catch (const Error&) {
      out.gate_lower = std::nan("");
    }
    out.flags.push_back({"spectrum_in_gate_interval", ok, true});
  }
  if (in.lemma) {
    const double alpha = in.h.params().count("alpha") ? in.h.param("alpha") : 0.0;
    const double beta = in.h.params().count("beta") ? in.h.param("beta") : 0.0;
    const double p = in.f.params().count("p") ? in.f.param("p") : 2.0;
    out.flags.push_back(
        {"lemma_parameters", lemma_parameters_ok(*in.lemma, alpha, beta, in.v, p), true});
  }
  if (in.require_decreasing_quotient || in.mode.mode == JensenMode::HalfBound) {
    out.flags.push_back({"h_over_t_decreasing", quotient_decreasing(in.h), true});
  }
  return out;
}

inline double link_margin(ChainLink link, double lhs, double mid, double rhs) {
  if (link == ChainLink::Outer) return rhs - lhs;
  return std::min(mid - lhs, rhs - mid);
}

template <class Real>
Real link_margin(ChainLink link, const ChainTerms<Real>& t) {
  if (link == ChainLink::Outer) return t.rhs - t.lhs;
  const Real m1 = t.mid - t.lhs;
  const Real m2 = t.rhs - t.mid;
  return m1 < m2 ? m1 : m2;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

inline CertifyOptions certify_options(const CertifyInstance& in) {
  CertifyOptions o;
  o.grid = in.grid;
  o.refine_iterations = in.refine_iterations;
  o.confirm = false;
  return o;
}

}  // namespace detail

/// Double-precision evaluation. Throws on infeasible input only through the
/// underlying evaluators; campaigns check feasibility first.
inline Evaluation evaluate_instance(const Instance& instance) {
  return std::visit(
      detail::Overloaded{
          [](const JensenInstance& in) {
            Evaluation e;
            const auto d = spectral_decompose(in.A);
            e.feasibility = detail::jensen_feasibility(in, d);
            if (!e.feasibility.all()) return e;
            const auto v = jensen_verify(in.f, in.h, in.A, d, UnitVector<double>(in.x),
                                         in.mode, in.jc);
            e.margin = v.margin;
            e.details = {{"quadratic", v.quadratic}, {"lhs", v.lhs}, {"form", v.form},
                         {"rhs_factor", v.rhs_factor}, {"rhs", v.rhs}};
            return e;
          },
          [](const ChainInstance& in) {
            Evaluation e;
            e.feasibility = feasible(in.sample, in.alpha, in.v, in.corollary);
            if (!e.feasibility.all()) return e;
            const auto t = chain_terms<double>(in.corollary, in.sample, in.alpha);
            e.margin = detail::link_margin(in.link, t.lhs, t.mid, t.rhs);
            e.details = {{"gamma", t.gamma}, {"beta", t.beta}, {"lhs", t.lhs},
                         {"mid", t.mid}, {"rhs", t.rhs}};
            return e;
          },
          [](const HMInstance& in) {
            Evaluation e;
            const auto d = spectral_decompose(in.A);
            e.feasibility = feasible(d, in.p, in.alpha, in.v);
            if (!e.feasibility.all()) return e;
            const auto t =
                hm_terms<double>(in.A, UnitVector<double>(in.x), in.p, in.alpha, &d);
            e.margin = detail::link_margin(in.link, t.lhs, t.mid, t.rhs);
            e.details = {{"gamma", t.gamma}, {"beta", t.beta}, {"lhs", t.lhs},
                         {"mid", t.mid}, {"rhs", t.rhs}};
            return e;
          },
          [](const CertifyInstance& in) {
            Evaluation e;
            e.feasibility.flags.push_back(
                {"lemma_parameters",
                 lemma_parameters_ok(in.lemma, in.alpha, in.beta, in.v, in.p), true});
            if (!e.feasibility.all()) return e;
            const auto s = lemma_setup(in.lemma, in.alpha, in.beta, in.p);
            const auto c = certify(s.f, s.g, s.h, in.v, detail::certify_options(in));
            e.margin = c.min_value;
            e.details = {{"u", c.arg_u}, {"lambda", c.arg_lambda},
                         {"gate_lower", c.gate.interval.lo()}};
            return e;
          }},
      instance);
}

/// The same margin at 50 significant digits. `e` is the double evaluation,
/// which supplies the certificate arg-min for CertifyInstance.
inline HighPrecision confirm_margin(const Instance& instance, const Evaluation& e) {
  using HP = HighPrecision;
  return std::visit(
      detail::Overloaded{
          [](const JensenInstance& in) -> HP {
            const auto d = spectral_decompose(in.A);
            const auto Ahp = in.A.cast<HP>();
            const auto dhp = spectral_decompose(Ahp, d.eigenvectors);
            const UnitVector<HP> x(std::vector<HP>(in.x.begin(), in.x.end()));
            return jensen_verify(in.f, in.h, Ahp, dhp, x, in.mode, in.jc).margin;
          },
          [](const ChainInstance& in) -> HP {
            return detail::link_margin(
                in.link, chain_terms<HP>(in.corollary, in.sample, in.alpha));
          },
          [](const HMInstance& in) -> HP {
            return detail::link_margin(
                in.link, hm_terms<HP>(in.A, UnitVector<double>(in.x), in.p, in.alpha));
          },
          [&](const CertifyInstance& in) -> HP {
            const auto s = lemma_setup(in.lemma, in.alpha, in.beta, in.p);
            double u = 0, lam = 0;
            for (const auto& [k, val] : e.details) {
              if (k == "u") u = val;
              if (k == "lambda") lam = val;
            }
            return gap<HP>(s.f, s.h, HP(in.v), HP(u), HP(lam));
          }},
      instance);
}

enum class WitnessTag { Confirmed, FloatNoise, BelowThreshold };

inline std::string_view witness_tag_name(WitnessTag t) {
  switch (t) {
    case WitnessTag::Confirmed: return "Confirmed";
    case WitnessTag::FloatNoise: return "FloatNoise";
    case WitnessTag::BelowThreshold: return "BelowThreshold";
  }
  return "?";
}

struct Witness {
  std::uint64_t draw_index = 0;
  Instance instance;
  double margin_double = 0.0;
  std::string margin_confirmed;  // 50 significant digits
  bool confirmed = false;
  WitnessTag tag = WitnessTag::FloatNoise;
  Feasibility feasibility;
  std::vector<std::pair<std::string, double>> details;
};

/// High-precision re-evaluation of a candidate. A sign disagreement is float
/// noise; a margin above -1e-10 (double) or -1e-6 (confirmed) is demoted.
inline Witness confirm(const Instance& instance, const Evaluation& e,
                       std::uint64_t draw_index = 0) {
  if (!e.feasibility.all()) {
    throw InvalidArgument("candidate violates a feasibility flag; not confirmed");
  }
  Witness w;
  w.draw_index = draw_index;
  w.instance = instance;
  w.margin_double = e.margin;
  w.feasibility = e.feasibility;
  w.details = e.details;
  const HighPrecision m = confirm_margin(instance, e);
  w.margin_confirmed = to_string(m);
  if (!(m < 0)) {
    w.tag = WitnessTag::FloatNoise;
  } else if (!(e.margin < kCandidateThreshold) || !(m < HighPrecision(kConfirmThreshold))) {
    w.tag = WitnessTag::BelowThreshold;
  } else {
    w.tag = WitnessTag::Confirmed;
  }
  w.confirmed = w.tag == WitnessTag::Confirmed;
  return w;
}

inline Witness confirm(const Instance& instance) {
  return confirm(instance, evaluate_instance(instance));
}

// ---------------------------------------------------------------------------
// Campaigns.

enum class Target {
  Thm21,
  PerLambda,
  HalfBound,
  Cor21Counterexample,
  KyFan,
  AmGm,
  Chrystal,
  HolderMcCarthy,
  LemmaCertificates
};

inline constexpr Target kAllTargets[] = {
    Target::Thm21,  Target::PerLambda, Target::HalfBound,
    Target::Cor21Counterexample, Target::KyFan, Target::AmGm,
    Target::Chrystal, Target::HolderMcCarthy, Target::LemmaCertificates};

inline std::string_view target_name(Target t) {
  switch (t) {
    case Target::Thm21: return "Thm21";
    case Target::PerLambda: return "PerLambda";
    case Target::HalfBound: return "HalfBound";
    case Target::Cor21Counterexample: return "Cor21Counterexample";
    case Target::KyFan: return "KyFan";
    case Target::AmGm: return "AmGm";
    case Target::Chrystal: return "Chrystal";
    case Target::HolderMcCarthy: return "HolderMcCarthy";
    case Target::LemmaCertificates: return "LemmaCertificates";
  }
  return "?";
}

inline Target parse_target(std::string_view s) {
  for (auto t : kAllTargets) {
    if (target_name(t) == s) return t;
  }
  throw InvalidArgument("unknown campaign target '" + std::string(s) + "'");
}

/// Operator-Jensen draws either use the lemma fixtures or the classical
/// sub-case (h(t) = t with a convex target on its whole domain).
enum class JensenFixture { Lemmas, Classical };

inline std::string_view fixture_name(JensenFixture f) {
  return f == JensenFixture::Lemmas ? "lemmas" : "classical";
}

inline JensenFixture parse_fixture(std::string_view s) {
  if (s == "lemmas") return JensenFixture::Lemmas;
  if (s == "classical") return JensenFixture::Classical;
  throw InvalidArgument("unknown fixture '" + std::string(s) + "'");
}

struct Region {
  Range alpha{0.0, 3.0};
  // beta = alpha + fraction * (largest admissible spread)
  Range beta_fraction{0.0, 1.0};
  Range v{0.0, 1.0, true};
  Range lambda{0.0, 1.0};
  Range p{1.0, 4.0};
  // Cor21Counterexample
  Range a{0.0, 10.0, true};
  Range beta{0.0, 1.0};
  // sample size for chains, matrix dimension for operator draws
  std::size_t n_min = 2;
  std::size_t n_max = 5;
  std::vector<Corollary> lemmas{Corollary::KyFan, Corollary::AmGm, Corollary::Chrystal,
                                Corollary::HolderMcCarthy};
  JensenFixture fixture = JensenFixture::Lemmas;

  friend bool operator==(const Region&, const Region&) = default;
};

inline Region default_region(Target t) {
  Region r;
  switch (t) {
    case Target::Cor21Counterexample:
      r.lambda = {0.5, 1.0};
      r.n_min = r.n_max = 2;
      break;
    case Target::AmGm:
      r.alpha = {1.0, 3.0};
      break;
    case Target::Chrystal:
    case Target::HolderMcCarthy:
      r.v = {0.0, 3.0, true};
      break;
    case Target::LemmaCertificates:
      r.n_min = r.n_max = 1;
      break;
    default:
      break;
  }
  return r;
}

struct Campaign {
  Target target = Target::AmGm;
  Region region;
  std::uint64_t samples = 1000;
  std::uint64_t seed = 42;
  ChainLink link = ChainLink::Refined;
  // Full witnesses kept in the report; every candidate is still confirmed.
  std::size_t max_witnesses = 20;
  // Draw budget is samples * max_draw_factor.
  std::uint64_t max_draw_factor = 50;
  // Grid for LemmaCertificates draws.
  GridSize grid;
  int refine_iterations = kDefaultRefineIterations;

  friend bool operator==(const Campaign&, const Campaign&) = default;
};

inline Campaign make_campaign(Target t, std::uint64_t samples, std::uint64_t seed) {
  Campaign c;
  c.target = t;
  c.region = default_region(t);
  c.samples = samples;
  c.seed = seed;
  return c;
}

namespace detail {

inline std::vector<double> random_unit_components(DrawRng& rng, std::size_t n) {
  std::vector<double> c(n);
  double norm = 0;
  do {
    norm = 0;
    for (auto& v : c) {
      v = rng.normal();
      norm += v * v;
    }
  } while (!(norm > 1e-300));
  norm = std::sqrt(norm);
  for (auto& v : c) v /= norm;
  return c;
}

/// Q diag(mu) Q^T with Q a Gram-Schmidt orthonormalized Gaussian matrix.
inline SymmetricMatrix<double> random_with_spectrum(DrawRng& rng,
                                                    const std::vector<double>& mu) {
  const std::size_t n = mu.size();
  DenseMatrix<double> q(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q(i, j) = rng.normal();
  for (std::size_t k = 0; k < n; ++k) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < k; ++j) {
        double dot = 0;
        for (std::size_t i = 0; i < n; ++i) dot += q(i, j) * q(i, k);
        for (std::size_t i = 0; i < n; ++i) q(i, k) -= dot * q(i, j);
      }
    }
    double norm = 0;
    for (std::size_t i = 0; i < n; ++i) norm += q(i, k) * q(i, k);
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) q(i, k) /= norm;
  }
  SymmetricMatrix<double> A(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < n; ++k) s += q(i, k) * mu[k] * q(j, k);
      A.set(i, j, s);
    }
  }
  return A;
}

inline std::vector<double> random_weights(DrawRng& rng, std::size_t n) {
  if (n == 1) return {1.0};
  std::vector<double> q(n);
  double sum = 0;
  for (auto& w : q) {
    w = 0.05 + rng.unit();
    sum += w;
  }
  for (auto& w : q) w /= sum;
  return q;
}

struct LemmaDraw {
  Corollary lemma;
  double alpha, beta, p, v;
};

inline LemmaDraw draw_lemma(DrawRng& rng, const Region& r) {
  if (r.lemmas.empty()) throw EmptyRegion("no lemmas in region");
  LemmaDraw d;
  d.lemma = r.lemmas[rng.integer(0, r.lemmas.size() - 1)];
  const bool steep = d.lemma == Corollary::KyFan || d.lemma == Corollary::AmGm;
  d.alpha = r.alpha.draw(rng, steep ? 1.0 : 0.0);
  // beta in [alpha, alpha + 1] or [alpha, 2 alpha]
  const double span = steep ? 1.0 : d.alpha;
  d.beta = d.alpha + span * r.beta_fraction.draw(rng, 0.0, 1.0);
  d.p = d.lemma == Corollary::HolderMcCarthy ? r.p.draw(rng, 1.0) : 2.0;
  const double v_cap = d.lemma == Corollary::KyFan ? 0.5
                       : d.lemma == Corollary::AmGm ? 1.0
                                                     : Interval::kInf;
  d.v = r.v.draw(rng, 0.0, v_cap);
  return d;
}

inline std::optional<JensenCoefficient> coefficient_for(const ScalarFunction& h,
                                                         const JensenModeSpec& mode) {
  if (mode.mode != JensenMode::InfimumM) return std::nullopt;
  return jcoeff(h, Interval::open(0.0, 1.0));
}

inline const ScalarFunction& classical_fixture(std::size_t k) {
  static const ScalarFunction fixtures[] = {
      ScalarFunction::power_target(2.0), ScalarFunction::of(Family::ExpTarget),
      ScalarFunction::of(Family::ExpDecayTarget, Interval::real_line()),
      ScalarFunction::of(Family::NegLogTarget, Interval::open(0, Interval::kInf))};
  return fixtures[k % 4];
}

inline Instance draw_jensen(DrawRng& rng, const Campaign& c, JensenModeSpec mode) {
  const Region& r = c.region;
  const std::size_t n = rng.integer(r.n_min, r.n_max);
  JensenInstance in;
  in.mode = mode;
  if (r.fixture == JensenFixture::Classical) {
    in.f = classical_fixture(rng.integer(0, 3));
    in.h = ScalarFunction::identity_weight();
    std::vector<double> mu(n);
    for (auto& m : mu) m = rng.uniform(0.01, 4.0);
    in.A = random_with_spectrum(rng, mu);
    in.x = random_unit_components(rng, n);
    in.jc = coefficient_for(in.h, mode);
    return in;
  }
  const auto d = draw_lemma(rng, r);
  const auto s = lemma_setup(d.lemma, d.alpha, d.beta, d.p);
  in.f = s.f;
  in.g = s.g;
  in.h = s.h;
  in.v = d.v;
  in.lemma = d.lemma;
  double lo = d.v;
  try {
    lo = gate_interval(s.g, d.v, s.f.domain()).interval.lo();
  } catch (const Error&) {
    // left degenerate; feasibility reports the gate
  }
  std::vector<double> mu(n);
  for (auto& m : mu) m = lo + (d.v - lo) * rng.unit();
  in.A = random_with_spectrum(rng, mu);
  in.x = random_unit_components(rng, n);
  in.jc = coefficient_for(in.h, mode);
  return in;
}

inline Instance draw_cor21(DrawRng& rng, const Campaign& c) {
  const Region& r = c.region;
  const double a = r.a.draw(rng, 0.0);
  const double beta = r.beta.draw(rng, 0.0, 1.0);
  const double lambda = r.lambda.draw(rng, 0.0, 1.0);
  JensenInstance in;
  in.f = ScalarFunction::of(Family::ExpDecayTarget);
  in.h = ScalarFunction::power_weight(beta);
  in.A = SymmetricMatrix<double>::diagonal(std::vector{0.0, a});
  in.x = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  in.mode = {JensenMode::PerLambda, lambda};
  in.require_decreasing_quotient = true;
  return in;
}

inline Instance draw_chain(DrawRng& rng, const Campaign& c, Corollary which) {
  const Region& r = c.region;
  const std::size_t n = rng.integer(r.n_min, r.n_max);
  const auto q = random_weights(rng, n);
  switch (which) {
    case Corollary::KyFan:
    case Corollary::AmGm: {
      const double alpha = r.alpha.draw(rng, 1.0);
      const double v = r.v.draw(rng, 0.0, which == Corollary::KyFan ? 0.5 : 1.0);
      const double lo = which == Corollary::KyFan
                            ? ScalarFunction::kyfan_gate(alpha)(v)
                            : ScalarFunction::power_gate(alpha)(v);
      std::vector<double> a(n);
      for (auto& x : a) x = lo + (v - lo) * rng.unit();
      return ChainInstance{which, WeightedSample(a, q), alpha, v, c.link};
    }
    case Corollary::Chrystal: {
      // The gate interval depends on the spread, so draw a cluster of random
      // width below v and let feasibility decide.
      const double alpha = r.alpha.draw(rng, 0.0);
      const double v = r.v.draw(rng, 0.0, alpha);
      const double width = v * rng.unit();
      std::vector<double> a(n), b(n);
      for (auto& x : a) x = v - width * rng.unit();
      for (auto& x : b) x = v - width * rng.unit();
      return ChainInstance{which, WeightedSample(a, q, b), alpha, v, c.link};
    }
    case Corollary::HolderMcCarthy: {
      const double alpha = r.alpha.draw(rng, 0.0);
      const double v = r.v.draw(rng, 0.0, alpha);
      const double p = r.p.draw(rng, 1.0);
      const double width = v * rng.unit();
      std::vector<double> mu(n);
      for (auto& m : mu) m = v - width * rng.unit();
      HMInstance in;
      in.A = random_with_spectrum(rng, mu);
      in.x = random_unit_components(rng, n);
      in.p = p;
      in.alpha = alpha;
      in.v = v;
      in.link = c.link;
      return in;
    }
  }
  throw InvalidArgument("unknown corollary");
}

inline Instance draw_certify(DrawRng& rng, const Campaign& c) {
  const auto d = draw_lemma(rng, c.region);
  CertifyInstance in;
  in.lemma = d.lemma;
  in.alpha = d.alpha;
  in.beta = d.beta;
  in.p = d.p;
  in.v = d.v;
  in.grid = c.grid;
  in.refine_iterations = c.refine_iterations;
  return in;
}

}  // namespace detail

/// Draw i of campaign c. Depends only on (c, i).
inline Instance draw_instance(const Campaign& c, std::uint64_t index) {
  DrawRng rng(c.seed, index);
  switch (c.target) {
    case Target::Thm21:
      return detail::draw_jensen(rng, c, {JensenMode::InfimumM});
    case Target::PerLambda: {
      const double lambda = c.region.lambda.draw(rng, 0.0, 1.0);
      return detail::draw_jensen(rng, c, {JensenMode::PerLambda, lambda});
    }
    case Target::HalfBound:
      return detail::draw_jensen(rng, c, {JensenMode::HalfBound});
    case Target::Cor21Counterexample:
      return detail::draw_cor21(rng, c);
    case Target::KyFan:
      return detail::draw_chain(rng, c, Corollary::KyFan);
    case Target::AmGm:
      return detail::draw_chain(rng, c, Corollary::AmGm);
    case Target::Chrystal:
      return detail::draw_chain(rng, c, Corollary::Chrystal);
    case Target::HolderMcCarthy:
      return detail::draw_chain(rng, c, Corollary::HolderMcCarthy);
    case Target::LemmaCertificates:
      return detail::draw_certify(rng, c);
  }
  throw InvalidArgument("unknown target");
}

/// Fixed instance each campaign re-evaluates and publishes.
inline Instance reference_instance(Target t, ChainLink link = ChainLink::Refined) {
  auto lemma32 = [](JensenModeSpec mode) {
    JensenInstance in;
    const auto s = lemma_setup(Corollary::AmGm, 2.0, 2.16);
    in.f = s.f;
    in.g = s.g;
    in.h = s.h;
    in.v = 0.8;
    in.lemma = Corollary::AmGm;
    in.A = SymmetricMatrix<double>::diagonal(std::vector{0.64, 0.8});
    in.x = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    in.mode = mode;
    in.jc = detail::coefficient_for(in.h, mode);
    return in;
  };
  switch (t) {
    case Target::Thm21: return lemma32({JensenMode::InfimumM});
    case Target::PerLambda: return lemma32({JensenMode::PerLambda, 0.99});
    case Target::HalfBound: return lemma32({JensenMode::HalfBound});
    case Target::Cor21Counterexample: {
      JensenInstance in;
      in.f = ScalarFunction::of(Family::ExpDecayTarget);
      in.h = ScalarFunction::power_weight(0.5);
      in.A = SymmetricMatrix<double>::diagonal(std::vector{0.0, 1.0});
      in.x = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
      in.mode = {JensenMode::PerLambda, 0.75};
      in.require_decreasing_quotient = true;
      return in;
    }
    case Target::KyFan:
      return ChainInstance{Corollary::KyFan, WeightedSample::equal_weights({0.45, 0.5}), 2.0,
                           0.5, link};
    case Target::AmGm:
      return ChainInstance{Corollary::AmGm, WeightedSample::equal_weights({0.64, 0.8}), 2.0,
                           0.8, link};
    case Target::Chrystal:
      return ChainInstance{Corollary::Chrystal,
                           WeightedSample::equal_weights({0.9, 1.0}, {0.95, 1.0}), 2.0, 1.0,
                           link};
    case Target::HolderMcCarthy: {
      HMInstance in;
      in.A = SymmetricMatrix<double>::diagonal(std::vector{0.64, 0.8});
      in.x = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
      in.p = 2.0;
      in.alpha = 2.0;
      in.v = 0.8;
      in.link = link;
      return in;
    }
    case Target::LemmaCertificates: {
      CertifyInstance in;
      in.lemma = Corollary::AmGm;
      in.alpha = 2.0;
      in.beta = 2.16;
      in.v = 0.8;
      return in;
    }
  }
  throw InvalidArgument("unknown target");
}

/// Evaluation of a single instance with its confirmed margin, for reports.
struct InstanceResult {
  Instance instance;
  Evaluation evaluation;
  std::string margin_confirmed;
  bool confirmed_negative = false;  // confirmed margin < -1e-6
};

inline InstanceResult evaluate_and_confirm(const Instance& instance) {
  InstanceResult r;
  r.instance = instance;
  r.evaluation = evaluate_instance(instance);
  const HighPrecision m = confirm_margin(instance, r.evaluation);
  r.margin_confirmed = to_string(m);
  r.confirmed_negative = m < HighPrecision(kConfirmThreshold);
  return r;
}

struct CampaignReport {
  Campaign campaign;
  std::uint64_t drawn = 0;
  std::uint64_t counted = 0;
  std::uint64_t rejected = 0;
  // Draws failing each required flag (a draw can fail several).
  std::map<std::string, std::uint64_t> rejections_by_flag;
  bool quota_met = false;
  double min_margin = Interval::kInf;
  std::optional<std::uint64_t> argmin_draw;
  std::optional<Instance> argmin_instance;
  std::uint64_t candidates = 0;
  std::uint64_t confirmed = 0;
  std::uint64_t float_noise = 0;
  std::uint64_t below_threshold = 0;
  std::vector<Witness> witnesses;
  InstanceResult reference;
  double wall_seconds = 0.0;

  std::string outcome() const {
    if (confirmed > 0) return "confirmed witness";
    return "no violation found at " + std::to_string(counted) + " samples";
  }
};

namespace detail {

struct DrawOutcome {
  bool feasible = false;
  std::vector<std::string> failed;
  double margin = 0.0;
  std::optional<Instance> instance;
  std::optional<Witness> witness;
};

inline constexpr std::size_t kCampaignBatch = 2048;

}  // namespace detail

/// Seeded campaign. Draws are evaluated in parallel batches and reduced in
/// draw order, so the report does not depend on the thread count.
inline CampaignReport run_campaign(const Campaign& c) {
  if (c.samples == 0) throw InvalidArgument("campaign needs at least one sample");
  if (c.region.n_min < 1 || c.region.n_min > c.region.n_max) {
    throw EmptyRegion("sample size range is empty");
  }
  const auto start = std::chrono::steady_clock::now();
  CampaignReport report;
  report.campaign = c;
  const std::uint64_t budget = c.samples * std::max<std::uint64_t>(1, c.max_draw_factor);

  std::vector<detail::DrawOutcome> outcomes;
  std::vector<Witness> kept_confirmed, kept_other;
  while (report.counted < c.samples && report.drawn < budget) {
    const std::uint64_t first = report.drawn;
    const std::uint64_t remaining = c.samples - report.counted;
    const std::size_t batch = static_cast<std::size_t>(std::min<std::uint64_t>(
        budget - first, std::max<std::uint64_t>(std::min<std::uint64_t>(remaining, detail::kCampaignBatch), 64)));
    outcomes.assign(batch, {});
    parallel_for(batch, [&](std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k) {
        auto& out = outcomes[k];
        const std::uint64_t index = first + k;
        Instance inst = draw_instance(c, index);
        const Evaluation ev = evaluate_instance(inst);
        out.feasible = ev.feasibility.all();
        if (!out.feasible) {
          for (const auto& f : ev.feasibility.flags) {
            if (f.required && !f.value) out.failed.push_back(f.name);
          }
          continue;
        }
        out.margin = ev.margin;
        if (ev.margin < kCandidateThreshold) out.witness = confirm(inst, ev, index);
        out.instance = std::move(inst);
      }
    });
    for (std::size_t k = 0; k < batch && report.counted < c.samples; ++k) {
      auto& out = outcomes[k];
      ++report.drawn;
      if (!out.feasible) {
        ++report.rejected;
        for (const auto& name : out.failed) ++report.rejections_by_flag[name];
        continue;
      }
      ++report.counted;
      if (out.margin < report.min_margin) {
        report.min_margin = out.margin;
        report.argmin_draw = first + k;
        report.argmin_instance = out.instance;
      }
      if (out.witness) {
        ++report.candidates;
        switch (out.witness->tag) {
          case WitnessTag::Confirmed: ++report.confirmed; break;
          case WitnessTag::FloatNoise: ++report.float_noise; break;
          case WitnessTag::BelowThreshold: ++report.below_threshold; break;
        }
        auto& keep = out.witness->confirmed ? kept_confirmed : kept_other;
        if (keep.size() < c.max_witnesses) keep.push_back(std::move(*out.witness));
      }
    }
  }
  if (report.counted == 0) {
    std::string stats;
    for (const auto& [k, n] : report.rejections_by_flag) {
      stats += " " + k + "=" + std::to_string(n);
    }
    throw EmptyRegion("feasibility rejected all " + std::to_string(report.drawn) +
                      " draws;" + stats);
  }
  report.quota_met = report.counted == c.samples;
  // Confirmed witnesses first, then demoted candidates, each in draw order.
  report.witnesses = std::move(kept_confirmed);
  for (auto& w : kept_other) {
    if (report.witnesses.size() >= c.max_witnesses) break;
    report.witnesses.push_back(std::move(w));
  }
  report.reference = evaluate_and_confirm(reference_instance(c.target, c.link));
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// ---------------------------------------------------------------------------

struct LambdaPoint {
  double lambda = 0.0;
  double margin = 0.0;
};

struct LambdaProfile {
  std::vector<LambdaPoint> points;
  double argmin_lambda = 0.0;
  double min_margin = Interval::kInf;
  // h(t)/t strictly decreasing over the profile grid
  bool quotient_decreasing = true;
  // Per-lambda inequality holds at every grid point.
  bool holds_everywhere = true;
};

/// Per-lambda margin on lambda = k / (points + 1), k = 1..points.
inline LambdaProfile lambda_profile(const ScalarFunction& f, const ScalarFunction& h,
                                    const SymmetricMatrix<double>& A,
                                    const UnitVector<double>& x, std::size_t points = 99) {
  if (points == 0) throw InvalidArgument("lambda profile needs at least one point");
  const auto d = spectral_decompose(A);
  LambdaProfile out;
  out.points.resize(points);
  double prev_quotient = Interval::kInf;
  for (std::size_t k = 0; k < points; ++k) {
    const double lambda = static_cast<double>(k + 1) / static_cast<double>(points + 1);
    const auto v = jensen_verify(f, h, A, d, x, {JensenMode::PerLambda, lambda});
    out.points[k] = {lambda, v.margin};
    if (v.margin < out.min_margin) {
      out.min_margin = v.margin;
      out.argmin_lambda = lambda;
    }
    if (v.margin < kCandidateThreshold) out.holds_everywhere = false;
    if (!(v.rhs_factor < prev_quotient)) out.quotient_decreasing = false;
    prev_quotient = v.rhs_factor;
  }
  return out;
}

}  // namespace hcvx
