#pragma once

// JSON encoding of the library's values. Non-finite numbers are written as
// the strings "inf", "-inf" and "nan"; finite doubles use the shortest
// representation that round-trips.

#include <cmath>
#include <initializer_list>
#include <limits>
#include <string>
#include <string_view>

#include "hcvx/convexity.hpp"
#include "hcvx/falsify.hpp"
#include "hcvx/functions.hpp"
#include "hcvx/interval.hpp"
#include "hcvx/matrix.hpp"
#include "hcvx/opcalc.hpp"
#include "hcvx/refined.hpp"
#include "json.hpp"

namespace hcvx {

using Json = nlohmann::ordered_json;

namespace io {

inline Json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline Json opt_num(const std::optional<double>& x) {
  return x ? num(*x) : Json(nullptr);
}

/// Number as it appears in JSON output; shared with the CSV writer so both
/// emit identical digits.
inline std::string format_number(double x) {
  const Json j = num(x);
  return j.is_string() ? j.get<std::string>() : j.dump();
}

inline const Json& field(const Json& j, std::string_view key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError("missing key '" + std::string(key) + "'");
  return *it;
}

inline void require_object(const Json& j, std::string_view what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be an object");
}

/// Unknown keys are errors.
inline void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                       std::string_view what) {
  require_object(j, what);
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(what));
    }
  }
}

inline double get_num(const Json& j, std::string_view what = "value") {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ConfigError(std::string(what) + " must be a number");
}

inline double get_num(const Json& j, std::string_view key, double fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : get_num(*it, key);
}

template <class T>
T get_as(const Json& j, std::string_view what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string(what) + " has the wrong type");
  }
}

template <class T>
T get_as(const Json& j, std::string_view key, T fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : get_as<T>(*it, key);
}

inline std::vector<double> get_vector(const Json& j, std::string_view what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(get_num(x, what));
  return out;
}

inline Json vec(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

// ---------------------------------------------------------------------------

inline Json to_json(const Interval& i) {
  return {{"lo", num(i.lo())}, {"hi", num(i.hi())},
          {"lo_open", i.lo_open()}, {"hi_open", i.hi_open()}};
}

inline Interval interval_from_json(const Json& j) {
  check_keys(j, {"lo", "hi", "lo_open", "hi_open"}, "interval");
  try {
    return {get_num(field(j, "lo"), "lo"), get_num(field(j, "hi"), "hi"),
            get_as<bool>(j, "lo_open", false), get_as<bool>(j, "hi_open", false)};
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

inline Json to_json(const ScalarFunction& f) {
  Json params = Json::object();
  for (const auto& [k, v] : f.params()) params[k] = num(v);
  return {{"family", f.name()}, {"params", params}, {"domain", to_json(f.domain())}};
}

inline Family family_from_json(const Json& j) {
  const auto name = get_as<std::string>(j, "family");
  const auto fam = parse_family(name);
  if (!fam) throw ConfigError("unknown function family '" + name + "'");
  return *fam;
}

/// {"family": ..., "params": {...}, "domain": {...}}; params and domain are
/// optional. A bare string names a parameterless family.
inline ScalarFunction function_from_json(const Json& j) {
  if (j.is_string()) return {family_from_json(j), {}};
  check_keys(j, {"family", "params", "domain"}, "function");
  const Family fam = family_from_json(field(j, "family"));
  ScalarFunction::Params params;
  if (const auto it = j.find("params"); it != j.end()) {
    require_object(*it, "params");
    for (const auto& [k, v] : it->items()) params[k] = get_num(v, k);
  }
  std::optional<Interval> domain;
  if (const auto it = j.find("domain"); it != j.end() && !it->is_null()) {
    domain = interval_from_json(*it);
  }
  return {fam, params, domain};
}

inline Json to_json(const SymmetricMatrix<double>& A) {
  Json rows = Json::array();
  for (const auto& r : A.rows()) rows.push_back(vec(r));
  return rows;
}

inline SymmetricMatrix<double> matrix_from_json(const Json& j) {
  if (!j.is_array()) throw ConfigError("matrix must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) rows.push_back(get_vector(r, "matrix row"));
  return SymmetricMatrix<double>::from_rows(rows);
}

inline Json to_json(const GridSize& g) { return {{"n_u", g.n_u}, {"n_lambda", g.n_lambda}}; }

inline GridSize grid_from_json(const Json& j) {
  check_keys(j, {"n_u", "n_lambda"}, "grid");
  return {get_as<std::size_t>(field(j, "n_u"), "n_u"),
          get_as<std::size_t>(field(j, "n_lambda"), "n_lambda")};
}

inline Json to_json(const GateInterval& g) {
  return {{"interval", to_json(g.interval)}, {"gate_value", num(g.gate_value)},
          {"degenerate", g.degenerate}, {"clamped", g.clamped}};
}

inline Json to_json(const Certificate& c) {
  return {{"verdict", verdict_name(c.verdict)},
          {"min_value", num(c.min_value)},
          {"arg_min", {{"u", num(c.arg_u)}, {"lambda", num(c.arg_lambda)}}},
          {"grid_min_value", num(c.grid_min_value)},
          {"grid", to_json(c.grid)},
          {"refined", c.refined},
          {"refine_iterations", c.refine_iterations},
          {"tolerance", num(c.tolerance)},
          {"v", num(c.v)},
          {"gate", to_json(c.gate)},
          {"confirmed_min", c.confirmed_min ? Json(*c.confirmed_min) : Json(nullptr)}};
}

inline Json to_json(const JensenCoefficient& c) {
  return {{"value", num(c.value)},
          {"argmin", num(c.argmin)},
          {"attained", c.attained_at().has_value()},
          {"boundary_limit", c.boundary_limit},
          {"K", to_json(c.K)},
          {"evaluations", c.evaluations}};
}

inline JensenCoefficient jcoeff_from_json(const Json& j) {
  check_keys(j, {"value", "argmin", "attained", "boundary_limit", "K", "evaluations"},
             "jcoeff");
  JensenCoefficient c;
  c.value = get_num(field(j, "value"), "value");
  c.argmin = get_num(field(j, "argmin"), "argmin");
  c.boundary_limit = get_as<bool>(j, "boundary_limit", false);
  if (const auto it = j.find("K"); it != j.end()) c.K = interval_from_json(*it);
  c.evaluations = get_as<std::size_t>(j, "evaluations", std::size_t{0});
  return c;
}

inline Json to_json(const JensenVerdict<double>& v) {
  Json out = {{"mode", jensen_mode_name(v.mode.mode)}};
  if (v.mode.mode == JensenMode::PerLambda) out["lambda"] = num(v.mode.lambda);
  out["quadratic"] = num(v.quadratic);
  out["lhs"] = num(v.lhs);
  out["form"] = num(v.form);
  out["rhs_factor"] = num(v.rhs_factor);
  out["rhs"] = num(v.rhs);
  out["margin"] = num(v.margin);
  return out;
}

inline Json to_json(const Feasibility& f) {
  Json flags = Json::array();
  for (const auto& fl : f.flags) {
    flags.push_back({{"name", fl.name}, {"value", fl.value}, {"required", fl.required}});
  }
  return {{"feasible", f.all()}, {"flags", flags}};
}

inline Json to_json(const WeightedSample& s) {
  Json out = {{"a", vec(s.a())}};
  if (s.has_b()) out["b"] = vec(s.b());
  out["q"] = vec(s.q());
  return out;
}

/// {"a": [...], "q": [...], "b": [...]}; q defaults to equal weights.
inline WeightedSample sample_from_json(const Json& j) {
  check_keys(j, {"a", "b", "q"}, "sample");
  auto a = get_vector(field(j, "a"), "a");
  std::vector<double> b;
  if (const auto it = j.find("b"); it != j.end()) b = get_vector(*it, "b");
  try {
    if (const auto it = j.find("q"); it != j.end()) {
      return {std::move(a), get_vector(*it, "q"), std::move(b)};
    }
    return WeightedSample::equal_weights(std::move(a), std::move(b));
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

inline Json to_json(const ChainReport& r) {
  Json out = {{"corollary", corollary_name(r.corollary)},
              {"n", r.n},
              {"alpha", num(r.alpha)},
              {"v", num(r.v)}};
  if (r.p) out["p"] = num(*r.p);
  out["gamma"] = num(r.gamma);
  out["beta"] = num(r.beta);
  out["lhs"] = num(r.lhs);
  out["mid"] = num(r.mid);
  out["rhs"] = num(r.rhs);
  out["margin1"] = num(r.margin1);
  out["margin2"] = num(r.margin2);
  out["convention"] = convention_name(r.convention);
  out["feasibility"] = to_json(r.feasibility);
  return out;
}

inline Json to_json(const Range& r) {
  return {{"lo", num(r.lo)}, {"hi", num(r.hi)}, {"log_uniform", r.log_uniform}};
}

inline Range range_from_json(const Json& j) {
  check_keys(j, {"lo", "hi", "log_uniform"}, "range");
  return {get_num(field(j, "lo"), "lo"), get_num(field(j, "hi"), "hi"),
          get_as<bool>(j, "log_uniform", false)};
}

inline Json to_json(const Region& r) {
  Json lemmas = Json::array();
  for (auto c : r.lemmas) lemmas.push_back(corollary_name(c));
  return {{"alpha", to_json(r.alpha)},   {"beta_fraction", to_json(r.beta_fraction)},
          {"v", to_json(r.v)},           {"lambda", to_json(r.lambda)},
          {"p", to_json(r.p)},           {"a", to_json(r.a)},
          {"beta", to_json(r.beta)},     {"n_min", r.n_min},
          {"n_max", r.n_max},            {"lemmas", lemmas},
          {"fixture", fixture_name(r.fixture)}};
}

/// Missing keys keep the values of `base`.
inline Region region_from_json(const Json& j, Region base) {
  check_keys(j, {"alpha", "beta_fraction", "v", "lambda", "p", "a", "beta", "n_min", "n_max",
                 "lemmas", "fixture"},
             "region");
  auto range = [&](std::string_view key, Range& slot) {
    if (const auto it = j.find(key); it != j.end()) slot = range_from_json(*it);
  };
  range("alpha", base.alpha);
  range("beta_fraction", base.beta_fraction);
  range("v", base.v);
  range("lambda", base.lambda);
  range("p", base.p);
  range("a", base.a);
  range("beta", base.beta);
  base.n_min = get_as<std::size_t>(j, "n_min", base.n_min);
  base.n_max = get_as<std::size_t>(j, "n_max", base.n_max);
  if (const auto it = j.find("lemmas"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("lemmas must be an array");
    base.lemmas.clear();
    for (const auto& s : *it) {
      base.lemmas.push_back(parse_corollary(get_as<std::string>(s, "lemma")));
    }
  }
  if (const auto it = j.find("fixture"); it != j.end()) {
    base.fixture = parse_fixture(get_as<std::string>(*it, "fixture"));
  }
  return base;
}

// ---------------------------------------------------------------------------
// Instances

inline Json to_json(const Instance& instance) {
  return std::visit(
      detail::Overloaded{
          [](const JensenInstance& in) -> Json {
            Json out = {{"kind", "jensen"},
                        {"f", to_json(in.f)},
                        {"h", to_json(in.h)},
                        {"g", in.g ? to_json(*in.g) : Json(nullptr)},
                        {"v", num(in.v)},
                        {"lemma", in.lemma ? Json(corollary_name(*in.lemma)) : Json(nullptr)},
                        {"A", to_json(in.A)},
                        {"x", vec(in.x)},
                        {"mode", jensen_mode_name(in.mode.mode)},
                        {"lambda", num(in.mode.lambda)},
                        {"jcoeff", in.jc ? to_json(*in.jc) : Json(nullptr)},
                        {"require_decreasing_quotient", in.require_decreasing_quotient}};
            return out;
          },
          [](const ChainInstance& in) -> Json {
            Json out = {{"kind", "chain"}, {"corollary", corollary_name(in.corollary)}};
            out["sample"] = to_json(in.sample);
            out["alpha"] = num(in.alpha);
            out["v"] = num(in.v);
            out["link"] = chain_link_name(in.link);
            return out;
          },
          [](const HMInstance& in) -> Json {
            return {{"kind", "hm"},          {"A", to_json(in.A)},
                    {"x", vec(in.x)},        {"p", num(in.p)},
                    {"alpha", num(in.alpha)}, {"v", num(in.v)},
                    {"link", chain_link_name(in.link)}};
          },
          [](const CertifyInstance& in) -> Json {
            return {{"kind", "certify"},
                    {"lemma", corollary_name(in.lemma)},
                    {"alpha", num(in.alpha)},
                    {"beta", num(in.beta)},
                    {"p", num(in.p)},
                    {"v", num(in.v)},
                    {"grid", to_json(in.grid)},
                    {"refine_iterations", in.refine_iterations}};
          }},
      instance);
}

inline Instance instance_from_json(const Json& j) {
  require_object(j, "instance");
  const auto kind = get_as<std::string>(field(j, "kind"), "kind");
  if (kind == "jensen") {
    check_keys(j, {"kind", "f", "h", "g", "v", "lemma", "A", "x", "mode", "lambda", "jcoeff",
                   "require_decreasing_quotient"},
               "jensen instance");
    JensenInstance in;
    in.f = function_from_json(field(j, "f"));
    in.h = function_from_json(field(j, "h"));
    if (const auto it = j.find("g"); it != j.end() && !it->is_null()) {
      in.g = function_from_json(*it);
    }
    in.v = get_num(j, "v", 0.0);
    if (const auto it = j.find("lemma"); it != j.end() && !it->is_null()) {
      in.lemma = parse_corollary(get_as<std::string>(*it, "lemma"));
    }
    in.A = matrix_from_json(field(j, "A"));
    in.x = get_vector(field(j, "x"), "x");
    const auto mode = parse_jensen_mode(get_as<std::string>(field(j, "mode"), "mode"));
    if (!mode) throw ConfigError("unknown Jensen mode");
    in.mode = {*mode, get_num(j, "lambda", 0.5)};
    if (const auto it = j.find("jcoeff"); it != j.end() && !it->is_null()) {
      in.jc = jcoeff_from_json(*it);
    } else {
      in.jc = detail::coefficient_for(in.h, in.mode);
    }
    in.require_decreasing_quotient = get_as<bool>(j, "require_decreasing_quotient", false);
    return in;
  }
  if (kind == "chain") {
    check_keys(j, {"kind", "corollary", "sample", "alpha", "v", "link"}, "chain instance");
    ChainInstance in;
    in.corollary = parse_corollary(get_as<std::string>(field(j, "corollary"), "corollary"));
    in.sample = sample_from_json(field(j, "sample"));
    in.alpha = get_num(field(j, "alpha"), "alpha");
    in.v = get_num(field(j, "v"), "v");
    in.link = parse_chain_link(get_as<std::string>(j, "link", std::string("refined")));
    return in;
  }
  if (kind == "hm") {
    check_keys(j, {"kind", "A", "x", "p", "alpha", "v", "link"}, "hm instance");
    HMInstance in;
    in.A = matrix_from_json(field(j, "A"));
    in.x = get_vector(field(j, "x"), "x");
    in.p = get_num(field(j, "p"), "p");
    in.alpha = get_num(field(j, "alpha"), "alpha");
    in.v = get_num(field(j, "v"), "v");
    in.link = parse_chain_link(get_as<std::string>(j, "link", std::string("refined")));
    return in;
  }
  if (kind == "certify") {
    check_keys(j, {"kind", "lemma", "alpha", "beta", "p", "v", "grid", "refine_iterations"},
               "certify instance");
    CertifyInstance in;
    in.lemma = parse_corollary(get_as<std::string>(field(j, "lemma"), "lemma"));
    in.alpha = get_num(field(j, "alpha"), "alpha");
    in.beta = get_num(field(j, "beta"), "beta");
    in.p = get_num(j, "p", 2.0);
    in.v = get_num(field(j, "v"), "v");
    if (const auto it = j.find("grid"); it != j.end()) in.grid = grid_from_json(*it);
    in.refine_iterations = get_as<int>(j, "refine_iterations", kDefaultRefineIterations);
    return in;
  }
  throw ConfigError("unknown instance kind '" + kind + "'");
}

inline Json details_json(const std::vector<std::pair<std::string, double>>& d) {
  Json out = Json::object();
  for (const auto& [k, v] : d) out[k] = num(v);
  return out;
}

inline Json to_json(const Witness& w) {
  return {{"draw_index", w.draw_index},
          {"margin_double", num(w.margin_double)},
          {"margin_confirmed", w.margin_confirmed},
          {"confirmed", w.confirmed},
          {"tag", witness_tag_name(w.tag)},
          {"details", details_json(w.details)},
          {"feasibility", to_json(w.feasibility)},
          {"instance", to_json(w.instance)}};
}

inline Json to_json(const InstanceResult& r) {
  return {{"margin_double", num(r.evaluation.margin)},
          {"margin_confirmed", r.margin_confirmed},
          {"confirmed_negative", r.confirmed_negative},
          {"details", details_json(r.evaluation.details)},
          {"feasibility", to_json(r.evaluation.feasibility)},
          {"instance", to_json(r.instance)}};
}

/// Campaign result without the wall-time field.
inline Json to_json(const CampaignReport& r) {
  Json rejections = Json::object();
  for (const auto& [k, n] : r.rejections_by_flag) rejections[k] = n;
  Json witnesses = Json::array();
  for (const auto& w : r.witnesses) witnesses.push_back(to_json(w));
  return {{"target", target_name(r.campaign.target)},
          {"outcome", r.outcome()},
          {"samples_requested", r.campaign.samples},
          {"drawn", r.drawn},
          {"counted", r.counted},
          {"rejected", r.rejected},
          {"rejections_by_flag", rejections},
          {"quota_met", r.quota_met},
          {"min_margin", num(r.min_margin)},
          {"argmin_draw", r.argmin_draw ? Json(*r.argmin_draw) : Json(nullptr)},
          {"argmin_instance", r.argmin_instance ? to_json(*r.argmin_instance) : Json(nullptr)},
          {"candidates", r.candidates},
          {"confirmed", r.confirmed},
          {"float_noise", r.float_noise},
          {"below_threshold", r.below_threshold},
          {"witnesses_kept", r.witnesses.size()},
          {"witnesses", witnesses},
          {"reference", to_json(r.reference)}};
}

inline Json to_json(const LambdaProfile& p) {
  Json pts = Json::array();
  for (const auto& pt : p.points) pts.push_back({{"lambda", num(pt.lambda)}, {"margin", num(pt.margin)}});
  return {{"min_margin", num(p.min_margin)},
          {"argmin_lambda", num(p.argmin_lambda)},
          {"holds_everywhere", p.holds_everywhere},
          {"quotient_decreasing", p.quotient_decreasing},
          {"points", pts}};
}

}  // namespace io
}  // namespace hcvx
