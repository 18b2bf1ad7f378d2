#pragma once

// Run configurations and the command implementations behind the hcvx tool.
// A config is one JSON object with a "command" key; every report embeds the
// resolved config, the seed and the tolerances in force.

#include <chrono>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "hcvx/io.hpp"

#ifndef HCVX_VERSION
#define HCVX_VERSION "0.1.0"
#endif

namespace hcvx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitViolation = 2;

enum class Format { Json, Csv };

inline Format parse_format(std::string_view s) {
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  throw ConfigError("unknown format '" + std::string(s) + "' (json or csv)");
}

inline std::string_view format_name(Format f) { return f == Format::Json ? "json" : "csv"; }

struct Common {
  std::optional<std::string> out;
  Format format = Format::Json;
};

struct CertifyConfig {
  ScalarFunction f, g, h;
  double v = 0.0;
  CertifyOptions options;
};

struct JcoeffConfig {
  ScalarFunction h;
  Interval K = Interval::open(0.0, 1.0);
  std::size_t samples = kDefaultJcoeffSamples;
};

struct JensenConfig {
  ScalarFunction f, h;
  SymmetricMatrix<double> A;
  std::vector<double> x;
  JensenModeSpec mode;
};

struct OperatorSpec {
  SymmetricMatrix<double> A;
  std::vector<double> x;
  double p = 2.0;
};

struct RefineConfig {
  Corollary corollary = Corollary::AmGm;
  double alpha = 0.0;
  double v = 0.0;
  MConvention convention = MConvention::OpenInterval;
  std::vector<WeightedSample> samples;
  // CSV with columns a, optional b, q; one row per sample point
  std::optional<std::string> sample_csv;
  std::vector<OperatorSpec> operators;
};

struct FalsifyConfig {
  Campaign campaign;
};

struct ReplayConfig {
  std::optional<Instance> instance;
  // or a report file and the index of one of its witnesses
  std::optional<std::string> report;
  std::size_t witness = 0;
};

struct SweepConfig {
  ScalarFunction f, h;
  SymmetricMatrix<double> A;
  std::vector<double> x;
  std::size_t points = 99;
};

using CommandConfig = std::variant<CertifyConfig, JcoeffConfig, JensenConfig, RefineConfig,
                                   FalsifyConfig, ReplayConfig, SweepConfig>;

struct RunConfig {
  CommandConfig command;
  Common common;
};

inline std::string_view command_name(const CommandConfig& c) {
  static constexpr std::string_view names[] = {"certify", "jcoeff", "jensen", "refine",
                                               "falsify", "replay", "sweep"};
  return names[c.index()];
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

using io::field;
using io::get_as;
using io::get_num;

inline std::vector<std::string_view> with_common(std::initializer_list<std::string_view> keys) {
  std::vector<std::string_view> out{"command", "out", "format"};
  out.insert(out.end(), keys.begin(), keys.end());
  return out;
}

inline void check(const Json& j, std::initializer_list<std::string_view> keys,
                  std::string_view what) {
  const auto allowed = with_common(keys);
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(what) + " config");
    }
  }
}

inline JensenModeSpec mode_from_json(const Json& j) {
  JensenModeSpec m;
  if (const auto it = j.find("mode"); it != j.end()) {
    const auto parsed = parse_jensen_mode(get_as<std::string>(*it, "mode"));
    if (!parsed) throw ConfigError("unknown Jensen mode");
    m.mode = *parsed;
  }
  m.lambda = get_num(j, "lambda", 0.5);
  return m;
}

inline CertifyConfig certify_from_json(const Json& j) {
  check(j, {"f", "g", "h", "v", "grid", "refine_iterations", "violation_tolerance", "clamp_eps",
            "confirm"},
        "certify");
  CertifyConfig c;
  c.f = io::function_from_json(field(j, "f"));
  c.g = io::function_from_json(field(j, "g"));
  c.h = j.contains("h") ? io::function_from_json(j["h"]) : ScalarFunction::identity_weight();
  c.v = get_num(field(j, "v"), "v");
  if (j.contains("grid")) c.options.grid = io::grid_from_json(j["grid"]);
  c.options.refine_iterations =
      get_as<int>(j, "refine_iterations", c.options.refine_iterations);
  c.options.violation_tolerance =
      get_num(j, "violation_tolerance", c.options.violation_tolerance);
  c.options.clamp_eps = get_num(j, "clamp_eps", c.options.clamp_eps);
  c.options.confirm = get_as<bool>(j, "confirm", c.options.confirm);
  return c;
}

inline JcoeffConfig jcoeff_from_json(const Json& j) {
  check(j, {"h", "K", "samples"}, "jcoeff");
  JcoeffConfig c;
  c.h = io::function_from_json(field(j, "h"));
  if (j.contains("K")) c.K = io::interval_from_json(j["K"]);
  c.samples = get_as<std::size_t>(j, "samples", c.samples);
  return c;
}

inline JensenConfig jensen_from_json(const Json& j) {
  check(j, {"f", "h", "A", "x", "mode", "lambda"}, "jensen");
  JensenConfig c;
  c.f = io::function_from_json(field(j, "f"));
  c.h = j.contains("h") ? io::function_from_json(j["h"]) : ScalarFunction::identity_weight();
  c.A = io::matrix_from_json(field(j, "A"));
  c.x = io::get_vector(field(j, "x"), "x");
  c.mode = mode_from_json(j);
  return c;
}

inline RefineConfig refine_from_json(const Json& j) {
  check(j, {"corollary", "alpha", "v", "convention", "samples", "sample_csv", "operators"},
        "refine");
  RefineConfig c;
  c.corollary = parse_corollary(get_as<std::string>(field(j, "corollary"), "corollary"));
  c.alpha = get_num(field(j, "alpha"), "alpha");
  c.v = get_num(field(j, "v"), "v");
  if (j.contains("convention")) {
    const auto s = get_as<std::string>(j["convention"], "convention");
    if (s == convention_name(MConvention::OpenInterval)) {
      c.convention = MConvention::OpenInterval;
    } else if (s == convention_name(MConvention::ClosedInterval)) {
      c.convention = MConvention::ClosedInterval;
    } else {
      throw ConfigError("convention must be \"inf over (0,1)\" or \"inf over [0,1]\"");
    }
  }
  if (j.contains("samples")) {
    if (!j["samples"].is_array()) throw ConfigError("samples must be an array");
    for (const auto& s : j["samples"]) c.samples.push_back(io::sample_from_json(s));
  }
  if (j.contains("sample_csv")) c.sample_csv = get_as<std::string>(j["sample_csv"], "sample_csv");
  if (j.contains("operators")) {
    if (!j["operators"].is_array()) throw ConfigError("operators must be an array");
    for (const auto& o : j["operators"]) {
      io::check_keys(o, {"A", "x", "p"}, "operator");
      c.operators.push_back({io::matrix_from_json(field(o, "A")),
                             io::get_vector(field(o, "x"), "x"), get_num(field(o, "p"), "p")});
    }
  }
  const bool hm = c.corollary == Corollary::HolderMcCarthy;
  if (hm && (!c.samples.empty() || c.sample_csv)) {
    throw ConfigError("HolderMcCarthy takes operators, not samples");
  }
  if (!hm && !c.operators.empty()) throw ConfigError("operators apply to HolderMcCarthy only");
  if (c.samples.empty() && !c.sample_csv && c.operators.empty()) {
    throw ConfigError("refine needs samples, sample_csv or operators");
  }
  return c;
}

inline FalsifyConfig falsify_from_json(const Json& j) {
  check(j, {"target", "samples", "seed", "link", "region", "max_witnesses", "max_draw_factor",
            "grid", "refine_iterations"},
        "falsify");
  FalsifyConfig c;
  const Target t = parse_target(get_as<std::string>(field(j, "target"), "target"));
  c.campaign = make_campaign(t, get_as<std::uint64_t>(j, "samples", std::uint64_t{1000}),
                             get_as<std::uint64_t>(j, "seed", std::uint64_t{42}));
  if (j.contains("link")) c.campaign.link = parse_chain_link(get_as<std::string>(j["link"], "link"));
  if (j.contains("region")) c.campaign.region = io::region_from_json(j["region"], c.campaign.region);
  c.campaign.max_witnesses = get_as<std::size_t>(j, "max_witnesses", c.campaign.max_witnesses);
  c.campaign.max_draw_factor =
      get_as<std::uint64_t>(j, "max_draw_factor", c.campaign.max_draw_factor);
  if (j.contains("grid")) c.campaign.grid = io::grid_from_json(j["grid"]);
  c.campaign.refine_iterations =
      get_as<int>(j, "refine_iterations", c.campaign.refine_iterations);
  return c;
}

inline ReplayConfig replay_from_json(const Json& j) {
  check(j, {"instance", "report", "witness"}, "replay");
  ReplayConfig c;
  if (j.contains("instance")) c.instance = io::instance_from_json(j["instance"]);
  if (j.contains("report")) c.report = get_as<std::string>(j["report"], "report");
  c.witness = get_as<std::size_t>(j, "witness", c.witness);
  if (c.instance.has_value() == c.report.has_value()) {
    throw ConfigError("replay needs exactly one of instance or report");
  }
  return c;
}

inline SweepConfig sweep_from_json(const Json& j) {
  check(j, {"f", "h", "A", "x", "points"}, "sweep");
  SweepConfig c;
  c.f = io::function_from_json(field(j, "f"));
  c.h = io::function_from_json(field(j, "h"));
  c.A = io::matrix_from_json(field(j, "A"));
  c.x = io::get_vector(field(j, "x"), "x");
  c.points = get_as<std::size_t>(j, "points", c.points);
  return c;
}

}  // namespace detail

inline RunConfig config_from_json(const Json& j) {
  io::require_object(j, "config");
  const auto cmd = io::get_as<std::string>(io::field(j, "command"), "command");
  RunConfig rc;
  try {
    if (cmd == "certify") rc.command = detail::certify_from_json(j);
    else if (cmd == "jcoeff") rc.command = detail::jcoeff_from_json(j);
    else if (cmd == "jensen") rc.command = detail::jensen_from_json(j);
    else if (cmd == "refine") rc.command = detail::refine_from_json(j);
    else if (cmd == "falsify") rc.command = detail::falsify_from_json(j);
    else if (cmd == "replay") rc.command = detail::replay_from_json(j);
    else if (cmd == "sweep") rc.command = detail::sweep_from_json(j);
    else throw ConfigError("unknown command '" + cmd + "'");
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    // invalid parameters surface as config errors
    throw ConfigError(e.what());
  }
  if (j.contains("out")) rc.common.out = io::get_as<std::string>(j["out"], "out");
  if (j.contains("format")) rc.common.format = parse_format(io::get_as<std::string>(j["format"], "format"));
  return rc;
}

inline RunConfig parse_config(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// ---------------------------------------------------------------------------
// Serialization (fully resolved; defaults are written out)

inline Json to_json(const RunConfig& rc) {
  Json j = {{"command", command_name(rc.command)}};
  std::visit(
      hcvx::detail::Overloaded{
          [&](const CertifyConfig& c) {
            j["f"] = io::to_json(c.f);
            j["g"] = io::to_json(c.g);
            j["h"] = io::to_json(c.h);
            j["v"] = io::num(c.v);
            j["grid"] = io::to_json(c.options.grid);
            j["refine_iterations"] = c.options.refine_iterations;
            j["violation_tolerance"] = io::num(c.options.violation_tolerance);
            j["clamp_eps"] = io::num(c.options.clamp_eps);
            j["confirm"] = c.options.confirm;
          },
          [&](const JcoeffConfig& c) {
            j["h"] = io::to_json(c.h);
            j["K"] = io::to_json(c.K);
            j["samples"] = c.samples;
          },
          [&](const JensenConfig& c) {
            j["f"] = io::to_json(c.f);
            j["h"] = io::to_json(c.h);
            j["A"] = io::to_json(c.A);
            j["x"] = io::vec(c.x);
            j["mode"] = jensen_mode_name(c.mode.mode);
            j["lambda"] = io::num(c.mode.lambda);
          },
          [&](const RefineConfig& c) {
            j["corollary"] = corollary_name(c.corollary);
            j["alpha"] = io::num(c.alpha);
            j["v"] = io::num(c.v);
            j["convention"] = convention_name(c.convention);
            if (!c.samples.empty()) {
              Json s = Json::array();
              for (const auto& x : c.samples) s.push_back(io::to_json(x));
              j["samples"] = s;
            }
            if (c.sample_csv) j["sample_csv"] = *c.sample_csv;
            if (!c.operators.empty()) {
              Json ops = Json::array();
              for (const auto& o : c.operators) {
                ops.push_back({{"A", io::to_json(o.A)}, {"x", io::vec(o.x)}, {"p", io::num(o.p)}});
              }
              j["operators"] = ops;
            }
          },
          [&](const FalsifyConfig& c) {
            const auto& k = c.campaign;
            j["target"] = target_name(k.target);
            j["samples"] = k.samples;
            j["seed"] = k.seed;
            j["link"] = chain_link_name(k.link);
            j["region"] = io::to_json(k.region);
            j["max_witnesses"] = k.max_witnesses;
            j["max_draw_factor"] = k.max_draw_factor;
            j["grid"] = io::to_json(k.grid);
            j["refine_iterations"] = k.refine_iterations;
          },
          [&](const ReplayConfig& c) {
            if (c.instance) j["instance"] = io::to_json(*c.instance);
            if (c.report) {
              j["report"] = *c.report;
              j["witness"] = c.witness;
            }
          },
          [&](const SweepConfig& c) {
            j["f"] = io::to_json(c.f);
            j["h"] = io::to_json(c.h);
            j["A"] = io::to_json(c.A);
            j["x"] = io::vec(c.x);
            j["points"] = c.points;
          }},
      rc.command);
  if (rc.common.out) j["out"] = *rc.common.out;
  j["format"] = format_name(rc.common.format);
  return j;
}

// ---------------------------------------------------------------------------
// CSV

using CsvRow = std::vector<std::string>;

/// RFC 4180 quoting: fields with a comma, quote or line break are quoted.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct Table {
  CsvRow header;
  std::vector<CsvRow> rows;

  std::string str() const {
    std::string out;
    auto line = [&](const CsvRow& r) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += ',';
        out += csv_field(r[i]);
      }
      out += "\r\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
  }
};

inline std::string cell(double x) { return io::format_number(x); }
inline std::string cell(bool b) { return b ? "true" : "false"; }
inline std::string cell(std::uint64_t n) { return std::to_string(n); }
inline std::string cell(std::string_view s) { return std::string(s); }

// ---------------------------------------------------------------------------
// Running

struct Outcome {
  Json report;
  Table table;
  int exit_code = kExitOk;
};

inline Json tolerances() {
  return {{"violation_tolerance", kViolationTolerance},
          {"candidate_threshold", kCandidateThreshold},
          {"confirm_threshold", kConfirmThreshold},
          {"spectrum_slack", kSpectrumSlack},
          {"membership_slack", kMembershipSlack},
          {"weight_sum_tolerance", kWeightSumTolerance},
          {"endpoint_approach", kEndpointApproach},
          {"gate_clamp_epsilon", kDefaultClampEpsilon},
          {"high_precision_digits", kHighPrecisionDigits}};
}

namespace detail {

inline std::vector<WeightedSample> read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read sample CSV '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("sample CSV is empty");
  auto split = [](std::string s) {
    std::vector<std::string> out;
    if (!s.empty() && s.back() == '\r') s.pop_back();
    std::stringstream ss(s);
    std::string f;
    while (std::getline(ss, f, ',')) out.push_back(f);
    return out;
  };
  const auto header = split(line);
  int ia = -1, ib = -1, iq = -1;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    if (header[i] == "a") ia = i;
    else if (header[i] == "b") ib = i;
    else if (header[i] == "q") iq = i;
    else throw ConfigError("unknown sample CSV column '" + header[i] + "'");
  }
  if (ia < 0 || iq < 0) throw ConfigError("sample CSV needs columns a and q");
  std::vector<double> a, b, q;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split(line);
    if (f.size() != header.size()) throw ConfigError("ragged sample CSV row");
    try {
      a.push_back(std::stod(f[ia]));
      q.push_back(std::stod(f[iq]));
      if (ib >= 0) b.push_back(std::stod(f[ib]));
    } catch (const std::exception&) {
      throw ConfigError("non-numeric sample CSV field");
    }
  }
  return {WeightedSample(std::move(a), std::move(q), std::move(b))};
}

inline Table chain_table(const std::vector<ChainReport>& reports) {
  Table t;
  t.header = {"corollary", "n", "alpha", "gamma", "beta", "lhs", "mid", "rhs", "margin1",
              "margin2", "feasible"};
  for (const auto& r : reports) {
    t.rows.push_back({cell(corollary_name(r.corollary)), cell(std::uint64_t{r.n}),
                      cell(r.alpha), cell(r.gamma), cell(r.beta), cell(r.lhs), cell(r.mid),
                      cell(r.rhs), cell(r.margin1), cell(r.margin2), cell(r.feasible())});
  }
  return t;
}

inline Outcome run(const CertifyConfig& c) {
  const auto cert = certify(c.f, c.g, c.h, c.v, c.options);
  Outcome o;
  o.report = io::to_json(cert);
  o.table.header = {"verdict", "min_value", "u", "lambda", "grid_min_value", "gate_lo",
                    "gate_hi", "confirmed_min"};
  o.table.rows.push_back({cell(verdict_name(cert.verdict)), cell(cert.min_value),
                          cell(cert.arg_u), cell(cert.arg_lambda), cell(cert.grid_min_value),
                          cell(cert.gate.interval.lo()), cell(cert.gate.interval.hi()),
                          cert.confirmed_min.value_or("")});
  o.exit_code = cert.verdict == Verdict::Violated ? kExitViolation : kExitOk;
  return o;
}

inline Outcome run(const JcoeffConfig& c) {
  const auto jc = jcoeff(c.h, c.K, c.samples);
  Outcome o;
  o.report = io::to_json(jc);
  o.table.header = {"value", "argmin", "attained", "boundary_limit", "evaluations"};
  o.table.rows.push_back({cell(jc.value), cell(jc.argmin), cell(jc.attained_at().has_value()),
                          cell(jc.boundary_limit), cell(std::uint64_t{jc.evaluations})});
  return o;
}

inline Outcome run(const JensenConfig& c) {
  const auto v = jensen_verify(c.f, c.h, c.A, UnitVector<double>(c.x), c.mode);
  Outcome o;
  o.report = io::to_json(v);
  o.table.header = {"mode", "lambda", "quadratic", "lhs", "form", "rhs_factor", "rhs", "margin"};
  o.table.rows.push_back({cell(jensen_mode_name(v.mode.mode)), cell(v.mode.lambda),
                          cell(v.quadratic), cell(v.lhs), cell(v.form), cell(v.rhs_factor),
                          cell(v.rhs), cell(v.margin)});
  o.exit_code = v.margin < 0 ? kExitViolation : kExitOk;
  return o;
}

inline Outcome run(const RefineConfig& c) {
  std::vector<ChainReport> reports;
  auto samples = c.samples;
  if (c.sample_csv) {
    for (auto& s : read_sample_csv(*c.sample_csv)) samples.push_back(std::move(s));
  }
  for (const auto& s : samples) reports.push_back(chain(c.corollary, s, c.alpha, c.v, c.convention));
  for (const auto& op : c.operators) {
    reports.push_back(hm_chain(op.A, UnitVector<double>(op.x), op.p, c.alpha, c.v, c.convention));
  }
  Outcome o;
  Json rows = Json::array();
  for (const auto& r : reports) {
    rows.push_back(io::to_json(r));
    if (r.min_margin() < kCandidateThreshold) o.exit_code = kExitViolation;
  }
  o.report = {{"chains", rows}};
  o.table = chain_table(reports);
  return o;
}

inline Outcome run(const FalsifyConfig& c) {
  const auto r = run_campaign(c.campaign);
  Outcome o;
  o.report = io::to_json(r);
  o.report["wall_seconds"] = r.wall_seconds;
  o.table.header = {"draw_index", "margin_double", "margin_confirmed", "confirmed", "tag",
                    "instance"};
  for (const auto& w : r.witnesses) {
    o.table.rows.push_back({cell(w.draw_index), cell(w.margin_double), w.margin_confirmed,
                            cell(w.confirmed), cell(witness_tag_name(w.tag)),
                            io::to_json(w.instance).dump()});
  }
  o.exit_code = r.confirmed > 0 ? kExitViolation : kExitOk;
  return o;
}

inline Outcome run(const ReplayConfig& c) {
  Instance inst;
  std::optional<Json> source;
  if (c.instance) {
    inst = *c.instance;
  } else {
    std::ifstream in(*c.report);
    if (!in) throw ConfigError("cannot read report '" + *c.report + "'");
    Json rep;
    try {
      rep = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("report is not valid JSON: ") + e.what());
    }
    const Json* result = rep.contains("result") ? &rep["result"] : &rep;
    if (!result->contains("witnesses") || !(*result)["witnesses"].is_array() ||
        c.witness >= (*result)["witnesses"].size()) {
      throw ConfigError("report has no witness " + std::to_string(c.witness));
    }
    source = (*result)["witnesses"][c.witness];
    inst = io::instance_from_json(io::field(*source, "instance"));
  }
  const auto r = evaluate_and_confirm(inst);
  Outcome o;
  o.report = io::to_json(r);
  if (source) {
    const double recorded = io::get_num(io::field(*source, "margin_double"), "margin_double");
    o.report["recorded_margin_double"] = io::num(recorded);
    o.report["recorded_margin_confirmed"] = (*source)["margin_confirmed"];
    o.report["reproduced"] =
        recorded == r.evaluation.margin &&
        (*source)["margin_confirmed"] == Json(r.margin_confirmed);
  }
  o.table.header = {"margin_double", "margin_confirmed", "confirmed_negative", "feasible"};
  o.table.rows.push_back({cell(r.evaluation.margin), r.margin_confirmed,
                          cell(r.confirmed_negative), cell(r.evaluation.feasibility.all())});
  o.exit_code = r.confirmed_negative && r.evaluation.feasibility.all() ? kExitViolation : kExitOk;
  return o;
}

inline Outcome run(const SweepConfig& c) {
  const auto p = lambda_profile(c.f, c.h, c.A, UnitVector<double>(c.x), c.points);
  Outcome o;
  o.report = io::to_json(p);
  o.table.header = {"lambda", "margin"};
  for (const auto& pt : p.points) o.table.rows.push_back({cell(pt.lambda), cell(pt.margin)});
  o.exit_code = p.holds_everywhere ? kExitOk : kExitViolation;
  return o;
}

}  // namespace detail

/// Runs a config. The report carries tool, command, resolved config, seed,
/// tolerances and the result; only falsify adds a wall-time field.
inline Outcome run_command(const RunConfig& rc) {
  Outcome o = std::visit([](const auto& c) { return detail::run(c); }, rc.command);
  Json seed = nullptr;
  if (const auto* f = std::get_if<FalsifyConfig>(&rc.command)) seed = f->campaign.seed;
  Json result = std::move(o.report);
  std::optional<Json> wall;
  if (result.contains("wall_seconds")) {
    wall = result["wall_seconds"];
    result.erase("wall_seconds");
  }
  o.report = {{"tool", {{"name", "hcvx"}, {"version", HCVX_VERSION}}},
              {"command", command_name(rc.command)},
              {"config", to_json(rc)},
              {"seed", seed},
              {"tolerances", tolerances()},
              {"exit_code", o.exit_code},
              {"result", std::move(result)}};
  if (wall) o.report["wall_seconds"] = *wall;
  return o;
}

inline std::string render(const Outcome& o, Format f) {
  return f == Format::Json ? o.report.dump(2) + "\n" : o.table.str();
}

}  // namespace hcvx::cli
