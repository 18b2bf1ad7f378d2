// Acceptance checks. `hcvx_acceptance N...` runs the listed criteria (all
// when none are given) and prints one PASS/FAIL line for each. Exit status
// is nonzero when any requested criterion fails.
//
// HCVX_CLI names the hcvx binary; HCVX_SOURCE_DIR locates configs/.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hcvx/cli.hpp"

namespace {

using namespace hcvx;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Thresholds, one per criterion.
constexpr double kJcoeffTolerance = 1e-6;        // 1
constexpr double kJcoeffBudgetSeconds = 1.0;     // 1
constexpr double kClassicalFloor = -1e-10;       // 2
constexpr double kClassicalBudgetSeconds = 5.0;  // 2
constexpr double kLemmaFloor = -1e-8;            // 3
constexpr double kLemmaBudgetSeconds = 30.0;     // 3
constexpr std::size_t kLemmaGrid = 256;          // 3
constexpr double kEqualityTolerance = 1e-12;     // 4
constexpr std::uint64_t kCor21Samples = 10000;   // 6
constexpr std::uint64_t kCampaignSamples = 100000;  // 7
constexpr double kCampaignBudgetSeconds = 60.0;     // 7
constexpr std::uint64_t kOuterSamples = 10000;      // 8
constexpr std::uint64_t kSeed = 42;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

fs::path source_dir() {
  const char* d = std::getenv("HCVX_SOURCE_DIR");
  return d ? fs::path(d) : fs::path(HCVX_TEST_SOURCE_DIR);
}

// |a - b| <= tol * max(1, |a|, |b|)
bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

std::size_t significant_digits(const std::string& s) {
  std::size_t n = 0;
  bool leading = true;
  for (char c : s) {
    if (c == 'e' || c == 'E') break;
    if (c < '0' || c > '9') continue;
    if (leading && c == '0') continue;
    leading = false;
    ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------

Outcome jcoeff_exp_weight() {
  const auto t0 = Clock::now();
  double worst = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    DrawRng rng(kSeed, i);
    const double beta = rng.uniform(0.05, 5.0);
    const double alpha = beta * rng.unit();
    const auto jc = jcoeff(ScalarFunction::exp_weight(alpha, beta), Interval::open(0.0, 1.0));
    worst = std::max(worst, std::abs(jc.value - alpha / beta));
  }
  const double secs = seconds_since(t0);
  return {worst <= kJcoeffTolerance && secs < kJcoeffBudgetSeconds,
          "20 pairs, max |jcoeff - alpha/beta| = " + fmt(worst) + ", " + fmt(secs) + " s"};
}

Outcome classical_jensen() {
  const auto t0 = Clock::now();
  double worst = INFINITY;
  int exceptions = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    DrawRng rng(kSeed, i);
    const std::size_t n = rng.integer(2, 8);
    const std::size_t k = i % 4;
    const auto& f = detail::classical_fixture(k);
    // t^2 and -ln live on the half-line; e^t and e^-t take any real spectrum
    const double lo = k == 0 || k == 3 ? 0.01 : -4.0;
    std::vector<double> mu(n);
    for (auto& m : mu) m = rng.uniform(lo, 4.0);
    const auto A = detail::random_with_spectrum(rng, mu);
    const UnitVector<double> x(detail::random_unit_components(rng, n));
    const auto v = jensen_verify(f, ScalarFunction::identity_weight(), A, x,
                                 JensenModeSpec{JensenMode::Classical});
    worst = std::min(worst, v.margin);
    if (v.margin < kClassicalFloor) ++exceptions;
  }
  const double secs = seconds_since(t0);
  return {exceptions == 0 && secs < kClassicalBudgetSeconds,
          "1000 matrices, min margin " + fmt(worst) + ", " + std::to_string(exceptions) +
              " exceptions, " + fmt(secs) + " s"};
}

Outcome lemma_certificates() {
  const auto t0 = Clock::now();
  double worst = INFINITY;
  std::string worst_at;
  int tuples = 0;
  CertifyOptions opt;
  opt.grid = {kLemmaGrid, kLemmaGrid};
  for (Corollary lemma : {Corollary::KyFan, Corollary::AmGm, Corollary::Chrystal,
                          Corollary::HolderMcCarthy}) {
    Campaign c = make_campaign(Target::LemmaCertificates, 10, kSeed);
    c.region.lemmas = {lemma};
    for (std::uint64_t i = 0; i < 10; ++i) {
      DrawRng rng(kSeed, i);
      const auto d = detail::draw_lemma(rng, c.region);
      if (!lemma_parameters_ok(d.lemma, d.alpha, d.beta, d.v, d.p)) {
        return {false, "drew a tuple outside the lemma's range"};
      }
      const auto s = lemma_setup(d.lemma, d.alpha, d.beta, d.p);
      const auto cert = certify(s.f, s.g, s.h, d.v, opt);
      ++tuples;
      if (cert.min_value < worst) {
        worst = cert.min_value;
        worst_at = std::string(corollary_name(lemma));
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst >= kLemmaFloor && secs < kLemmaBudgetSeconds,
          std::to_string(tuples) + " tuples on 256x256, min value " + fmt(worst) + " (" +
              worst_at + "), " + fmt(secs) + " s"};
}

Outcome equality_at_zero_spread() {
  int failures = 0;
  std::string first;
  auto check = [&](const ChainReport& r, std::uint64_t i) {
    const bool ok = r.gamma == 0.0 && close(r.lhs, r.mid, kEqualityTolerance) &&
                    close(r.mid, r.rhs, kEqualityTolerance);
    if (!ok && failures++ == 0) {
      first = std::string(corollary_name(r.corollary)) + " draw " + std::to_string(i);
    }
  };
  for (std::uint64_t i = 0; i < 100; ++i) {
    DrawRng rng(kSeed, i);
    const std::size_t n = rng.integer(1, 12);
    const auto q = detail::random_weights(rng, n);
    const double alpha = rng.uniform(1.0, 3.0);
    const double a = rng.uniform(0.01, 0.5);
    check(kyfan_chain(WeightedSample(std::vector<double>(n, a), q), alpha, a), i);
    const double b = rng.uniform(0.01, 1.0);
    check(amgm_chain(WeightedSample(std::vector<double>(n, b), q), alpha, b), i);
    const double c = rng.uniform(0.05, 5.0);
    const double alpha_c = rng.uniform(0.1, 3.0);
    check(chrystal_chain(WeightedSample(std::vector<double>(n, c), q, std::vector<double>(n, c)),
                         alpha_c, std::min(c, alpha_c)),
          i);
    const double mu = rng.uniform(0.05, 5.0);
    const UnitVector<double> x(detail::random_unit_components(rng, n));
    check(hm_chain(SymmetricMatrix<double>::identity(n, mu), x, rng.uniform(1.01, 4.0), alpha_c,
                   std::min(mu, alpha_c)),
          i);
  }
  return {failures == 0, "400 degenerate samples, " + std::to_string(failures) + " unequal" +
                             (first.empty() ? "" : " (first: " + first + ")")};
}

int run_cli(const std::string& args, std::string* out) {
  const char* cli = std::getenv("HCVX_CLI");
  if (!cli) throw std::runtime_error("HCVX_CLI is not set");
  const auto tmp = fs::temp_directory_path() / ("hcvx_acceptance_" + std::to_string(::getpid()));
  const std::string cmd =
      std::string("\"") + cli + "\" " + args + " > \"" + tmp.string() + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  std::ifstream in(tmp);
  std::stringstream ss;
  ss << in.rdbuf();
  *out = ss.str();
  fs::remove(tmp);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome example_fixtures() {
  const auto cfg = source_dir() / "configs";
  std::string out;
  const int pass_code = run_cli("certify --config " + (cfg / "cubic_piecewise_certify.json").string(), &out);
  const auto pass = Json::parse(out)["result"];
  const int fail_code =
      run_cli("certify --config " + (cfg / "whole_interval_certify.json").string(), &out);
  const auto fail = Json::parse(out)["result"];
  const bool witness = fail["verdict"] == "Violated" && !fail["confirmed_min"].is_null() &&
                       fail["min_value"].get<double>() < 0;
  const bool ok = pass_code == 0 && pass["verdict"] == "Certified" && fail_code == 2 && witness;
  return {ok, "piecewise gate at v=2: exit " + std::to_string(pass_code) + " " +
                  pass["verdict"].get<std::string>() + "; whole interval: exit " +
                  std::to_string(fail_code) + ", witness (u, lambda) = (" +
                  fmt(fail["arg_min"]["u"].get<double>()) + ", " +
                  fmt(fail["arg_min"]["lambda"].get<double>()) + ") value " +
                  fmt(fail["min_value"].get<double>())};
}

Outcome cor21_counterexample() {
  const auto c = make_campaign(Target::Cor21Counterexample, kCor21Samples, kSeed);
  const auto r = run_campaign(c);
  if (r.confirmed == 0) {
    return {false, "no confirmed witness in " + std::to_string(r.counted) +
                       " feasible samples; min margin " + fmt(r.min_margin) + ", candidates " +
                       std::to_string(r.candidates)};
  }
  const auto& w = r.witnesses.front();
  const auto replay = evaluate_and_confirm(w.instance);
  const bool same = replay.evaluation.margin == w.margin_double &&
                    replay.margin_confirmed == w.margin_confirmed;
  return {same, std::to_string(r.confirmed) + " confirmed; first margin " +
                    fmt(w.margin_double) + (same ? ", replays bit-identically" : ", replay differs")};
}

Outcome falsification_campaigns() {
  bool ok = true;
  std::string detail;
  for (Target t : {Target::Thm21, Target::KyFan, Target::AmGm, Target::Chrystal,
                   Target::HolderMcCarthy}) {
    const auto r = run_campaign(make_campaign(t, kCampaignSamples, kSeed));
    bool sound = r.counted == kCampaignSamples && r.wall_seconds < kCampaignBudgetSeconds &&
                 r.candidates == r.confirmed + r.float_noise + r.below_threshold;
    for (const auto& w : r.witnesses) {
      if (w.tag != WitnessTag::Confirmed) continue;
      sound = sound && significant_digits(w.margin_confirmed) >= 50 &&
              std::abs(std::stod(w.margin_confirmed)) > 1e-6;
    }
    const auto& ref = r.reference;
    sound = sound && significant_digits(ref.margin_confirmed) >= 50;
    if (t == Target::Thm21) {
      // 60-digit oracle value of the published instance
      sound = sound && std::abs(std::stod(ref.margin_confirmed) - (-0.0185824679)) < 1e-9;
    }
    ok = ok && sound;
    detail += std::string(detail.empty() ? "" : "; ") + std::string(target_name(t)) + " " +
              std::to_string(r.confirmed) + "/" + std::to_string(r.candidates) + " confirmed, " +
              fmt(r.wall_seconds) + " s, reference " + fmt(std::stod(ref.margin_confirmed));
  }
  return {ok, detail};
}

Outcome outer_inequalities() {
  bool ok = true;
  std::string detail;
  for (Target t : {Target::KyFan, Target::AmGm, Target::Chrystal, Target::HolderMcCarthy}) {
    auto c = make_campaign(t, kOuterSamples, kSeed);
    c.link = ChainLink::Outer;
    const auto r = run_campaign(c);
    ok = ok && r.confirmed == 0 && r.counted == kOuterSamples;
    detail += std::string(detail.empty() ? "" : "; ") + std::string(target_name(t)) + " " +
              std::to_string(r.confirmed) + " confirmed, min " + fmt(r.min_margin);
  }
  return {ok, detail};
}

Outcome determinism() {
  int differing = 0;
  std::string which;
  for (Target t : kAllTargets) {
    Json cfg = {{"command", "falsify"}, {"target", target_name(t)}, {"seed", 1234},
                {"samples", t == Target::LemmaCertificates ? 6 : 2000}};
    if (t == Target::LemmaCertificates) cfg["grid"] = {{"n_u", 48}, {"n_lambda", 48}};
    auto once = [&](const char* threads) {
      ::setenv(kThreadsEnv, threads, 1);
      auto rep = cli::run_command(cli::config_from_json(cfg)).report;
      rep.erase("wall_seconds");
      return rep.dump();
    };
    const auto a = once("1");
    const auto b = once("3");
    const auto c = once("1");
    if (a != b || a != c) {
      ++differing;
      which += " " + std::string(target_name(t));
    }
  }
  ::unsetenv(kThreadsEnv);
  return {differing == 0, std::to_string(std::size(kAllTargets)) +
                              " targets rerun at 1 and 3 threads, " + std::to_string(differing) +
                              " differ" + which};
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "Jensen coefficient of ExpWeight", jcoeff_exp_weight},
      {2, "classical operator Jensen inequality", classical_jensen},
      {3, "lemma certificates", lemma_certificates},
      {4, "chain equality at zero spread", equality_at_zero_spread},
      {5, "cubic target certify fixtures", example_fixtures},
      {6, "per-lambda counterexample campaign", cor21_counterexample},
      {7, "falsification campaigns at 1e5 samples", falsification_campaigns},
      {8, "classical outer inequalities", outer_inequalities},
      {9, "campaign determinism", determinism},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    Outcome v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title
              << " | " << v.detail << std::endl;
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
