// hcvx: command-line driver.
//
//   hcvx <command> [--config PATH] [--out PATH] [--seed N] [--samples N]
//                  [--format json|csv]
//
// Precedence: command-line flags, then config keys, then built-in defaults.
// Exit codes: 0 ok / nonnegative, 2 violation or witness, 1 error.
// HCVX_THREADS sets the worker count for batch evaluation.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hcvx/cli.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  std::optional<std::string> format;
  std::optional<std::string> target;
};

void warn(const std::string& msg) { std::cerr << "hcvx: warning: " << msg << "\n"; }

hcvx::Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hcvx::ConfigError("cannot read config '" + path + "'");
  try {
    return hcvx::Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw hcvx::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

int run(const std::string& command, const Flags& flags) {
  hcvx::Json j = flags.config.empty() ? hcvx::Json::object() : read_json(flags.config);
  if (!j.is_object()) throw hcvx::ConfigError("config must be an object");
  if (j.contains("command") && j["command"] != command) {
    throw hcvx::ConfigError("config is for command '" + j["command"].dump() +
                            "', not '" + command + "'");
  }
  j["command"] = command;

  if (flags.out) j["out"] = *flags.out;
  if (flags.format) j["format"] = *flags.format;
  if (flags.seed) {
    if (command == "falsify") j["seed"] = *flags.seed;
    else warn("--seed does not apply to " + command + "; ignored");
  }
  if (flags.samples) {
    if (command == "falsify" || command == "jcoeff") j["samples"] = *flags.samples;
    else warn("--samples does not apply to " + command + "; ignored");
  }
  if (flags.target) {
    if (command == "falsify") j["target"] = *flags.target;
    else warn("--target does not apply to " + command + "; ignored");
  }

  const auto rc = hcvx::cli::config_from_json(j);
  const auto outcome = hcvx::cli::run_command(rc);
  const auto text = hcvx::cli::render(outcome, rc.common.format);
  if (rc.common.out) {
    std::ofstream os(*rc.common.out, std::ios::binary);
    if (!os) throw hcvx::ConfigError("cannot write '" + *rc.common.out + "'");
    os << text;
    if (!os) throw hcvx::ConfigError("write to '" + *rc.common.out + "' failed");
  } else {
    std::cout << text;
  }
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional convexity and refined Jensen-type inequalities"};
  app.set_version_flag("--version", std::string("hcvx ") + HCVX_VERSION);
  app.require_subcommand(1);

  Flags flags;
  std::string chosen;
  const char* commands[][2] = {
      {"certify", "certify conditional convexity of f with gate g at v"},
      {"jcoeff", "Jensen coefficient inf h(t)/t over K"},
      {"jensen", "operator Jensen-type inequality for a matrix and unit vector"},
      {"refine", "evaluate refined chains on samples or operators"},
      {"falsify", "seeded Monte Carlo falsification campaign"},
      {"replay", "re-evaluate one instance or report witness"},
      {"sweep", "per-lambda margin profile"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "JSON run config")->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "write the report here instead of stdout");
    sub->add_option("--seed", flags.seed, "campaign seed");
    sub->add_option("--samples", flags.samples, "sample count");
    sub->add_option("--format", flags.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    if (std::string_view(name) == "falsify") {
      sub->add_option("--target", flags.target, "campaign target");
    }
    sub->callback([&chosen, name = std::string(name)] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hcvx::cli::kExitError;
  }

  try {
    return run(chosen, flags);
  } catch (const hcvx::Error& e) {
    std::cerr << "hcvx: " << e.what() << "\n";
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "hcvx: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "hcvx: " << e.what() << "\n";
  }
  return hcvx::cli::kExitError;
}
