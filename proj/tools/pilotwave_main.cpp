#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pilotwave/errors.hpp"
#include "pilotwave/scenario.hpp"

namespace {

using nlohmann::json;

std::string load_scenario_text(const std::string& config,
                               const std::string& builtin) {
  if (!builtin.empty()) {
    for (const auto& s : pilotwave::builtin_scenarios()) {
      if (s.name == builtin) return s.text;
    }
    throw pilotwave::ConfigError("unknown built-in scenario '" + builtin +
                                 "' (see list-scenarios)");
  }
  std::ifstream in(config);
  if (!in) {
    throw pilotwave::ConfigError("cannot read scenario file " + config);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int error_record(const std::string& type, const std::string& message) {
  json err;
  err["error"] = {{"type", type}, {"message", message}};
  std::cerr << err.dump() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pilot-wave market dynamics laboratory"};
  app.require_subcommand(1);

  std::string config, builtin, out_dir;
  std::int64_t seed = -1;
  int threads = 0;

  auto add_source_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", config, "scenario file (JSON)");
    cmd->add_option("--scenario", builtin, "built-in scenario name");
  };

  CLI::App* run = app.add_subcommand("run", "execute a scenario");
  add_source_flags(run);
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--threads", threads, "cap worker threads");

  CLI::App* validate =
      app.add_subcommand("validate", "check a scenario without running it");
  add_source_flags(validate);

  app.add_subcommand("list-scenarios", "list the built-in scenario library");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list-scenarios")) {
      for (const auto& s : pilotwave::builtin_scenarios()) {
        std::string description;
        try {
          description = json::parse(s.text).value("description", "");
        } catch (...) {
        }
        std::printf("%-32s %s\n", s.name.c_str(), description.c_str());
      }
      return 0;
    }

    if (config.empty() == builtin.empty()) {
      return error_record("usage", "give exactly one of --config / --scenario");
    }
    const std::string text = load_scenario_text(config, builtin);

    if (app.got_subcommand("validate")) {
      pilotwave::ValidationReport report =
          pilotwave::validate_scenario_text(text);
      json j;
      j["valid"] = report.ok();
      j["errors"] = report.errors;
      std::cout << j.dump(2) << "\n";
      return report.ok() ? 0 : 1;
    }

    pilotwave::RunOverrides overrides;
    if (seed >= 0) overrides.seed = static_cast<std::uint64_t>(seed);
    if (threads > 0) overrides.threads = threads;
    pilotwave::RunResult result =
        pilotwave::run_scenario_text(text, out_dir, overrides);
    json j;
    j["manifest"] = result.manifest_path.string();
    j["files"] = result.files;
    std::cout << j.dump(2) << "\n";
    return result.exit_code;
  } catch (const pilotwave::ConfigError& e) {
    return error_record("config", e.what());
  } catch (const pilotwave::PreconditionError& e) {
    return error_record("precondition", e.what());
  } catch (const pilotwave::ContractError& e) {
    return error_record("contract", e.what());
  } catch (const pilotwave::NumericError& e) {
    return error_record("numeric", e.what());
  } catch (const std::exception& e) {
    return error_record("internal", e.what());
  }
}
