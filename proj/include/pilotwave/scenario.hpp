#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pilotwave {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kScenarioSchema = "pilotwave/scenario-v1";

/// Ready-to-run scenario shipped with the tool, embedded at build time.
struct BuiltinScenario {
  std::string name;
  std::string text;
};

const std::vector<BuiltinScenario>& builtin_scenarios();

struct ValidationReport {
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

/// Static validation of a scenario file: schema id, kind, cross-field
/// requirements. Collects every violation instead of stopping at the first.
ValidationReport validate_scenario_text(const std::string& text);
ValidationReport validate_scenario_file(const std::filesystem::path& path);

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

struct RunResult {
  int exit_code = 0;
  std::filesystem::path manifest_path;
  std::vector<std::string> files;  // emitted artifact names
};

/// Executes a scenario and writes its artifacts plus manifest.json into
/// out_dir (created if needed). Deterministic per (config, seed). Throws
/// on invalid configuration or numerical failure.
RunResult run_scenario_text(const std::string& text,
                            const std::filesystem::path& out_dir,
                            const RunOverrides& overrides = {});
RunResult run_scenario_file(const std::filesystem::path& config_path,
                            const std::filesystem::path& out_dir,
                            const RunOverrides& overrides = {});

}  // namespace pilotwave
