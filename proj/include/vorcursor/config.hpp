#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vorcursor/experiments.hpp"
#include "vorcursor/vor_sim.hpp"

namespace vorcursor {

/// Eye-state sweep for the render command (inclusive ranges, degrees).
struct RenderSweep {
    double yaw_from = -10.0;
    double yaw_to = 10.0;
    double yaw_step = 1.0;
    double pitch_from = 0.0;
    double pitch_to = 0.0;
    double pitch_step = 1.0;

    void validate() const;
    std::vector<EyeState> states() const;
};

struct AppConfig {
    SimConfig sim;
    ExperimentPlan plan;
    RenderSweep render;
    CameraConfig camera;

    void validate() const;
};

/// Applies one `key = value` setting. Throws ConfigError on unknown keys or
/// unparsable values.
void apply_setting(AppConfig& config, std::string_view key, std::string_view value);

/// All recognised keys, in documentation order.
const std::vector<std::string>& known_setting_keys();

/// Parses a key=value config text ('#' comments, blank lines ignored).
/// Errors are reported as "<source>:<line>: message".
AppConfig parse_config(std::string_view text, const std::string& source = "config");
void apply_config_text(AppConfig& config, std::string_view text, const std::string& source = "config");

/// Reads and parses a config file; IoError if it cannot be read.
AppConfig load_config(const std::filesystem::path& path);

struct RunEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct RunSection {
    std::string name;
    int line = 0;
    std::vector<RunEntry> entries;
};

/// Splits a run file into `[name]` sections of key=value entries.
std::vector<RunSection> parse_run_file(std::string_view text, const std::string& source = "run");

struct TrialSpec {
    std::string name;
    Mode mode = Mode::Smooth;
    TargetRect target;
    std::vector<std::uint64_t> seeds;
    AppConfig config;
};

struct ExperimentSpec {
    std::string name;
    AppConfig config;  // config.plan holds the plan
};

/// Interprets sections as single-trial definitions (keys: mode, target,
/// target.size, target.center, seeds, plus any config key as an override).
std::vector<TrialSpec> trial_specs(const std::vector<RunSection>& sections, const AppConfig& base,
                                   const std::string& source = "run");

/// Interprets sections as experiment plans (keys: modes, sizes, repetitions,
/// seed, plus any config key as an override).
std::vector<ExperimentSpec> experiment_specs(const std::vector<RunSection>& sections, const AppConfig& base,
                                             const std::string& source = "run");

/// "1..5" or "1,2,9" (mixing allowed: "1..3,7").
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace vorcursor
