#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vorcursor/vor_sim.hpp"

namespace vorcursor {

struct ExperimentPlan {
    std::vector<double> square_sizes_px{100.0, 50.0, 25.0, 9.0};
    Vec2 target_center{960.0, 540.0};
    Vec2 start{0.0, 0.0};
    int repetitions = 10;
    std::vector<Mode> modes{Mode::Smooth, Mode::Saccadic};
    std::uint64_t seed_base = 1;
    /// Trials sharing one calibration (and one drift bearing). Trials are
    /// numbered repetition-major over the sizes, per mode.
    int trials_per_session = 40;
    /// Session clock advance between consecutive trial starts.
    double inter_trial_s = 20.0;

    void validate() const;
};

/// Where a trial sits in the plan and which seed/session it ran with.
struct TrialSlot {
    Mode mode = Mode::Smooth;
    int size_index = 0;
    double size_px = 0.0;
    int repetition = 0;
    std::uint64_t seed = 0;
    long session = 0;
    double session_offset_s = 0.0;
    double drift_direction_deg = 0.0;
};

struct TrialRecord {
    TrialSlot slot;
    TrialResult result;
};

struct AccuracyRow {
    Mode mode = Mode::Smooth;
    double size_px = 0.0;
    int n = 0;
    double success_pct = 0.0;
    double mean_dist_px = 0.0;
    double mean_dist_cm = 0.0;
    /// Spread of the final distances (precision proxy).
    double sd_dist_px = 0.0;
    std::optional<double> mean_time_s;
};

struct ExperimentResult {
    std::vector<AccuracyRow> table;
    std::vector<TrialRecord> trials;
};

/// Deterministic slot for (mode, size index, repetition); independent of the
/// number of repetitions in the plan.
TrialSlot plan_slot(const ExperimentPlan& plan, Mode mode, int size_index, int repetition);

/// Runs a single slot with the plan's geometry.
TrialResult run_slot(const ExperimentPlan& plan, const TrialSlot& slot, const SimConfig& config);

ExperimentResult run_experiment(const ExperimentPlan& plan, const SimConfig& config);

/// One row per (mode, size) in order of first appearance.
std::vector<AccuracyRow> aggregate(const std::vector<TrialRecord>& trials, const ScreenConfig& screen);

struct ModeMetric {
    Mode mode = Mode::Smooth;
    double mean_px = 0.0;
    double mean_cm = 0.0;
};

/// Mean final distance to the target centre per mode, over all sizes.
std::vector<ModeMetric> resolution_report(const std::vector<TrialRecord>& trials, const ScreenConfig& screen);

struct ModeTime {
    Mode mode = Mode::Smooth;
    std::optional<double> mean_time_s;  // empty when no trial succeeded
    int successes = 0;
};

/// Mean time-to-enter per mode over successful trials.
std::vector<ModeTime> time_report(const std::vector<TrialRecord>& trials);

inline constexpr const char* kAccuracyHeader = "mode,size_px,n,success_pct,mean_dist_px,mean_dist_cm,mean_time_s";
inline constexpr const char* kTrialHeader =
    "mode,size_px,repetition,seed,session,session_offset_s,success,final_x,final_y,dist_px,time_s,frames";
inline constexpr const char* kPathHeader =
    "frame,t_s,cursor_x,cursor_y,head_yaw,head_pitch,eye_yaw,eye_pitch,detected";
inline constexpr const char* kCurveHeader = "mode,t_s,x,y";

void write_accuracy_csv(std::ostream& out, const std::vector<AccuracyRow>& rows);
void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& trials);
void write_path_csv(std::ostream& out, const std::vector<PathSample>& path);
/// Time/position curves for several trials (one block per mode label).
void write_curve_csv(std::ostream& out, const std::vector<std::pair<Mode, const TrialResult*>>& curves);

/// File variants; throw IoError naming the path.
void export_accuracy_csv(const std::vector<AccuracyRow>& rows, const std::filesystem::path& path);
void export_trials_csv(const std::vector<TrialRecord>& trials, const std::filesystem::path& path);
void export_path_csv(const std::vector<PathSample>& path_samples, const std::filesystem::path& path);
void export_curve_csv(const std::vector<std::pair<Mode, const TrialResult*>>& curves,
                      const std::filesystem::path& path);

/// Table-style text summary with the human-study reference values alongside.
std::string summary_report(const ExperimentResult& result, const ScreenConfig& screen);

/// Formats a double for CSV output: fixed, 6 decimals, no negative zero.
std::string csv_number(double value);

}  // namespace vorcursor
