#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "vorcursor/gaze_control.hpp"
#include "vorcursor/geometry.hpp"
#include "vorcursor/pupil_detect.hpp"
#include "vorcursor/synth_eye.hpp"
#include "vorcursor/vec2.hpp"

namespace vorcursor {

struct HeadState {
    double yaw_deg = 0.0;
    double pitch_deg = 0.0;
    double yaw_rate_dps = 0.0;
    double pitch_rate_dps = 0.0;
};

struct HeadLimits {
    double rate_limit_dps = 60.0;
    double max_angle_deg = 45.0;
};

struct VorModel {
    double gain = 1.0;
    void validate() const;
};

/// Scripted closed-loop user: turns the head at a rate proportional to the
/// visual angle between cursor and target, and stops once the cursor is
/// inside the stop square.
struct SmoothUserModel {
    double kp = 1.9;
    double rate_limit_dps = 60.0;
    /// Half-width of the stop square; empty means the target half-width.
    std::optional<double> stop_radius_px;
    void validate() const;
};

/// Scripted open-loop user: looks at the target after a reaction delay; the
/// cursor jumps once the gaze estimate has settled.
struct SaccadicUserModel {
    double reaction_delay_s = 0.3;
    double fixation_settle_s = 0.2;
    int max_corrections = 1;
    void validate() const;
};

enum class Mode { Smooth, Saccadic };

std::string_view mode_name(Mode mode);
/// Parses "smooth" / "saccadic" (case-insensitive); throws ConfigError otherwise.
Mode parse_mode(std::string_view text);

/// Axis-aligned square target on screen.
struct TargetRect {
    Vec2 center{960.0, 540.0};
    double size_px = 100.0;

    double half_width() const { return size_px / 2.0; }
    bool contains(Vec2 p) const {
        return std::abs(p.x - center.x) <= half_width() && std::abs(p.y - center.y) <= half_width();
    }
};

/// Everything a trial needs besides mode, target and seed.
struct SimConfig {
    ScreenConfig screen;
    EyeCameraModel eye;
    NoiseParams noise;
    DetectorConfig detector;
    ControlParams control;
    SaccadicNoiseModel saccadic_noise;
    VorModel vor;
    HeadLimits head_limits;
    SmoothUserModel smooth_user;
    SaccadicUserModel saccadic_user;
    double frame_rate_hz = 60.0;
    double timeout_s = 30.0;
    Vec2 start_px{0.0, 0.0};
    /// Frames the cursor must rest inside the target, user halted, before the trial ends.
    int settle_frames = 10;

    void validate() const;
    double dt() const { return 1.0 / frame_rate_hz; }
};

struct PathSample {
    long frame = 0;
    double t_s = 0.0;
    Vec2 cursor;
    double head_yaw = 0.0;
    double head_pitch = 0.0;
    double eye_yaw = 0.0;
    double eye_pitch = 0.0;
    bool detected = false;
};

/// Miss: the user halted with the cursor outside the target (saccadic only).
enum class TrialStatus { Idle, Running, Success, Timeout, Miss };
std::string_view trial_status_name(TrialStatus status);

struct PupilSummary {
    Vec2 center;
    double radius_px = 0.0;
    double score = 0.0;
};

struct SimState {
    long clock_frame = 0;
    HeadState head;
    EyeState eye;
    CursorState cursor;
    std::optional<CalibrationBaseline> baseline;
    TargetRect target;
    Mode mode = Mode::Smooth;
    std::uint64_t seed = 0;
    TrialStatus status = TrialStatus::Idle;
    std::optional<PupilSummary> pupil;
    std::optional<long> timer_start_frame;
    std::optional<long> first_entry_frame;
    std::vector<PathSample> path;
};

struct TrialResult {
    bool success = false;
    Vec2 final_pos;
    double distance_to_center_px = 0.0;
    std::optional<double> time_to_enter_s;
    std::vector<PathSample> path;
    std::uint64_t seed = 0;
    Mode mode = Mode::Smooth;
    double target_size_px = 0.0;
    long frames = 0;
};

/// Eye-in-head rotation that keeps the gaze on `gaze_direction`:
/// gain * (gaze - head), per axis.
EyeState vor_eye_state(const HeadState& head, Vec2 gaze_direction_deg, const VorModel& vor);

/// Visual direction (yaw, pitch in degrees) from the eye to a screen point.
Vec2 gaze_direction_for_screen_point(Vec2 point_px, const ScreenConfig& screen);

/// Fixed-timestep closed-loop simulator for one trial. A single owner calls
/// step(); snapshots of state() are plain copies.
class TrialSimulator {
public:
    TrialSimulator(const SimConfig& config, Mode mode, const TargetRect& target, std::uint64_t seed,
                   double session_offset_s = 0.0);

    /// Captures the baseline with the cursor at screen center, head and eye neutral.
    /// Throws NoPupilFound when the calibration frame has no detectable pupil.
    void calibrate();

    /// Replaces the baseline with the most recent detection, leaving head and
    /// cursor where they are. Throws NoPupilFound if the last frame had none.
    void recalibrate_here();

    /// Places the cursor at the configured start and starts the clock.
    void begin();

    /// Advances one frame. No-op once the trial has finished, unless free-running.
    void step();

    bool finished() const {
        return state_.status == TrialStatus::Success || state_.status == TrialStatus::Timeout ||
               state_.status == TrialStatus::Miss;
    }
    const SimState& state() const { return state_; }
    const SimConfig& config() const { return config_; }
    TrialResult result() const;

    /// Overrides the scripted head driver with externally supplied rates
    /// (live steering). Rates are clamped to the head limits.
    void set_external_head_rates(std::optional<Vec2> rates_dps);
    std::optional<Vec2> external_head_rates() const { return external_rates_; }

    /// Keeps the simulation stepping without a trial: no scripted user, no
    /// termination, no path recording. A finished trial keeps its status.
    void set_free_run(bool free_run) { free_run_ = free_run; }

    /// Most recent rendered eye frame (empty before the first render).
    const GrayFrame& last_frame() const { return last_frame_; }
    void set_keep_frames(bool keep) { keep_frames_ = keep; }

private:
    void step_smooth();
    void step_saccadic();
    Vec2 scripted_smooth_rates() const;
    void integrate_head(Vec2 rates_dps);
    /// Renders and detects the current eye state; updates pupil/timer fields.
    std::optional<Vec2> observe_pupil();
    void record_sample(bool detected);
    long frames_for(double seconds) const;

    SimConfig config_;
    SimState state_;
    double session_offset_s_ = 0.0;
    Rng gaze_rng_;
    Vec2 gaze_point_;
    std::optional<Vec2> external_rates_;
    bool free_run_ = false;
    bool keep_frames_ = false;
    GrayFrame last_frame_;
    int still_frames_ = 0;

    // Saccadic timeline, in frames.
    long next_saccade_frame_ = 0;
    long next_landing_frame_ = -1;
    int corrections_used_ = 0;
};

/// Full trial: calibration, start placement, stepping to halt or timeout.
TrialResult run_trial(Mode mode, const TargetRect& target, const SimConfig& config, std::uint64_t seed,
                      double session_offset_s = 0.0);

}  // namespace vorcursor
