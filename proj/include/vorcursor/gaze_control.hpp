#pragma once

#include <optional>

#include "vorcursor/geometry.hpp"
#include "vorcursor/pupil_detect.hpp"
#include "vorcursor/rng.hpp"
#include "vorcursor/vec2.hpp"

namespace vorcursor {

/// Pupil position captured while the cursor sits at screen center.
struct CalibrationBaseline {
    Vec2 pupil_px;
    long captured_at = 0;
};

struct CursorState {
    Vec2 pos;
};

struct ControlParams {
    /// Screen pixels of cursor motion per image pixel of pupil offset, per frame.
    double gain_px_per_px = 1.0;
    int axis_sign_x = 1;
    int axis_sign_y = 1;
    /// Offsets with both components at or below this (image px) are ignored.
    double deadband_px = 1.0;

    void validate() const;
};

struct SaccadicNoiseModel {
    double sigma_deg = 1.0;
    double drift_deg_per_min = 0.5;
    /// Bearing of the calibration drift on screen (0 = +x, 90 = +y), fixed per session.
    double drift_direction_deg = 0.0;

    void validate() const;
};

/// Holds the current baseline; recalibration replaces it.
class Calibrator {
public:
    /// Throws NoPupilFound (and keeps the previous baseline) when the
    /// detection is missing.
    const CalibrationBaseline& calibrate(const std::optional<PupilDetection>& detection, long frame_index);

    const std::optional<CalibrationBaseline>& baseline() const { return baseline_; }

private:
    std::optional<CalibrationBaseline> baseline_;
};

CalibrationBaseline calibrate(const PupilDetection& detection, long frame_index = 0);

/// Literal transcription of the published direction table: the difference
/// (baseline - new) is compared against the baseline per axis. Kept for
/// reference; the control loop uses cursor_displacement.
Vec2 table1_new_position(Vec2 baseline, Vec2 new_pupil);

/// Per-frame cursor displacement from the pupil offset (baseline - new).
Vec2 cursor_displacement(Vec2 baseline, Vec2 new_pupil, const ControlParams& params);

/// Clamps a position to [0, width-1] x [0, height-1].
Vec2 clamp_to_screen(Vec2 pos, const ScreenConfig& screen);

CursorState smooth_update(const CursorState& cursor, Vec2 delta, const ScreenConfig& screen);

/// Estimated gaze point: truth + Gaussian error + linear calibration drift.
Vec2 gaze_estimate(Vec2 true_gaze_px, const SaccadicNoiseModel& model, double session_time_s,
                   const ScreenConfig& screen, Rng& rng);

/// Open-loop jump to the (clamped) estimate.
CursorState saccadic_update(const CursorState& cursor, Vec2 estimate, const ScreenConfig& screen);

}  // namespace vorcursor
