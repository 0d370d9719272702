#include "vorcursor/gaze_control.hpp"

#include <algorithm>
#include <cmath>

#include "vorcursor/error.hpp"

namespace vorcursor {

void ControlParams::validate() const {
    if (!(gain_px_per_px > 0.0)) throw ConfigError("control.gain must be positive");
    if ((axis_sign_x != 1 && axis_sign_x != -1) || (axis_sign_y != 1 && axis_sign_y != -1))
        throw ConfigError("control axis signs must be +1 or -1");
    if (!(deadband_px >= 0.0)) throw ConfigError("control.deadband_px must be non-negative");
}

void SaccadicNoiseModel::validate() const {
    if (!(sigma_deg >= 0.0)) throw ConfigError("saccadic.sigma_deg must be non-negative");
    if (!(drift_deg_per_min >= 0.0)) throw ConfigError("saccadic.drift_deg_per_min must be non-negative");
}

const CalibrationBaseline& Calibrator::calibrate(const std::optional<PupilDetection>& detection, long frame_index) {
    if (!detection) throw NoPupilFound();
    baseline_ = vorcursor::calibrate(*detection, frame_index);
    return *baseline_;
}

CalibrationBaseline calibrate(const PupilDetection& detection, long frame_index) {
    return {detection.center, frame_index};
}

Vec2 table1_new_position(Vec2 baseline, Vec2 new_pupil) {
    const Vec2 diff = baseline - new_pupil;
    const double x = diff.x < baseline.x ? diff.x + baseline.x : diff.x - baseline.x;
    const double y = diff.y < baseline.y ? diff.y - baseline.y : diff.y + baseline.y;
    return {x, y};
}

Vec2 cursor_displacement(Vec2 baseline, Vec2 new_pupil, const ControlParams& params) {
    const Vec2 offset = baseline - new_pupil;
    if (std::abs(offset.x) <= params.deadband_px && std::abs(offset.y) <= params.deadband_px) return {};
    return params.gain_px_per_px * Vec2{params.axis_sign_x * offset.x, params.axis_sign_y * offset.y};
}

Vec2 clamp_to_screen(Vec2 pos, const ScreenConfig& screen) {
    return {std::clamp(pos.x, 0.0, static_cast<double>(screen.width_px - 1)),
            std::clamp(pos.y, 0.0, static_cast<double>(screen.height_px - 1))};
}

CursorState smooth_update(const CursorState& cursor, Vec2 delta, const ScreenConfig& screen) {
    return {clamp_to_screen(cursor.pos + delta, screen)};
}

Vec2 gaze_estimate(Vec2 true_gaze_px, const SaccadicNoiseModel& model, double session_time_s,
                   const ScreenConfig& screen, Rng& rng) {
    const double sigma_px = visual_angle_to_screen_px(model.sigma_deg, screen);
    // Both deviates are drawn even when sigma is zero so that the stream
    // position does not depend on the noise level.
    const Vec2 noise{sigma_px * rng.normal(), sigma_px * rng.normal()};
    const double drift_px = visual_angle_to_screen_px(model.drift_deg_per_min * session_time_s / 60.0, screen);
    const double bearing = deg_to_rad(model.drift_direction_deg);
    return true_gaze_px + noise + drift_px * Vec2{std::cos(bearing), std::sin(bearing)};
}

CursorState saccadic_update(const CursorState&, Vec2 estimate, const ScreenConfig& screen) {
    return {clamp_to_screen(estimate, screen)};
}

}  // namespace vorcursor
