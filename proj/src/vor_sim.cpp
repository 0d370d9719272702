#include "vorcursor/vor_sim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "vorcursor/error.hpp"

namespace vorcursor {
namespace {

// Stream tags for per-trial random streams.
constexpr std::uint64_t kRenderStream = 0x52454e44;  // "REND"
constexpr std::uint64_t kGazeStream = 0x47415a45;    // "GAZE"

double clamp_abs(double v, double limit) { return std::clamp(v, -limit, limit); }

}  // namespace

void VorModel::validate() const {
    if (!(gain > 0.0 && gain <= 1.2)) throw ConfigError("vor.gain must lie in (0, 1.2]");
}

void SmoothUserModel::validate() const {
    if (!(kp > 0.0)) throw ConfigError("smooth.kp must be positive");
    if (!(rate_limit_dps > 0.0)) throw ConfigError("smooth.rate_limit_dps must be positive");
    if (stop_radius_px && !(*stop_radius_px >= 0.0)) throw ConfigError("smooth.stop_radius_px must be non-negative");
}

void SaccadicUserModel::validate() const {
    if (!(reaction_delay_s >= 0.0) || !(fixation_settle_s >= 0.0))
        throw ConfigError("saccadic delays must be non-negative");
    if (max_corrections < 0) throw ConfigError("saccadic.max_corrections must be non-negative");
}

void SimConfig::validate() const {
    screen.validate();
    eye.validate();
    noise.validate();
    detector.validate();
    control.validate();
    saccadic_noise.validate();
    vor.validate();
    smooth_user.validate();
    saccadic_user.validate();
    if (!(frame_rate_hz > 0.0)) throw ConfigError("frame rate must be positive");
    if (!(timeout_s > 0.0)) throw ConfigError("timeout must be positive");
    if (settle_frames < 1) throw ConfigError("settle_frames must be at least 1");
    if (!(head_limits.rate_limit_dps > 0.0 && head_limits.max_angle_deg > 0.0 && head_limits.max_angle_deg < 90.0))
        throw ConfigError("head limits must be positive (angle below 90 degrees)");
}

std::string_view mode_name(Mode mode) { return mode == Mode::Smooth ? "smooth" : "saccadic"; }

Mode parse_mode(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "smooth") return Mode::Smooth;
    if (lower == "saccadic") return Mode::Saccadic;
    throw ConfigError("unknown mode '" + std::string(text) + "' (expected smooth or saccadic)");
}

std::string_view trial_status_name(TrialStatus status) {
    switch (status) {
        case TrialStatus::Idle: return "idle";
        case TrialStatus::Running: return "running";
        case TrialStatus::Success: return "success";
        case TrialStatus::Timeout: return "timeout";
        case TrialStatus::Miss: return "miss";
    }
    return "idle";
}

EyeState vor_eye_state(const HeadState& head, Vec2 gaze_direction_deg, const VorModel& vor) {
    return {vor.gain * (gaze_direction_deg.x - head.yaw_deg), vor.gain * (gaze_direction_deg.y - head.pitch_deg)};
}

Vec2 gaze_direction_for_screen_point(Vec2 point_px, const ScreenConfig& screen) {
    const double cmpp = cm_per_pixel(screen);
    const double d = screen.viewing_distance_cm;
    return {rad_to_deg(std::atan((point_px.x - screen.center_x()) * cmpp / d)),
            rad_to_deg(std::atan(-(point_px.y - screen.center_y()) * cmpp / d))};
}

TrialSimulator::TrialSimulator(const SimConfig& config, Mode mode, const TargetRect& target, std::uint64_t seed,
                               double session_offset_s)
    : config_(config), session_offset_s_(session_offset_s), gaze_rng_(derive_seed(seed, kGazeStream)) {
    config_.validate();
    state_.mode = mode;
    state_.target = target;
    state_.seed = seed;
    state_.cursor.pos = {config_.screen.center_x(), config_.screen.center_y()};
}

long TrialSimulator::frames_for(double seconds) const {
    return std::lround(seconds * config_.frame_rate_hz);
}

void TrialSimulator::calibrate() {
    // Cursor at screen center, head neutral, eyes on the cursor.
    const Vec2 center{config_.screen.center_x(), config_.screen.center_y()};
    state_.head = {};
    state_.cursor.pos = center;
    gaze_point_ = center;
    state_.eye = vor_eye_state(state_.head, gaze_direction_for_screen_point(center, config_.screen), config_.vor);
    const GrayFrame frame =
        render_eye_frame(state_.eye, config_.eye, config_.noise, derive_seed(derive_seed(state_.seed, kRenderStream), ~0ULL));
    Calibrator calibrator;
    state_.baseline = calibrator.calibrate(detect_pupil(frame, config_.detector).pupil, state_.clock_frame);
}

void TrialSimulator::recalibrate_here() {
    if (!state_.pupil) throw NoPupilFound();
    state_.baseline = CalibrationBaseline{state_.pupil->center, state_.clock_frame};
}

void TrialSimulator::begin() {
    if (!state_.baseline) calibrate();
    state_.cursor.pos = clamp_to_screen(config_.start_px, config_.screen);
    gaze_point_ = state_.cursor.pos;
    const Vec2 start_dir = gaze_direction_for_screen_point(state_.cursor.pos, config_.screen);
    if (state_.mode == Mode::Smooth) {
        // The smooth user rests with the head aimed at the cursor, eyes
        // centred, so the cursor holds still until the head moves.
        state_.head.yaw_deg = clamp_abs(start_dir.x, config_.head_limits.max_angle_deg);
        state_.head.pitch_deg = clamp_abs(start_dir.y, config_.head_limits.max_angle_deg);
    } else {
        state_.head = {};
        next_saccade_frame_ = frames_for(config_.saccadic_user.reaction_delay_s);
        next_landing_frame_ = -1;
    }
    state_.head.yaw_rate_dps = state_.head.pitch_rate_dps = 0.0;
    state_.eye = vor_eye_state(state_.head, start_dir, config_.vor);
    state_.clock_frame = 0;
    state_.path.clear();
    state_.status = free_run_ ? TrialStatus::Idle : TrialStatus::Running;
    state_.timer_start_frame.reset();
    state_.first_entry_frame.reset();
    still_frames_ = 0;
    corrections_used_ = 0;
}

void TrialSimulator::set_external_head_rates(std::optional<Vec2> rates_dps) {
    if (rates_dps) {
        const double lim = config_.head_limits.rate_limit_dps;
        rates_dps = Vec2{clamp_abs(rates_dps->x, lim), clamp_abs(rates_dps->y, lim)};
    }
    external_rates_ = rates_dps;
}

Vec2 TrialSimulator::scripted_smooth_rates() const {
    const SmoothUserModel& user = config_.smooth_user;
    const TargetRect& target = state_.target;
    const double stop = user.stop_radius_px.value_or(target.half_width());
    const Vec2 to_target = target.center - state_.cursor.pos;
    if (std::abs(to_target.x) <= stop && std::abs(to_target.y) <= stop) return {};
    const Vec2 error = gaze_direction_for_screen_point(target.center, config_.screen) -
                       gaze_direction_for_screen_point(state_.cursor.pos, config_.screen);
    const double lim = std::min(user.rate_limit_dps, config_.head_limits.rate_limit_dps);
    return {clamp_abs(user.kp * error.x, lim), clamp_abs(user.kp * error.y, lim)};
}

void TrialSimulator::integrate_head(Vec2 rates_dps) {
    const double lim = config_.head_limits.rate_limit_dps;
    const double max_angle = config_.head_limits.max_angle_deg;
    HeadState& head = state_.head;
    head.yaw_rate_dps = clamp_abs(rates_dps.x, lim);
    head.pitch_rate_dps = clamp_abs(rates_dps.y, lim);
    head.yaw_deg = clamp_abs(head.yaw_deg + head.yaw_rate_dps * config_.dt(), max_angle);
    head.pitch_deg = clamp_abs(head.pitch_deg + head.pitch_rate_dps * config_.dt(), max_angle);
}

std::optional<Vec2> TrialSimulator::observe_pupil() {
    state_.eye = vor_eye_state(state_.head, gaze_direction_for_screen_point(gaze_point_, config_.screen), config_.vor);
    state_.pupil.reset();
    const std::uint64_t frame_seed = derive_seed(derive_seed(state_.seed, kRenderStream), state_.clock_frame);
    GrayFrame frame;
    try {
        frame = render_eye_frame(state_.eye, config_.eye, config_.noise, frame_seed);
    } catch (const Error&) {
        // Rotation beyond what the camera can image: no pupil this frame.
        return std::nullopt;
    }
    DetectResult detection = detect_pupil(frame, config_.detector);
    if (keep_frames_) last_frame_ = std::move(frame);
    if (!detection.pupil) return std::nullopt;
    const PupilDetection& p = *detection.pupil;
    state_.pupil = PupilSummary{p.center, p.radius_px, p.score};
    if (!state_.timer_start_frame && state_.baseline) {
        const Vec2 offset = state_.baseline->pupil_px - p.center;
        if (std::abs(offset.x) > config_.control.deadband_px || std::abs(offset.y) > config_.control.deadband_px)
            state_.timer_start_frame = state_.clock_frame;
    }
    return p.center;
}

void TrialSimulator::record_sample(bool detected) {
    if (free_run_) return;  // no trial, no trace
    PathSample s;
    s.frame = state_.clock_frame;
    s.t_s = state_.clock_frame * config_.dt();
    s.cursor = state_.cursor.pos;
    s.head_yaw = state_.head.yaw_deg;
    s.head_pitch = state_.head.pitch_deg;
    s.eye_yaw = state_.eye.yaw_deg;
    s.eye_pitch = state_.eye.pitch_deg;
    s.detected = detected;
    state_.path.push_back(s);
}

void TrialSimulator::step() {
    if (finished() && !free_run_) return;
    if (state_.mode == Mode::Smooth) {
        step_smooth();
    } else {
        step_saccadic();
    }
    if (!free_run_ && state_.status == TrialStatus::Running && !finished() &&
        state_.clock_frame + 1 >= frames_for(config_.timeout_s)) {
        state_.status = TrialStatus::Timeout;
    }
    ++state_.clock_frame;
}

void TrialSimulator::step_smooth() {
    const bool scripted = !external_rates_ && !free_run_ && state_.status == TrialStatus::Running;
    const Vec2 rates = external_rates_ ? *external_rates_ : (scripted ? scripted_smooth_rates() : Vec2{});
    integrate_head(rates);

    // Closed loop: the eyes stay on the cursor wherever it is.
    gaze_point_ = state_.cursor.pos;
    const std::optional<Vec2> pupil = observe_pupil();
    Vec2 delta{};
    if (pupil && state_.baseline) {
        delta = cursor_displacement(state_.baseline->pupil_px, *pupil, config_.control);
        state_.cursor = smooth_update(state_.cursor, delta, config_.screen);
    }
    record_sample(pupil.has_value());

    if (state_.status != TrialStatus::Running) return;
    const bool inside = state_.target.contains(state_.cursor.pos);
    if (inside && !state_.first_entry_frame) state_.first_entry_frame = state_.clock_frame;
    const bool halted = rates.x == 0.0 && rates.y == 0.0 && delta.x == 0.0 && delta.y == 0.0;
    still_frames_ = inside && halted ? still_frames_ + 1 : 0;
    if (!free_run_ && still_frames_ >= config_.settle_frames) state_.status = TrialStatus::Success;
}

void TrialSimulator::step_saccadic() {
    if (external_rates_) {
        integrate_head(*external_rates_);
    } else {
        integrate_head({});
    }
    const long k = state_.clock_frame;
    if (state_.status == TrialStatus::Running && k == next_saccade_frame_) {
        gaze_point_ = state_.target.center;
        next_landing_frame_ = k + frames_for(config_.saccadic_user.fixation_settle_s);
    }

    // The camera pipeline only matters until the timer has started; the
    // cursor itself follows the external gaze estimate.
    bool detected = false;
    if (!state_.timer_start_frame || keep_frames_) {
        detected = observe_pupil().has_value();
    } else {
        state_.eye = vor_eye_state(state_.head, gaze_direction_for_screen_point(gaze_point_, config_.screen),
                                   config_.vor);
    }

    bool landed = false;
    if (state_.status == TrialStatus::Running && k == next_landing_frame_) {
        const Vec2 estimate =
            gaze_estimate(state_.target.center, config_.saccadic_noise, session_offset_s_ + k * config_.dt(),
                          config_.screen, gaze_rng_);
        state_.cursor = saccadic_update(state_.cursor, estimate, config_.screen);
        next_landing_frame_ = -1;
        landed = true;
    }
    record_sample(detected);
    if (!landed) return;

    const bool inside = state_.target.contains(state_.cursor.pos);
    if (inside) {
        if (!state_.first_entry_frame) state_.first_entry_frame = k;
        state_.status = TrialStatus::Success;
        return;
    }
    const double error_radius = visual_angle_to_screen_px(config_.saccadic_noise.sigma_deg, config_.screen);
    const double miss = distance(state_.cursor.pos, state_.target.center);
    if (corrections_used_ < config_.saccadic_user.max_corrections && miss > error_radius) {
        ++corrections_used_;
        next_saccade_frame_ = k + std::max(1L, frames_for(config_.saccadic_user.reaction_delay_s));
    } else {
        // The user accepts the landing; the trial ends with a miss.
        state_.status = TrialStatus::Miss;
    }
}

TrialResult TrialSimulator::result() const {
    TrialResult r;
    r.seed = state_.seed;
    r.mode = state_.mode;
    r.target_size_px = state_.target.size_px;
    r.final_pos = state_.cursor.pos;
    r.distance_to_center_px = distance(state_.cursor.pos, state_.target.center);
    r.path = state_.path;
    r.frames = state_.clock_frame;
    r.success = state_.status == TrialStatus::Success && state_.target.contains(state_.cursor.pos);
    if (r.success && state_.first_entry_frame) {
        const long start = state_.timer_start_frame.value_or(0);
        r.time_to_enter_s = std::max(0L, *state_.first_entry_frame - start) * config_.dt();
    }
    return r;
}

TrialResult run_trial(Mode mode, const TargetRect& target, const SimConfig& config, std::uint64_t seed,
                      double session_offset_s) {
    TrialSimulator sim(config, mode, target, seed, session_offset_s);
    sim.calibrate();
    sim.begin();
    while (!sim.finished()) sim.step();
    return sim.result();
}

}  // namespace vorcursor
