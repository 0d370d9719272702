#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "vorcursor/error.hpp"
#include "vorcursor/vor_sim.hpp"

using namespace vorcursor;

namespace {

SimConfig quiet_config() {
    SimConfig c;
    c.noise = NoiseParams::none();
    return c;
}

double path_length(const std::vector<PathSample>& path, Vec2 start) {
    double len = 0.0;
    Vec2 prev = start;
    for (const auto& s : path) {
        len += distance(prev, s.cursor);
        prev = s.cursor;
    }
    return len;
}

// Screen point seen along a world direction (yaw, pitch) from the viewing position.
Vec2 screen_point_for_direction(Vec2 dir_deg, const ScreenConfig& s) {
    const double cmpp = cm_per_pixel(s);
    return {s.center_x() + s.viewing_distance_cm * std::tan(deg_to_rad(dir_deg.x)) / cmpp,
            s.center_y() - s.viewing_distance_cm * std::tan(deg_to_rad(dir_deg.y)) / cmpp};
}

}  // namespace

TEST(VorSim, EyeCounterRotates) {
    const VorModel unit;
    EXPECT_EQ(vor_eye_state({}, {0, 0}, unit).yaw_deg, 0.0);
    const EyeState e = vor_eye_state({10, 0}, {0, 0}, unit);
    EXPECT_DOUBLE_EQ(e.yaw_deg, -10.0);
    EXPECT_DOUBLE_EQ(e.pitch_deg, 0.0);
    EXPECT_DOUBLE_EQ(vor_eye_state({10, 0}, {0, 0}, VorModel{0.9}).yaw_deg, -9.0);
}

TEST(VorSim, ScreenPointDirections) {
    const ScreenConfig s;
    EXPECT_EQ(gaze_direction_for_screen_point({960, 540}, s), (Vec2{0, 0}));
    const double one_deg_px = visual_angle_to_screen_px(1.0, s);
    EXPECT_NEAR(gaze_direction_for_screen_point({960 + one_deg_px, 540}, s).x, 1.0, 1e-12);
    const Vec2 a = gaze_direction_for_screen_point({1200, 300}, s);
    const Vec2 b = gaze_direction_for_screen_point({720, 780}, s);
    EXPECT_NEAR(a.x, -b.x, 1e-12);
    EXPECT_NEAR(a.y, -b.y, 1e-12);
    EXPECT_GT(a.y, 0.0);  // above centre is positive pitch
}

// With gain 1 the world gaze (head + eye) stays on the fixated point for any
// head pose, and the pupil offset tracks (fixation direction - head).
TEST(VorSim, FixationIdentity) {
    const SimConfig cfg;
    const Vec2 point{1300, 400};
    const Vec2 dir = gaze_direction_for_screen_point(point, cfg.screen);
    for (double yaw = -15; yaw <= 15; yaw += 2.5)
        for (double pitch = -15; pitch <= 15; pitch += 2.5) {
            const HeadState head{yaw, pitch};
            const EyeState eye = vor_eye_state(head, dir, cfg.vor);
            const Vec2 seen = screen_point_for_direction({yaw + eye.yaw_deg, pitch + eye.pitch_deg}, cfg.screen);
            ASSERT_LE(distance(seen, point), 0.5);
            const Ellipse e = pupil_image_ellipse(eye, cfg.eye);
            EXPECT_NEAR(e.center.x - cfg.eye.neutral_center.x, cfg.eye.px_per_deg * (dir.x - yaw), 1e-9);
            EXPECT_NEAR(cfg.eye.neutral_center.y - e.center.y, cfg.eye.px_per_deg * (dir.y - pitch), 1e-9);
        }
}

TEST(VorSim, ModeAndStatusNames) {
    EXPECT_EQ(parse_mode("Smooth"), Mode::Smooth);
    EXPECT_EQ(parse_mode("SACCADIC"), Mode::Saccadic);
    EXPECT_THROW(parse_mode("jerky"), ConfigError);
    EXPECT_EQ(mode_name(Mode::Saccadic), "saccadic");
    EXPECT_EQ(trial_status_name(TrialStatus::Miss), "miss");
    EXPECT_EQ(trial_status_name(TrialStatus::Timeout), "timeout");
}

TEST(VorSim, ConfigValidation) {
    SimConfig c;
    c.vor.gain = 1.5;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.smooth_user.kp = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.settle_frames = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.saccadic_user.reaction_delay_s = -1;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(VorSim, TargetAtCursorIsFixedPoint) {
    SimConfig cfg = quiet_config();
    cfg.start_px = {500, 500};
    TrialSimulator sim(cfg, Mode::Smooth, TargetRect{{500, 500}, 50}, 1);
    sim.calibrate();
    sim.begin();
    for (int i = 0; i < 30 && !sim.finished(); ++i) {
        sim.step();
        EXPECT_EQ(sim.state().head.yaw_rate_dps, 0.0);
        EXPECT_EQ(sim.state().cursor.pos, (Vec2{500, 500}));
    }
    EXPECT_EQ(sim.state().status, TrialStatus::Success);
}

TEST(VorSim, SmoothConvergesToSmallTarget) {
    const SimConfig cfg = quiet_config();
    const TrialResult r = run_trial(Mode::Smooth, TargetRect{{960, 540}, 9}, cfg, 1);
    EXPECT_TRUE(r.success);
    EXPECT_LE(r.distance_to_center_px, 4.5 * std::sqrt(2.0));
    EXPECT_LE(r.frames, 15 * 60);
    // distance to the centre never grows by more than jitter
    double prev = distance(cfg.start_px, {960, 540});
    for (const auto& s : r.path) {
        const double d = distance(s.cursor, {960, 540});
        EXPECT_LE(d, prev + 1e-9) << "frame " << s.frame;
        prev = d;
    }
}

TEST(VorSim, SmoothPathIsNearlyStraight) {
    const SimConfig cfg = quiet_config();
    for (double size : {100.0, 25.0}) {
        const TrialResult r = run_trial(Mode::Smooth, TargetRect{{960, 540}, size}, cfg, 3);
        ASSERT_TRUE(r.success);
        EXPECT_LE(path_length(r.path, cfg.start_px), 1.15 * distance(cfg.start_px, r.final_pos));
    }
}

TEST(VorSim, SmoothTimerUsesFirstEntry) {
    const SimConfig cfg = quiet_config();
    TrialSimulator sim(cfg, Mode::Smooth, TargetRect{{960, 540}, 50}, 4);
    sim.calibrate();
    sim.begin();
    while (!sim.finished()) sim.step();
    const TrialResult r = sim.result();
    ASSERT_TRUE(r.success);
    ASSERT_TRUE(r.time_to_enter_s);
    const long start = sim.state().timer_start_frame.value_or(0);
    EXPECT_DOUBLE_EQ(*r.time_to_enter_s, (*sim.state().first_entry_frame - start) / 60.0);
    // first path sample inside the target is the entry frame
    for (const auto& s : r.path)
        if (TargetRect{{960, 540}, 50}.contains(s.cursor)) {
            EXPECT_EQ(s.frame, *sim.state().first_entry_frame);
            break;
        }
}

TEST(VorSim, FirstMotionPointsAtTarget) {
    const SimConfig base = quiet_config();
    const Vec2 centre{960, 540};
    for (int k = 0; k < 8; ++k) {
        const double bearing = k * 45.0;
        const Vec2 dir{std::cos(deg_to_rad(bearing)), std::sin(deg_to_rad(bearing))};
        SimConfig cfg = base;
        cfg.start_px = centre;
        const TargetRect target{centre + 300.0 * dir, 40};
        TrialSimulator sim(cfg, Mode::Smooth, target, 7);
        sim.calibrate();
        sim.begin();
        Vec2 moved{};
        for (int i = 0; i < 120 && moved == Vec2{}; ++i) {
            sim.step();
            moved = sim.state().cursor.pos - centre;
        }
        ASSERT_NE(moved, Vec2{}) << "bearing " << bearing;
        const double cosang = (moved.x * dir.x + moved.y * dir.y) / moved.norm();
        EXPECT_GE(cosang, std::cos(deg_to_rad(45.0))) << "bearing " << bearing;
    }
}

TEST(VorSim, TrialsAreDeterministic) {
    const SimConfig cfg;
    for (Mode m : {Mode::Smooth, Mode::Saccadic}) {
        const TrialResult a = run_trial(m, TargetRect{{960, 540}, 25}, cfg, 99);
        const TrialResult b = run_trial(m, TargetRect{{960, 540}, 25}, cfg, 99);
        ASSERT_EQ(a.path.size(), b.path.size());
        for (std::size_t i = 0; i < a.path.size(); ++i) {
            EXPECT_EQ(a.path[i].cursor, b.path[i].cursor);
            EXPECT_EQ(a.path[i].head_yaw, b.path[i].head_yaw);
            EXPECT_EQ(a.path[i].detected, b.path[i].detected);
        }
        EXPECT_EQ(a.final_pos, b.final_pos);
        EXPECT_EQ(a.time_to_enter_s, b.time_to_enter_s);
    }
}

TEST(VorSim, NoiselessSaccadeLandsOnCentre) {
    SimConfig cfg = quiet_config();
    cfg.saccadic_noise.sigma_deg = 0;
    cfg.saccadic_noise.drift_deg_per_min = 0;
    cfg.saccadic_user.reaction_delay_s = 0.2;
    cfg.saccadic_user.fixation_settle_s = 0.1;
    const TrialResult r = run_trial(Mode::Saccadic, TargetRect{{960, 540}, 9}, cfg, 5);
    ASSERT_TRUE(r.success);
    EXPECT_EQ(r.final_pos, (Vec2{960, 540}));
    ASSERT_TRUE(r.time_to_enter_s);
    EXPECT_NEAR(*r.time_to_enter_s, 0.3, 1e-12);
}

TEST(VorSim, SaccadicPathIsStep) {
    const SimConfig cfg;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const TrialResult r = run_trial(Mode::Saccadic, TargetRect{{960, 540}, 25}, cfg, seed);
        std::set<std::pair<double, double>> positions;
        for (const auto& s : r.path) positions.insert({s.cursor.x, s.cursor.y});
        EXPECT_LE(positions.size(), static_cast<std::size_t>(cfg.saccadic_user.max_corrections + 2));
        EXPECT_EQ(r.path.front().cursor, cfg.start_px);
        if (!r.success) EXPECT_FALSE(r.time_to_enter_s);
    }
}

TEST(VorSim, SaccadicLandingSpread) {
    SimConfig cfg = quiet_config();
    cfg.saccadic_noise.drift_deg_per_min = 0;
    cfg.saccadic_user.max_corrections = 0;
    const int n = 10000;
    double sx = 0, sxx = 0;
    for (int i = 0; i < n; ++i) {
        TrialSimulator sim(cfg, Mode::Saccadic, TargetRect{{960, 540}, 1}, 1000 + i);
        sim.calibrate();
        sim.begin();
        while (!sim.finished()) sim.step();
        const double dx = sim.state().cursor.pos.x - 960.0;
        sx += dx;
        sxx += dx * dx;
    }
    const double sd = std::sqrt((sxx - sx * sx / n) / (n - 1));
    const double expected = visual_angle_to_screen_px(1.0, cfg.screen);
    EXPECT_NEAR(sd, expected, 0.05 * expected);
}

TEST(VorSim, TimeoutWithoutPupil) {
    SimConfig cfg = quiet_config();
    cfg.timeout_s = 1.0;
    // an eyelid low enough that the calibration frame has no usable pupil
    cfg.noise.eyelid_occlusion_frac = 0.6;
    EXPECT_THROW(run_trial(Mode::Smooth, TargetRect{}, cfg, 1), NoPupilFound);
}

TEST(VorSim, SmoothTimesOutWhenCursorCannotMove) {
    SimConfig cfg = quiet_config();
    cfg.timeout_s = 0.5;
    cfg.control.deadband_px = 1000;  // every offset ignored
    const TrialResult r = run_trial(Mode::Smooth, TargetRect{{960, 540}, 20}, cfg, 1);
    EXPECT_FALSE(r.success);
    EXPECT_FALSE(r.time_to_enter_s);
    EXPECT_EQ(r.frames, 30);
}

TEST(VorSim, ExternalRatesSteerTheCursor) {
    SimConfig cfg = quiet_config();
    TrialSimulator sim(cfg, Mode::Smooth, TargetRect{}, 1);
    sim.set_free_run(true);
    sim.calibrate();
    sim.begin();
    sim.set_external_head_rates(Vec2{500, 0});
    EXPECT_EQ(sim.external_head_rates()->x, cfg.head_limits.rate_limit_dps);
    const Vec2 before = sim.state().cursor.pos;
    for (int i = 0; i < 20; ++i) sim.step();
    EXPECT_GT(sim.state().cursor.pos.x, before.x);
    EXPECT_TRUE(sim.state().path.empty());
    EXPECT_EQ(sim.state().status, TrialStatus::Idle);
}
