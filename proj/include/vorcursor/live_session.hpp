#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vorcursor/error.hpp"
#include "vorcursor/vor_sim.hpp"

namespace vorcursor {

namespace input {
struct HeadRate {
    double yaw_dps = 0.0;
    double pitch_dps = 0.0;
};
struct SetMode {
    Mode mode = Mode::Smooth;
};
struct SetTarget {
    double cx = 0.0;
    double cy = 0.0;
    double size_px = 0.0;
};
struct StartTrial {
    std::uint64_t seed = 0;
};
struct Recalibrate {};
struct Pause {};
struct Resume {};
}  // namespace input

using InputEvent = std::variant<input::HeadRate, input::SetMode, input::SetTarget, input::StartTrial,
                                input::Recalibrate, input::Pause, input::Resume>;

/// Raised for malformed protocol messages; the connection stays open.
class ProtocolError : public Error {
public:
    using Error::Error;
};

/// Parses one `type:"input"` JSON text message.
InputEvent parse_input_message(std::string_view text);

struct SessionMetrics {
    int trials = 0;
    int successes = 0;
    std::optional<double> mean_time_s;
    std::optional<double> mean_dist_px;
    std::optional<double> last_time_s;
    std::optional<double> last_dist_px;
};

struct Thumbnail {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
};

struct StateSnapshot {
    long frame = 0;
    double t_s = 0.0;
    Vec2 cursor;
    std::optional<TargetRect> target;
    HeadState head;
    EyeState eye;
    std::optional<PupilSummary> pupil;
    std::optional<Vec2> baseline;
    Mode mode = Mode::Smooth;
    TrialStatus trial = TrialStatus::Idle;
    bool paused = false;
    std::uint64_t seed = 0;
    SessionMetrics metrics;
    std::optional<Thumbnail> frame_thumbnail;
};

std::string snapshot_to_json(const StateSnapshot& snapshot);
std::string error_to_json(std::string_view message);

/// Real-time session state. Not thread-safe: one owner applies events and
/// ticks; snapshots are copies.
class LiveSession {
public:
    static constexpr int kThumbnailEvery = 4;
    static constexpr int kThumbnailFactor = 4;

    explicit LiveSession(const SimConfig& config);

    /// Applies an input event. Throws ConfigError/NoPupilFound for events
    /// that cannot be honoured (the session is left unchanged).
    void apply(const InputEvent& event);

    /// Advances one frame (the simulation holds while paused; the session
    /// frame index always advances).
    void tick();

    StateSnapshot snapshot() const;
    long frame() const { return frame_; }
    const TrialSimulator& simulator() const { return *sim_; }

private:
    void restart_idle();
    void record_result();

    SimConfig config_;
    Mode mode_ = Mode::Smooth;
    std::optional<TargetRect> target_;
    std::optional<Vec2> head_rates_;
    std::unique_ptr<TrialSimulator> sim_;
    bool trial_active_ = false;
    bool result_recorded_ = false;
    bool paused_ = false;
    long frame_ = 0;
    std::uint64_t seed_ = 0;
    SessionMetrics metrics_;
    double time_sum_ = 0.0;
    int time_count_ = 0;
    double dist_sum_ = 0.0;
};

}  // namespace vorcursor
