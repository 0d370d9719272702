#include "vorcursor/live_session.hpp"

#include <boost/beast/core/detail/base64.hpp>
#include <cmath>

#include "json.hpp"
#include "vorcursor/error.hpp"

namespace vorcursor {
namespace {

using nlohmann::json;

double number_field(const json& msg, const char* name) {
    const auto it = msg.find(name);
    if (it == msg.end() || !it->is_number()) throw ProtocolError(std::string("field '") + name + "' must be a number");
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw ProtocolError(std::string("field '") + name + "' must be finite");
    return v;
}

std::string base64(std::span<const std::uint8_t> bytes) {
    namespace b64 = boost::beast::detail::base64;
    std::string out(b64::encoded_size(bytes.size()), '\0');
    out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
    return out;
}

json vec(double x, double y) { return {{"x", x}, {"y", y}}; }

template <typename T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

}  // namespace

InputEvent parse_input_message(std::string_view text) {
    json msg;
    try {
        msg = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ProtocolError(std::string("malformed JSON: ") + e.what());
    }
    if (!msg.is_object()) throw ProtocolError("message must be a JSON object");
    const auto type = msg.find("type");
    if (type == msg.end() || !type->is_string()) throw ProtocolError("missing string field 'type'");
    if (*type != "input") throw ProtocolError("unsupported message type '" + type->get<std::string>() + "'");
    const auto ev = msg.find("event");
    if (ev == msg.end() || !ev->is_string()) throw ProtocolError("missing string field 'event'");
    const std::string event = ev->get<std::string>();
    if (event == "head_rate") return input::HeadRate{number_field(msg, "yaw_dps"), number_field(msg, "pitch_dps")};
    if (event == "set_mode") {
        const auto m = msg.find("mode");
        if (m == msg.end() || !m->is_string()) throw ProtocolError("field 'mode' must be a string");
        try {
            return input::SetMode{parse_mode(m->get<std::string>())};
        } catch (const ConfigError& e) {
            throw ProtocolError(e.what());
        }
    }
    if (event == "set_target")
        return input::SetTarget{number_field(msg, "cx"), number_field(msg, "cy"), number_field(msg, "size_px")};
    if (event == "start_trial") {
        std::uint64_t seed = 0;
        if (const auto s = msg.find("seed"); s != msg.end()) {
            if (!s->is_number_unsigned()) throw ProtocolError("field 'seed' must be a non-negative integer");
            seed = s->get<std::uint64_t>();
        }
        return input::StartTrial{seed};
    }
    if (event == "recalibrate") return input::Recalibrate{};
    if (event == "pause") return input::Pause{};
    if (event == "resume") return input::Resume{};
    throw ProtocolError("unknown input event '" + event + "'");
}

std::string snapshot_to_json(const StateSnapshot& s) {
    json j;
    j["type"] = "state";
    j["frame"] = s.frame;
    j["t_s"] = s.t_s;
    j["cursor"] = vec(s.cursor.x, s.cursor.y);
    j["target"] = s.target ? json{{"cx", s.target->center.x}, {"cy", s.target->center.y}, {"size_px", s.target->size_px}}
                           : json(nullptr);
    j["head"] = {{"yaw", s.head.yaw_deg},
                 {"pitch", s.head.pitch_deg},
                 {"yaw_rate", s.head.yaw_rate_dps},
                 {"pitch_rate", s.head.pitch_rate_dps}};
    j["eye"] = {{"yaw", s.eye.yaw_deg}, {"pitch", s.eye.pitch_deg}};
    j["pupil"] = s.pupil ? json{{"cx", s.pupil->center.x},
                                {"cy", s.pupil->center.y},
                                {"radius", s.pupil->radius_px},
                                {"score", s.pupil->score}}
                         : json(nullptr);
    j["baseline"] = s.baseline ? vec(s.baseline->x, s.baseline->y) : json(nullptr);
    j["mode"] = std::string(mode_name(s.mode));
    j["trial"] = std::string(trial_status_name(s.trial));
    j["paused"] = s.paused;
    j["seed"] = s.seed;
    j["metrics"] = {{"trials", s.metrics.trials},
                    {"successes", s.metrics.successes},
                    {"mean_time_s", opt(s.metrics.mean_time_s)},
                    {"mean_dist_px", opt(s.metrics.mean_dist_px)},
                    {"last_time_s", opt(s.metrics.last_time_s)},
                    {"last_dist_px", opt(s.metrics.last_dist_px)}};
    if (s.frame_thumbnail) {
        j["frame_thumbnail"] = {{"width", s.frame_thumbnail->width},
                                {"height", s.frame_thumbnail->height},
                                {"encoding", "base64"},
                                {"data", base64(s.frame_thumbnail->pixels)}};
    }
    return j.dump();
}

std::string error_to_json(std::string_view message) {
    return json{{"type", "error"}, {"message", std::string(message)}}.dump();
}

LiveSession::LiveSession(const SimConfig& config) : config_(config) {
    config_.validate();
    restart_idle();
}

void LiveSession::restart_idle() {
    SimConfig cfg = config_;
    cfg.start_px = {cfg.screen.center_x(), cfg.screen.center_y()};
    auto sim = std::make_unique<TrialSimulator>(cfg, mode_, target_.value_or(TargetRect{}), seed_);
    sim->set_free_run(true);
    sim->set_keep_frames(true);
    sim->calibrate();
    sim->begin();
    sim->set_external_head_rates(head_rates_.value_or(Vec2{}));
    sim_ = std::move(sim);
    trial_active_ = false;
    result_recorded_ = false;
}

void LiveSession::apply(const InputEvent& event) {
    if (const auto* e = std::get_if<input::HeadRate>(&event)) {
        const double lim = config_.head_limits.rate_limit_dps;
        head_rates_ = Vec2{std::clamp(e->yaw_dps, -lim, lim), std::clamp(e->pitch_dps, -lim, lim)};
        sim_->set_external_head_rates(head_rates_);
    } else if (const auto* e = std::get_if<input::SetMode>(&event)) {
        mode_ = e->mode;
        restart_idle();
    } else if (const auto* e = std::get_if<input::SetTarget>(&event)) {
        const TargetRect t{{e->cx, e->cy}, e->size_px};
        if (!(t.size_px > 0.0)) throw ConfigError("target size must be positive");
        if (t.center.x < 0 || t.center.y < 0 || t.center.x > config_.screen.width_px - 1 ||
            t.center.y > config_.screen.height_px - 1)
            throw ConfigError("target centre lies outside the screen");
        target_ = t;
    } else if (const auto* e = std::get_if<input::StartTrial>(&event)) {
        if (!target_) throw ConfigError("set a target before starting a trial");
        auto sim = std::make_unique<TrialSimulator>(config_, mode_, *target_, e->seed);
        sim->set_keep_frames(true);
        sim->calibrate();
        sim->begin();
        sim_ = std::move(sim);
        seed_ = e->seed;
        // The scripted user drives until the steering client sends a rate.
        head_rates_.reset();
        trial_active_ = true;
        result_recorded_ = false;
    } else if (std::holds_alternative<input::Recalibrate>(event)) {
        sim_->recalibrate_here();
    } else if (std::holds_alternative<input::Pause>(event)) {
        paused_ = true;
    } else if (std::holds_alternative<input::Resume>(event)) {
        paused_ = false;
    }
}

void LiveSession::record_result() {
    const TrialResult r = sim_->result();
    ++metrics_.trials;
    dist_sum_ += r.distance_to_center_px;
    metrics_.mean_dist_px = dist_sum_ / metrics_.trials;
    metrics_.last_dist_px = r.distance_to_center_px;
    metrics_.last_time_s = r.time_to_enter_s;
    if (r.success) {
        ++metrics_.successes;
        if (r.time_to_enter_s) {
            time_sum_ += *r.time_to_enter_s;
            ++time_count_;
            metrics_.mean_time_s = time_sum_ / time_count_;
        }
    }
    result_recorded_ = true;
}

void LiveSession::tick() {
    if (!paused_) {
        sim_->step();
        if (trial_active_ && sim_->finished() && !result_recorded_) {
            record_result();
            // Keep the loop live so steering still moves the head afterwards.
            sim_->set_free_run(true);
            sim_->set_external_head_rates(head_rates_.value_or(Vec2{}));
        }
    }
    ++frame_;
}

StateSnapshot LiveSession::snapshot() const {
    const SimState& st = sim_->state();
    StateSnapshot s;
    s.frame = frame_;
    s.t_s = frame_ / config_.frame_rate_hz;
    s.cursor = st.cursor.pos;
    s.target = target_;
    s.head = st.head;
    s.eye = st.eye;
    s.pupil = st.pupil;
    if (st.baseline) s.baseline = st.baseline->pupil_px;
    s.mode = mode_;
    s.trial = trial_active_ ? st.status : TrialStatus::Idle;
    s.paused = paused_;
    s.seed = seed_;
    s.metrics = metrics_;
    const GrayFrame& last = sim_->last_frame();
    if (frame_ % kThumbnailEvery == 0 && !last.empty()) {
        const GrayFrame small = last.downscale(kThumbnailFactor);
        s.frame_thumbnail = Thumbnail{small.width(), small.height(),
                                      std::vector<std::uint8_t>(small.pixels().begin(), small.pixels().end())};
    }
    return s;
}

}  // namespace vorcursor
