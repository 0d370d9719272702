#include "vorcursor/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "vorcursor/error.hpp"

namespace vorcursor {
namespace {

std::string_view trim(std::string_view s) {
    const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && ws(s.back())) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

double parse_double(std::string_view key, std::string_view text) {
    text = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
        throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(text) + "'");
    return v;
}

long long parse_int(std::string_view key, std::string_view text) {
    text = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(text) + "'");
    return v;
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
    text = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + std::string(text) + "'");
    return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
    const std::string t = lower(trim(text));
    if (t == "1" || t == "true" || t == "on" || t == "yes") return true;
    if (t == "0" || t == "false" || t == "off" || t == "no") return false;
    throw ConfigError(std::string(key) + ": expected true/false, got '" + std::string(text) + "'");
}

std::uint8_t parse_intensity(std::string_view key, std::string_view text) {
    const long long v = parse_int(key, text);
    if (v < 0 || v > 255) throw ConfigError(std::string(key) + ": intensity must lie in [0, 255]");
    return static_cast<std::uint8_t>(v);
}

int parse_sign(std::string_view key, std::string_view text) {
    const long long v = parse_int(key, text);
    if (v != 1 && v != -1) throw ConfigError(std::string(key) + ": must be +1 or -1");
    return static_cast<int>(v);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        parts.push_back(trim(text.substr(start, pos == std::string_view::npos ? text.npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::vector<double> parse_double_list(std::string_view key, std::string_view text) {
    std::vector<double> out;
    for (auto part : split(text, ',')) out.push_back(parse_double(key, part));
    return out;
}

Vec2 parse_pair(std::string_view key, std::string_view text) {
    const auto v = parse_double_list(key, text);
    if (v.size() != 2) throw ConfigError(std::string(key) + ": expected 'x,y'");
    return {v[0], v[1]};
}

std::vector<Mode> parse_modes(std::string_view text) {
    std::vector<Mode> modes;
    for (auto part : split(text, ',')) modes.push_back(parse_mode(part));
    return modes;
}

using Setter = std::function<void(AppConfig&, std::string_view key, std::string_view value)>;

template <typename F>
Setter num(F f) {
    return [f](AppConfig& c, std::string_view k, std::string_view v) { f(c, parse_double(k, v)); };
}

template <typename F>
Setter integer(F f) {
    return [f](AppConfig& c, std::string_view k, std::string_view v) { f(c, parse_int(k, v)); };
}

const std::vector<std::pair<std::string, Setter>>& setters() {
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"screen.width_px", integer([](AppConfig& c, long long v) { c.sim.screen.width_px = static_cast<int>(v); })},
        {"screen.height_px", integer([](AppConfig& c, long long v) { c.sim.screen.height_px = static_cast<int>(v); })},
        {"screen.width_cm", num([](AppConfig& c, double v) { c.sim.screen.width_cm = v; })},
        {"screen.viewing_distance_cm", num([](AppConfig& c, double v) { c.sim.screen.viewing_distance_cm = v; })},
        {"camera.fov_deg", num([](AppConfig& c, double v) { c.camera.fov_deg = v; })},
        {"camera.focal_distance_mm", num([](AppConfig& c, double v) { c.camera.focal_distance_mm = v; })},
        {"camera.frame_rate_hz", num([](AppConfig& c, double v) {
             c.camera.frame_rate_hz = v;
             c.sim.frame_rate_hz = v;
         })},
        {"eye.frame_width_px", integer([](AppConfig& c, long long v) {
             c.sim.eye.frame_width_px = static_cast<int>(v);
             c.camera.frame_width_px = static_cast<int>(v);
         })},
        {"eye.frame_height_px", integer([](AppConfig& c, long long v) {
             c.sim.eye.frame_height_px = static_cast<int>(v);
             c.camera.frame_height_px = static_cast<int>(v);
         })},
        {"eye.neutral_center", [](AppConfig& c, std::string_view k, std::string_view v) {
             c.sim.eye.neutral_center = parse_pair(k, v);
         }},
        {"eye.px_per_deg", num([](AppConfig& c, double v) { c.sim.eye.px_per_deg = v; })},
        {"eye.pupil_radius_px", num([](AppConfig& c, double v) { c.sim.eye.pupil_radius_px = v; })},
        {"eye.pupil_intensity", [](AppConfig& c, std::string_view k, std::string_view v) {
             c.sim.eye.pupil_intensity = parse_intensity(k, v);
         }},
        {"eye.iris_intensity", [](AppConfig& c, std::string_view k, std::string_view v) {
             c.sim.eye.iris_intensity = parse_intensity(k, v);
         }},
        {"eye.sclera_intensity", [](AppConfig& c, std::string_view k, std::string_view v) {
             c.sim.eye.sclera_intensity = parse_intensity(k, v);
         }},
        {"noise.enabled", [](AppConfig& c, std::string_view k, std::string_view v) {
             if (!parse_bool(k, v)) c.sim.noise = NoiseParams::none();
         }},
        {"noise.gaussian_sigma", num([](AppConfig& c, double v) { c.sim.noise.gaussian_sigma = v; })},
        {"noise.artifact_count", integer([](AppConfig& c, long long v) {
             c.sim.noise.artifact_count = static_cast<int>(v);
         })},
        {"noise.artifact_radius_px", num([](AppConfig& c, double v) { c.sim.noise.artifact_radius_px = v; })},
        {"noise.eyelid_occlusion_frac", num([](AppConfig& c, double v) { c.sim.noise.eyelid_occlusion_frac = v; })},
        {"detector.threshold_mode", [](AppConfig& c, std::string_view k, std::string_view v) {
             const std::string t = lower(trim(v));
             if (t == "auto") c.sim.detector.threshold_mode = ThresholdMode::Auto;
             else if (t == "fixed") c.sim.detector.threshold_mode = ThresholdMode::Fixed;
             else throw ConfigError(std::string(k) + ": expected auto or fixed");
         }},
        {"detector.fixed_threshold", integer([](AppConfig& c, long long v) {
             c.sim.detector.fixed_threshold = static_cast<int>(v);
         })},
        {"detector.alpha", num([](AppConfig& c, double v) { c.sim.detector.alpha = v; })},
        {"detector.min_area_px2", num([](AppConfig& c, double v) { c.sim.detector.min_area_px2 = v; })},
        {"detector.circularity_tol", num([](AppConfig& c, double v) { c.sim.detector.circularity_tol = v; })},
        {"detector.aspect_tol", num([](AppConfig& c, double v) { c.sim.detector.aspect_tol = v; })},
        {"control.gain", num([](AppConfig& c, double v) { c.sim.control.gain_px_per_px = v; })},
        {"control.sign_x", [](AppConfig& c, std::string_view k, std::string_view v) {
             c.sim.control.axis_sign_x = parse_sign(k, v);
         }},
        {"control.sign_y", [](AppConfig& c, std::string_view k, std::string_view v) {
             c.sim.control.axis_sign_y = parse_sign(k, v);
         }},
        {"control.deadband_px", num([](AppConfig& c, double v) { c.sim.control.deadband_px = v; })},
        {"saccadic.sigma_deg", num([](AppConfig& c, double v) { c.sim.saccadic_noise.sigma_deg = v; })},
        {"saccadic.drift_deg_per_min", num([](AppConfig& c, double v) {
             c.sim.saccadic_noise.drift_deg_per_min = v;
         })},
        {"saccadic.drift_direction_deg", num([](AppConfig& c, double v) {
             c.sim.saccadic_noise.drift_direction_deg = v;
         })},
        {"saccadic.reaction_delay_s", num([](AppConfig& c, double v) { c.sim.saccadic_user.reaction_delay_s = v; })},
        {"saccadic.fixation_settle_s", num([](AppConfig& c, double v) {
             c.sim.saccadic_user.fixation_settle_s = v;
         })},
        {"saccadic.max_corrections", integer([](AppConfig& c, long long v) {
             c.sim.saccadic_user.max_corrections = static_cast<int>(v);
         })},
        {"smooth.kp", num([](AppConfig& c, double v) { c.sim.smooth_user.kp = v; })},
        {"smooth.rate_limit_dps", num([](AppConfig& c, double v) { c.sim.smooth_user.rate_limit_dps = v; })},
        {"smooth.stop_radius_px", num([](AppConfig& c, double v) { c.sim.smooth_user.stop_radius_px = v; })},
        {"vor.gain", num([](AppConfig& c, double v) { c.sim.vor.gain = v; })},
        {"head.rate_limit_dps", num([](AppConfig& c, double v) { c.sim.head_limits.rate_limit_dps = v; })},
        {"head.max_angle_deg", num([](AppConfig& c, double v) { c.sim.head_limits.max_angle_deg = v; })},
        {"sim.timeout_s", num([](AppConfig& c, double v) { c.sim.timeout_s = v; })},
        {"sim.settle_frames", integer([](AppConfig& c, long long v) { c.sim.settle_frames = static_cast<int>(v); })},
        {"sim.start", [](AppConfig& c, std::string_view k, std::string_view v) {
             c.sim.start_px = parse_pair(k, v);
             c.plan.start = c.sim.start_px;
         }},
        {"experiment.sizes", [](AppConfig& c, std::string_view k, std::string_view v) {
             c.plan.square_sizes_px = parse_double_list(k, v);
         }},
        {"experiment.target_center", [](AppConfig& c, std::string_view k, std::string_view v) {
             c.plan.target_center = parse_pair(k, v);
         }},
        {"experiment.repetitions", integer([](AppConfig& c, long long v) {
             c.plan.repetitions = static_cast<int>(std::clamp<long long>(v, -1, 100000000));
         })},
        {"experiment.modes", [](AppConfig& c, std::string_view, std::string_view v) { c.plan.modes = parse_modes(v); }},
        {"experiment.seed_base", [](AppConfig& c, std::string_view k, std::string_view v) {
             c.plan.seed_base = parse_u64(k, v);
         }},
        {"experiment.trials_per_session", integer([](AppConfig& c, long long v) {
             c.plan.trials_per_session = static_cast<int>(std::clamp<long long>(v, -1, 100000000));
         })},
        {"experiment.inter_trial_s", num([](AppConfig& c, double v) { c.plan.inter_trial_s = v; })},
        {"render.yaw_from", num([](AppConfig& c, double v) { c.render.yaw_from = v; })},
        {"render.yaw_to", num([](AppConfig& c, double v) { c.render.yaw_to = v; })},
        {"render.yaw_step", num([](AppConfig& c, double v) { c.render.yaw_step = v; })},
        {"render.pitch_from", num([](AppConfig& c, double v) { c.render.pitch_from = v; })},
        {"render.pitch_to", num([](AppConfig& c, double v) { c.render.pitch_to = v; })},
        {"render.pitch_step", num([](AppConfig& c, double v) { c.render.pitch_step = v; })},
    };
    return table;
}

struct KeyValue {
    std::string key;
    std::string value;
};

// Splits "key = value"; returns nothing for blank/comment lines.
std::optional<KeyValue> split_line(std::string_view raw, const std::string& where) {
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) return std::nullopt;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = lower(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError(where + ": missing key before '='");
    return KeyValue{key, std::string(trim(line.substr(eq + 1)))};
}

std::string at(const std::string& source, int line) { return source + ":" + std::to_string(line); }

}  // namespace

void RenderSweep::validate() const {
    if (!(yaw_step > 0.0) || !(pitch_step > 0.0)) throw ConfigError("render steps must be positive");
    if (yaw_to < yaw_from || pitch_to < pitch_from) throw ConfigError("render ranges must satisfy from <= to");
    const double n = (std::floor((yaw_to - yaw_from) / yaw_step + 1e-9) + 1) *
                     (std::floor((pitch_to - pitch_from) / pitch_step + 1e-9) + 1);
    if (n > 1e6) throw ConfigError("render sweep exceeds one million frames");
}

std::vector<EyeState> RenderSweep::states() const {
    validate();
    std::vector<EyeState> out;
    const long ny = std::lround(std::floor((yaw_to - yaw_from) / yaw_step + 1e-9));
    const long np = std::lround(std::floor((pitch_to - pitch_from) / pitch_step + 1e-9));
    for (long p = 0; p <= np; ++p)
        for (long y = 0; y <= ny; ++y) out.push_back({yaw_from + y * yaw_step, pitch_from + p * pitch_step});
    return out;
}

void AppConfig::validate() const {
    sim.validate();
    plan.validate();
    render.validate();
    camera.validate();
}

void apply_setting(AppConfig& config, std::string_view key, std::string_view value) {
    const std::string k = lower(trim(key));
    for (const auto& [name, setter] : setters()) {
        if (name == k) {
            setter(config, name, value);
            return;
        }
    }
    throw ConfigError("unknown setting '" + k + "'");
}

const std::vector<std::string>& known_setting_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& entry : setters()) out.push_back(entry.first);
        return out;
    }();
    return keys;
}

void apply_config_text(AppConfig& config, std::string_view text, const std::string& source) {
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find('\n', start), text.size());
        ++line_no;
        const std::string where = at(source, line_no);
        const auto kv = split_line(text.substr(start, end - start), where);
        if (kv) {
            try {
                apply_setting(config, kv->key, kv->value);
            } catch (const ConfigError& e) {
                throw ConfigError(where + ": " + e.what());
            }
        }
        start = end + 1;
    }
    try {
        config.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
}

AppConfig parse_config(std::string_view text, const std::string& source) {
    AppConfig config;
    apply_config_text(config, text, source);
    return config;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

AppConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_text_file(path), path.string());
}

std::vector<RunSection> parse_run_file(std::string_view text, const std::string& source) {
    std::vector<RunSection> sections;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find('\n', start), text.size());
        ++line_no;
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = at(source, line_no);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
            const std::string name(trim(line.substr(1, line.size() - 2)));
            if (name.empty()) throw ConfigError(where + ": empty section name");
            for (const auto& s : sections)
                if (s.name == name) throw ConfigError(where + ": duplicate section '" + name + "'");
            sections.push_back({name, line_no, {}});
            continue;
        }
        const auto kv = split_line(line, where);
        if (sections.empty()) throw ConfigError(where + ": setting outside of a [section]");
        sections.back().entries.push_back({kv->key, kv->value, line_no});
    }
    return sections;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
    std::vector<std::uint64_t> seeds;
    for (auto part : split(text, ',')) {
        if (part.empty()) throw ConfigError("seeds: empty entry");
        const auto dots = part.find("..");
        if (dots == std::string_view::npos) {
            seeds.push_back(parse_u64("seeds", part));
            continue;
        }
        const std::uint64_t lo = parse_u64("seeds", part.substr(0, dots));
        const std::uint64_t hi = parse_u64("seeds", part.substr(dots + 2));
        if (hi < lo) throw ConfigError("seeds: range end below start");
        if (hi - lo >= 10000000) throw ConfigError("seeds: range too large");
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    }
    return seeds;
}

std::vector<TrialSpec> trial_specs(const std::vector<RunSection>& sections, const AppConfig& base,
                                   const std::string& source) {
    std::vector<TrialSpec> specs;
    for (const auto& section : sections) {
        TrialSpec spec;
        spec.name = section.name;
        spec.config = base;
        spec.seeds = {1};
        spec.target.center = base.plan.target_center;
        bool have_mode = false;
        for (const auto& e : section.entries) {
            const std::string where = at(source, e.line);
            try {
                if (e.key == "mode") {
                    spec.mode = parse_mode(e.value);
                    have_mode = true;
                } else if (e.key == "target") {
                    const auto v = parse_double_list(e.key, e.value);
                    if (v.size() != 3) throw ConfigError("target: expected 'cx,cy,size'");
                    spec.target = {{v[0], v[1]}, v[2]};
                } else if (e.key == "target.size") {
                    spec.target.size_px = parse_double(e.key, e.value);
                } else if (e.key == "target.center") {
                    spec.target.center = parse_pair(e.key, e.value);
                } else if (e.key == "seeds" || e.key == "seed") {
                    spec.seeds = parse_seed_list(e.value);
                } else {
                    apply_setting(spec.config, e.key, e.value);
                }
            } catch (const ConfigError& err) {
                throw ConfigError(where + ": " + err.what());
            }
        }
        const std::string where = at(source, section.line);
        if (!have_mode) throw ConfigError(where + ": section '" + section.name + "' has no mode");
        if (!(spec.target.size_px > 0.0)) throw ConfigError(where + ": target size must be positive");
        const auto& scr = spec.config.sim.screen;
        if (spec.target.center.x < 0 || spec.target.center.y < 0 || spec.target.center.x > scr.width_px - 1 ||
            spec.target.center.y > scr.height_px - 1)
            throw ConfigError(where + ": target centre lies outside the screen");
        try {
            spec.config.validate();
        } catch (const ConfigError& err) {
            throw ConfigError(where + ": " + err.what());
        }
        specs.push_back(std::move(spec));
    }
    return specs;
}

std::vector<ExperimentSpec> experiment_specs(const std::vector<RunSection>& sections, const AppConfig& base,
                                             const std::string& source) {
    std::vector<ExperimentSpec> specs;
    for (const auto& section : sections) {
        ExperimentSpec spec{section.name, base};
        for (const auto& e : section.entries) {
            const std::string where = at(source, e.line);
            try {
                if (e.key == "modes" || e.key == "mode") {
                    spec.config.plan.modes = parse_modes(e.value);
                } else if (e.key == "sizes") {
                    apply_setting(spec.config, "experiment.sizes", e.value);
                } else if (e.key == "repetitions") {
                    apply_setting(spec.config, "experiment.repetitions", e.value);
                } else if (e.key == "seed" || e.key == "seed_base") {
                    apply_setting(spec.config, "experiment.seed_base", e.value);
                } else {
                    apply_setting(spec.config, e.key, e.value);
                }
            } catch (const ConfigError& err) {
                throw ConfigError(where + ": " + err.what());
            }
        }
        try {
            spec.config.validate();
        } catch (const ConfigError& err) {
            throw ConfigError(at(source, section.line) + ": " + err.what());
        }
        specs.push_back(std::move(spec));
    }
    return specs;
}

}  // namespace vorcursor
