#include "vorcursor/synth_eye.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "vorcursor/error.hpp"
#include "vorcursor/geometry.hpp"
#include "vorcursor/rng.hpp"

namespace vorcursor {

void EyeState::validate() const {
    if (!(std::abs(yaw_deg) < 90.0) || !(std::abs(pitch_deg) < 90.0))
        throw ConfigError("eye rotation must lie in (-90, 90) degrees on both axes");
}

void EyeCameraModel::validate() const {
    if (frame_width_px <= 0 || frame_height_px <= 0) throw ConfigError("eye camera frame must be non-empty");
    if (!(pupil_intensity < iris_intensity && iris_intensity < sclera_intensity))
        throw ConfigError("intensities must satisfy pupil < iris < sclera");
    if (!(neutral_center.x >= 0 && neutral_center.y >= 0 && neutral_center.x < frame_width_px &&
          neutral_center.y < frame_height_px))
        throw ConfigError("neutral pupil center must lie inside the frame");
    if (!(pupil_radius_px >= 5.0)) throw ConfigError("pupil radius must be at least 5 px");
    if (!(px_per_deg > 0.0)) throw ConfigError("px_per_deg must be positive");
}

void NoiseParams::validate() const {
    if (!(gaussian_sigma >= 0.0) || artifact_count < 0 || !(artifact_radius_px >= 0.0))
        throw ConfigError("noise parameters must be non-negative");
    if (!(eyelid_occlusion_frac >= 0.0 && eyelid_occlusion_frac < 1.0))
        throw ConfigError("eyelid occlusion fraction must lie in [0, 1)");
}

Ellipse pupil_image_ellipse(const EyeState& eye, const EyeCameraModel& model) {
    eye.validate();
    Ellipse e;
    e.center = model.neutral_center + model.px_per_deg * Vec2{eye.yaw_deg, -eye.pitch_deg};
    e.semi_x = model.pupil_radius_px * std::cos(deg_to_rad(eye.yaw_deg));
    e.semi_y = model.pupil_radius_px * std::cos(deg_to_rad(eye.pitch_deg));
    if (e.semi_x < 1.0 || e.semi_y < 1.0)
        throw DegenerateError("pupil ellipse collapses below 1 px at yaw " + std::to_string(eye.yaw_deg) +
                              ", pitch " + std::to_string(eye.pitch_deg));
    return e;
}

double eyelid_cut_row(const Ellipse& pupil, const NoiseParams& noise) {
    return pupil.center.y - pupil.semi_y + 2.0 * pupil.semi_y * noise.eyelid_occlusion_frac;
}

namespace {

// Fills the pixels of `frame` whose centers satisfy `inside`, scanning only
// rows within [cy - ry, cy + ry] and the analytic span of each row. Span
// ends are snapped to the predicate so the fill matches it exactly.
template <typename Inside>
void fill_conic(GrayFrame& frame, Vec2 c, double rx, double ry, std::uint8_t value, Inside inside) {
    const int y0 = std::max(0, static_cast<int>(std::ceil(c.y - ry)));
    const int y1 = std::min(frame.height() - 1, static_cast<int>(std::floor(c.y + ry)));
    for (int y = y0; y <= y1; ++y) {
        const double t = (y - c.y) / ry;
        const double half = rx * std::sqrt(std::max(0.0, 1.0 - t * t));
        int x0 = static_cast<int>(std::ceil(c.x - half));
        int x1 = static_cast<int>(std::floor(c.x + half));
        while (x0 <= x1 && !inside(x0, y)) ++x0;
        while (inside(x0 - 1, y)) --x0;
        while (x1 >= x0 && !inside(x1, y)) --x1;
        while (inside(x1 + 1, y)) ++x1;
        x0 = std::max(x0, 0);
        x1 = std::min(x1, frame.width() - 1);
        if (x0 > x1) continue;
        auto row = frame.row(y);
        std::fill(row.begin() + x0, row.begin() + x1 + 1, value);
    }
}

void fill_disk(GrayFrame& frame, Vec2 c, double r, std::uint8_t value) {
    const double r2 = r * r;
    fill_conic(frame, c, r, r, value, [&](int x, int y) {
        const double dx = x - c.x, dy = y - c.y;
        return dx * dx + dy * dy <= r2;
    });
}

// Quantile table of N(0, sigma) rounded to whole intensity steps, indexed by
// 12 random bits (small enough to stay in L1). Adding round(noise) to an integer base equals rounding
// base + noise, so the table holds the final per-pixel offsets.
class NoiseTable {
public:
    static constexpr int kBits = 12;
    static constexpr int kSize = 1 << kBits;

    explicit NoiseTable(double sigma) : sigma_(sigma), offsets_(kSize) {
        const boost::math::normal_distribution<double> unit;
        for (int i = 0; i < kSize; ++i) {
            const double q = boost::math::quantile(unit, (i + 0.5) / kSize);
            offsets_[i] = static_cast<std::int16_t>(std::lround(sigma * q));
        }
    }

    double sigma() const { return sigma_; }
    const std::int16_t* data() const { return offsets_.data(); }

private:
    double sigma_;
    std::vector<std::int16_t> offsets_;
};

const NoiseTable& noise_table(double sigma) {
    thread_local std::vector<NoiseTable> cache;
    for (const auto& table : cache)
        if (table.sigma() == sigma) return table;
    if (cache.size() >= 8) cache.erase(cache.begin());
    cache.emplace_back(sigma);
    return cache.back();
}

void add_gaussian_noise(GrayFrame& frame, double sigma, Rng& rng) {
    const NoiseTable& table = noise_table(sigma);
    const std::int16_t* offsets = table.data();
    constexpr std::uint64_t kMask = NoiseTable::kSize - 1;
    constexpr std::size_t kPerWord = 64 / NoiseTable::kBits;
    constexpr std::size_t kBlockWords = 256;
    static_assert(kPerWord == 5);

    auto apply = [offsets](std::uint8_t& p, std::uint64_t bits) {
        const int v = p + offsets[bits & kMask];
        p = static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
    };
    auto px = frame.pixels();
    std::uint8_t* out = px.data();
    std::size_t remaining = px.size();
    std::array<std::uint64_t, kBlockWords> words;
    while (remaining > 0) {
        const std::size_t pixels = std::min(remaining, kBlockWords * kPerWord);
        const std::size_t nwords = (pixels + kPerWord - 1) / kPerWord;
        rng.fill(std::span(words).first(nwords));
        const std::size_t full = pixels / kPerWord;
        for (std::size_t w = 0; w < full; ++w) {
            const std::uint64_t bits = words[w];
            std::uint8_t* p = out + w * kPerWord;
            apply(p[0], bits);
            apply(p[1], bits >> 12);
            apply(p[2], bits >> 24);
            apply(p[3], bits >> 36);
            apply(p[4], bits >> 48);
        }
        std::uint64_t bits = full < nwords ? words[full] : 0;
        for (std::size_t i = full * kPerWord; i < pixels; ++i, bits >>= NoiseTable::kBits) apply(out[i], bits);
        out += pixels;
        remaining -= pixels;
    }
}

}  // namespace

GrayFrame render_eye_frame(const EyeState& eye, const EyeCameraModel& model, const NoiseParams& noise,
                           std::uint64_t seed) {
    model.validate();
    noise.validate();
    const Ellipse pupil = pupil_image_ellipse(eye, model);

    GrayFrame frame(model.frame_width_px, model.frame_height_px, model.sclera_intensity);
    fill_disk(frame, pupil.center, EyeCameraModel::kIrisScale * model.pupil_radius_px, model.iris_intensity);
    fill_conic(frame, pupil.center, pupil.semi_x, pupil.semi_y, model.pupil_intensity,
               [&](int x, int y) { return pupil.contains(x, y); });

    if (noise.eyelid_occlusion_frac > 0.0) {
        const double cut = eyelid_cut_row(pupil, noise);
        for (int y = 0; y < frame.height() && y < cut; ++y) {
            auto row = frame.row(y);
            std::fill(row.begin(), row.end(), model.sclera_intensity);
        }
    }

    Rng artifact_rng(derive_seed(seed, 1));
    for (int i = 0; i < noise.artifact_count; ++i) {
        const Vec2 c{artifact_rng.uniform(0.0, frame.width()), artifact_rng.uniform(0.0, frame.height())};
        fill_disk(frame, c, noise.artifact_radius_px, model.pupil_intensity);
    }

    if (noise.gaussian_sigma > 0.0) {
        Rng noise_rng(derive_seed(seed, 2));
        add_gaussian_noise(frame, noise.gaussian_sigma, noise_rng);
    }
    return frame;
}

std::string noise_algorithm_id() {
    return std::string(Rng::kAlgorithm) + "+normal-quantile-lut12";
}

std::map<std::string, std::string> describe_render_setup(const EyeCameraModel& model, const NoiseParams& noise,
                                                         std::uint64_t seed) {
    auto num = [](double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    };
    return {
        {"eye.frame_width_px", std::to_string(model.frame_width_px)},
        {"eye.frame_height_px", std::to_string(model.frame_height_px)},
        {"eye.neutral_x", num(model.neutral_center.x)},
        {"eye.neutral_y", num(model.neutral_center.y)},
        {"eye.px_per_deg", num(model.px_per_deg)},
        {"eye.pupil_radius_px", num(model.pupil_radius_px)},
        {"eye.pupil_intensity", std::to_string(model.pupil_intensity)},
        {"eye.iris_intensity", std::to_string(model.iris_intensity)},
        {"eye.sclera_intensity", std::to_string(model.sclera_intensity)},
        {"noise.gaussian_sigma", num(noise.gaussian_sigma)},
        {"noise.artifact_count", std::to_string(noise.artifact_count)},
        {"noise.artifact_radius_px", num(noise.artifact_radius_px)},
        {"noise.eyelid_occlusion_frac", num(noise.eyelid_occlusion_frac)},
        {"noise.algorithm", noise_algorithm_id()},
        {"seed", std::to_string(seed)},
    };
}

}  // namespace vorcursor
