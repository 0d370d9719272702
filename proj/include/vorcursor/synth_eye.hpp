#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "vorcursor/image.hpp"
#include "vorcursor/vec2.hpp"

namespace vorcursor {

/// Eye-in-head rotation. Positive yaw moves the pupil toward +x in the
/// camera image; positive pitch is upward and maps to -y (rows grow down).
struct EyeState {
    double yaw_deg = 0.0;
    double pitch_deg = 0.0;

    void validate() const;
};

/// Projection from eye rotation to the camera image of the pupil.
struct EyeCameraModel {
    int frame_width_px = 640;
    int frame_height_px = 480;
    Vec2 neutral_center{320.0, 240.0};
    double px_per_deg = 4.0;
    double pupil_radius_px = 40.0;
    std::uint8_t pupil_intensity = 15;
    std::uint8_t iris_intensity = 120;
    std::uint8_t sclera_intensity = 200;

    /// Iris disk radius as a multiple of the pupil radius.
    static constexpr double kIrisScale = 2.5;

    void validate() const;
};

struct NoiseParams {
    double gaussian_sigma = 3.0;
    int artifact_count = 2;
    double artifact_radius_px = 2.0;
    /// Fraction of the pupil height hidden by the upper eyelid, [0, 1).
    double eyelid_occlusion_frac = 0.0;

    static NoiseParams none() { return {0.0, 0, 2.0, 0.0}; }
    void validate() const;
};

struct Ellipse {
    Vec2 center;
    double semi_x = 0.0;
    double semi_y = 0.0;

    /// Pixel-center containment test; the rasterization rule for all renders.
    bool contains(int x, int y) const {
        const double dx = (x - center.x) / semi_x;
        const double dy = (y - center.y) / semi_y;
        return dx * dx + dy * dy <= 1.0;
    }
};

/// Image-plane outline of the pupil for an eye rotation. Throws
/// DegenerateError when foreshortening collapses a semi-axis below 1 px.
Ellipse pupil_image_ellipse(const EyeState& eye, const EyeCameraModel& model);

/// First image row left uncovered by the eyelid for a given pupil outline.
/// Rows strictly above it are painted as eyelid skin.
double eyelid_cut_row(const Ellipse& pupil, const NoiseParams& noise);

/// Renders a synthetic infrared eye image. Deterministic in all arguments.
GrayFrame render_eye_frame(const EyeState& eye, const EyeCameraModel& model, const NoiseParams& noise,
                           std::uint64_t seed);

/// Name of the per-pixel noise sampler, recorded in run outputs.
std::string noise_algorithm_id();

/// key=value description of a render setup (sequence.meta contents).
std::map<std::string, std::string> describe_render_setup(const EyeCameraModel& model, const NoiseParams& noise,
                                                         std::uint64_t seed);

}  // namespace vorcursor
