#include "vorcursor/geometry.hpp"

#include <cmath>

#include "vorcursor/error.hpp"

namespace vorcursor {

void ScreenConfig::validate() const {
    if (width_px <= 0 || height_px <= 0) throw ConfigError("screen dimensions must be positive");
    if (!(width_cm > 0.0)) throw ConfigError("screen.width_cm must be positive");
    if (!(viewing_distance_cm > 0.0)) throw ConfigError("screen.viewing_distance_cm must be positive");
}

void CameraConfig::validate() const {
    if (frame_width_px <= 0 || frame_height_px <= 0) throw ConfigError("camera frame dimensions must be positive");
    if (!(fov_deg > 0.0 && fov_deg < 180.0)) throw ConfigError("camera.fov_deg must lie in (0, 180)");
    if (!(focal_distance_mm > 0.0)) throw ConfigError("camera.focal_distance_mm must be positive");
    if (!(frame_rate_hz > 0.0)) throw ConfigError("camera.frame_rate_hz must be positive");
}

double fov_linear_extent(double focal_distance_mm, double fov_deg) {
    if (!(focal_distance_mm > 0.0)) throw ConfigError("focal distance must be positive");
    if (!(fov_deg >= 0.0 && fov_deg < 180.0)) throw ConfigError("field of view must lie in [0, 180) degrees");
    return 2.0 * focal_distance_mm * std::tan(deg_to_rad(fov_deg) / 2.0);
}

double cm_per_pixel(const ScreenConfig& screen) {
    screen.validate();
    return screen.width_cm / screen.width_px;
}

double degrees_per_pixel(double fov_deg, double extent_px) {
    if (!(extent_px > 0.0)) throw ConfigError("pixel extent must be positive");
    return fov_deg / extent_px;
}

double pixels_per_degree(double fov_deg, double extent_px) {
    if (!(fov_deg > 0.0)) throw ConfigError("field of view must be positive");
    if (!(extent_px > 0.0)) throw ConfigError("pixel extent must be positive");
    return extent_px / fov_deg;
}

double visual_angle_to_screen_px(double angle_deg, const ScreenConfig& screen) {
    if (!(std::abs(angle_deg) < 90.0)) throw ConfigError("visual angle must lie in (-90, 90) degrees");
    return screen.viewing_distance_cm * std::tan(deg_to_rad(angle_deg)) / cm_per_pixel(screen);
}

double screen_px_to_visual_angle(double offset_px, const ScreenConfig& screen) {
    return rad_to_deg(std::atan(offset_px * cm_per_pixel(screen) / screen.viewing_distance_cm));
}

}  // namespace vorcursor
