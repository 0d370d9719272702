#pragma once

// Screen and camera geometry. Angles are carried in degrees everywhere and
// only converted to radians inside trigonometric evaluation.

namespace vorcursor {

struct ScreenConfig {
    int width_px = 1920;
    int height_px = 1080;
    double width_cm = 52.99;
    double viewing_distance_cm = 50.0;

    void validate() const;
    double center_x() const { return 0.5 * width_px; }
    double center_y() const { return 0.5 * height_px; }
};

struct CameraConfig {
    int frame_width_px = 640;
    int frame_height_px = 480;
    double fov_deg = 23.0;
    double focal_distance_mm = 200.0;
    double frame_rate_hz = 60.0;

    void validate() const;
};

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Linear extent covered by a field of view at a focal distance: 2 d tan(fov/2).
double fov_linear_extent(double focal_distance_mm, double fov_deg);

double cm_per_pixel(const ScreenConfig& screen);

double degrees_per_pixel(double fov_deg, double extent_px);
double pixels_per_degree(double fov_deg, double extent_px);

/// Screen pixels subtended by a visual angle at the configured viewing distance.
double visual_angle_to_screen_px(double angle_deg, const ScreenConfig& screen);

/// Inverse of visual_angle_to_screen_px.
double screen_px_to_visual_angle(double offset_px, const ScreenConfig& screen);

}  // namespace vorcursor
