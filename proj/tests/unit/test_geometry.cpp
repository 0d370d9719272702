#include <gtest/gtest.h>

#include <cmath>

#include "vorcursor/error.hpp"
#include "vorcursor/geometry.hpp"

using namespace vorcursor;

TEST(Geometry, FieldOfViewExtent) {
    // 2 d tan(fov/2), evaluated in long double as the reference
    const auto ref = [](long double d, long double fov) {
        return static_cast<double>(2.0L * d * std::tan(fov * 3.14159265358979323846L / 360.0L));
    };
    EXPECT_NEAR(fov_linear_extent(200, 56), ref(200, 56), 1e-9);
    EXPECT_NEAR(fov_linear_extent(200, 56), 212.9, 1.0);
    EXPECT_NEAR(fov_linear_extent(200, 23), 81.4, 0.5);
    EXPECT_EQ(fov_linear_extent(200, 0), 0.0);
    EXPECT_THROW(fov_linear_extent(200, 180), ConfigError);
    EXPECT_THROW(fov_linear_extent(200, 181), ConfigError);
    EXPECT_THROW(fov_linear_extent(0, 30), ConfigError);
}

TEST(Geometry, CmPerPixel) {
    const ScreenConfig screen;
    EXPECT_NEAR(cm_per_pixel(screen), 0.0276, 5e-5);
    const double start_to_centre = std::hypot(960.0, 540.0);
    EXPECT_NEAR(start_to_centre, 1101.45, 0.01);
    EXPECT_NEAR(start_to_centre * cm_per_pixel(screen), 30.4, 0.1);
    ScreenConfig bad;
    bad.width_px = 0;
    EXPECT_THROW(cm_per_pixel(bad), ConfigError);
}

TEST(Geometry, DegreesPerPixel) {
    EXPECT_NEAR(degrees_per_pixel(23, 1920), 0.0120, 0.0003);
    EXPECT_NEAR(pixels_per_degree(23, 1920) * degrees_per_pixel(23, 1920), 1.0, 1e-12);
    EXPECT_THROW(degrees_per_pixel(23, 0), ConfigError);
}

TEST(Geometry, VisualAngleProjection) {
    const ScreenConfig screen;
    const double one_deg = visual_angle_to_screen_px(1.0, screen);
    EXPECT_NEAR(one_deg, 50.0 * std::tan(3.14159265358979323846 / 180.0) / (52.99 / 1920.0), 1e-9);
    EXPECT_NEAR(one_deg, 31.6, 0.1);
    EXPECT_NEAR(visual_angle_to_screen_px(-1.0, screen), -one_deg, 1e-12);
    EXPECT_EQ(visual_angle_to_screen_px(0.0, screen), 0.0);
    EXPECT_THROW(visual_angle_to_screen_px(90.0, screen), ConfigError);
    EXPECT_THROW(visual_angle_to_screen_px(-95.0, screen), ConfigError);
}

TEST(Geometry, ProjectionRoundTrip) {
    const ScreenConfig screen;
    for (double a = -60.0; a <= 60.0; a += 0.5)
        EXPECT_NEAR(screen_px_to_visual_angle(visual_angle_to_screen_px(a, screen), screen), a, 1e-9);
}

TEST(Geometry, ConfigValidation) {
    EXPECT_NO_THROW(ScreenConfig{}.validate());
    EXPECT_NO_THROW(CameraConfig{}.validate());
    CameraConfig cam;
    cam.fov_deg = 180;
    EXPECT_THROW(cam.validate(), ConfigError);
    ScreenConfig s;
    s.viewing_distance_cm = -1;
    EXPECT_THROW(s.validate(), ConfigError);
}
