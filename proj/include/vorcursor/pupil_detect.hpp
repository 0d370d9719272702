#pragma once

#include <cstdint>
#include <optional>

#include "vorcursor/contours.hpp"
#include "vorcursor/image.hpp"
#include "vorcursor/vec2.hpp"

namespace vorcursor {

enum class ThresholdMode { Fixed, Auto };

struct DetectorConfig {
    ThresholdMode threshold_mode = ThresholdMode::Auto;
    int fixed_threshold = 60;
    /// Auto threshold as a fraction of the frame's mean intensity.
    double alpha = 0.5;
    double min_area_px2 = 300.0;
    double circularity_tol = 0.2;
    double aspect_tol = 0.2;

    void validate() const;
};

struct CircularityResult {
    bool passed = false;
    /// |1 - contour area / (pi r^2)|.
    double score = 0.0;
    /// |1 - bbox height / bbox width|.
    double aspect_score = 0.0;
};

struct PupilDetection {
    Vec2 center;
    double radius_px = 0.0;
    double area_px2 = 0.0;
    double score = 0.0;
    BoundingBox bbox;
    Contour contour;
};

/// Detection outcome for one frame. `pupil` is empty when no contour
/// survived the filters (NoPupilFound).
struct DetectResult {
    std::optional<PupilDetection> pupil;
    int threshold = 0;
    int contour_count = 0;
    int candidate_count = 0;
};

int auto_threshold(const GrayFrame& frame, const DetectorConfig& config);

/// Foreground marks pixels strictly darker than `threshold`.
BinaryImage binarize(const GrayFrame& frame, int threshold);

/// Area-versus-disk test plus unit-aspect test on the bounding box. The disk
/// radius is half the pixel-center extent of the box, matching the
/// pixel-center polygon that contour_area measures.
CircularityResult circularity_check(const Contour& contour, const DetectorConfig& config);

DetectResult detect_pupil(const GrayFrame& frame, const DetectorConfig& config);

/// Same pipeline; throws NoPupilFound instead of returning an empty result.
PupilDetection detect_pupil_or_throw(const GrayFrame& frame, const DetectorConfig& config);

}  // namespace vorcursor
