#include "vorcursor/pupil_detect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vorcursor/error.hpp"
#include "vorcursor/geometry.hpp"

namespace vorcursor {

void DetectorConfig::validate() const {
    if (threshold_mode == ThresholdMode::Auto && !(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("detector alpha must lie in (0, 1)");
    if (threshold_mode == ThresholdMode::Fixed && (fixed_threshold < 0 || fixed_threshold > 255))
        throw ConfigError("fixed threshold must lie in [0, 255]");
    if (!(min_area_px2 > 0.0)) throw ConfigError("min_area_px2 must be positive");
    if (!(circularity_tol > 0.0 && circularity_tol < 1.0) || !(aspect_tol > 0.0 && aspect_tol < 1.0))
        throw ConfigError("circularity and aspect tolerances must lie in (0, 1)");
}

int auto_threshold(const GrayFrame& frame, const DetectorConfig& config) {
    if (config.threshold_mode == ThresholdMode::Fixed) return config.fixed_threshold;
    if (frame.empty()) throw DegenerateError("cannot threshold an empty frame");
    const auto px = frame.pixels();
    const std::uint64_t sum = std::accumulate(px.begin(), px.end(), std::uint64_t{0});
    if (sum == 0) throw DegenerateError("frame is entirely black; auto threshold undefined");
    const double mean = static_cast<double>(sum) / static_cast<double>(px.size());
    return std::clamp(static_cast<int>(std::lround(config.alpha * mean)), 1, 254);
}

BinaryImage binarize(const GrayFrame& frame, int threshold) {
    BinaryImage out(frame.width(), frame.height());
    const auto src = frame.pixels();
    auto dst = out.bytes();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] < threshold ? 1 : 0;
    return out;
}

CircularityResult circularity_check(const Contour& contour, const DetectorConfig& config) {
    CircularityResult result;
    const BoundingBox box = bounding_box(contour);
    const double extent_x = box.width - 1;
    const double extent_y = box.height - 1;
    if (extent_x <= 0.0) {
        result.score = 1.0;
        result.aspect_score = 1.0;
        return result;
    }
    const double r = extent_x / 2.0;
    const double expected = kPi * r * r;
    result.score = std::abs(1.0 - contour_area(contour) / expected);
    result.aspect_score = std::abs(1.0 - extent_y / extent_x);
    result.passed = result.score <= config.circularity_tol && result.aspect_score <= config.aspect_tol;
    return result;
}

DetectResult detect_pupil(const GrayFrame& frame, const DetectorConfig& config) {
    DetectResult result;
    result.threshold = auto_threshold(frame, config);
    std::vector<Contour> contours = find_contours(binarize(frame, result.threshold));
    result.contour_count = static_cast<int>(contours.size());

    std::optional<PupilDetection> best;
    for (Contour& c : contours) {
        // Bounding-box area is a cheap upper bound on the contour area.
        const BoundingBox box = bounding_box(c);
        if (static_cast<double>(box.width - 1) * (box.height - 1) < config.min_area_px2) continue;
        const double area = contour_area(c);
        if (area < config.min_area_px2) continue;
        const CircularityResult circ = circularity_check(c, config);
        if (!circ.passed) continue;
        ++result.candidate_count;
        const bool better = !best || area > best->area_px2 || (area == best->area_px2 && circ.score < best->score);
        if (!better) continue;
        PupilDetection d;
        d.center = {box.center_x(), box.center_y()};
        d.radius_px = box.width / 2.0;
        d.area_px2 = area;
        d.score = circ.score;
        d.bbox = box;
        d.contour = std::move(c);
        best = std::move(d);
    }
    result.pupil = std::move(best);
    return result;
}

PupilDetection detect_pupil_or_throw(const GrayFrame& frame, const DetectorConfig& config) {
    DetectResult r = detect_pupil(frame, config);
    if (!r.pupil) throw NoPupilFound();
    return std::move(*r.pupil);
}

}  // namespace vorcursor
