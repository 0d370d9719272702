#include "vorcursor/contours.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>

namespace vorcursor {
namespace {

// Neighbour offsets in counter-clockwise order as seen on screen (y down):
// E, NE, N, NW, W, SW, S, SE.
constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy[8] = {0, -1, -1, -1, 0, 1, 1, 1};

int direction_of(int dx, int dy) {
    for (int k = 0; k < 8; ++k)
        if (kDx[k] == dx && kDy[k] == dy) return k;
    return -1;
}

// Padded foreground mask plus a label plane; both carry a one-pixel
// background frame so the tracer never reads outside the buffers. A pixel's
// Suzuki value is its label once traced, otherwise its mask bit.
class LabelImage {
public:
    explicit LabelImage(const BinaryImage& binary)
        : stride_(binary.width() + 2),
          rows_(binary.height() + 2),
          mask_(static_cast<std::size_t>(stride_) * rows_, 0),
          labels_(static_cast<std::size_t>(stride_) * rows_, 0) {
        const auto src = binary.bytes();
        for (int y = 0; y < binary.height(); ++y) {
            std::copy_n(src.data() + static_cast<std::size_t>(y) * binary.width(), binary.width(),
                        &mask_[static_cast<std::size_t>(y + 1) * stride_ + 1]);
        }
    }

    std::int32_t operator()(int x, int y) const {
        const std::size_t i = index(x, y);
        return labels_[i] != 0 ? labels_[i] : mask_[i];
    }
    void set(int x, int y, std::int32_t v) { labels_[index(x, y)] = v; }
    const std::uint8_t* mask_row(int y) const { return &mask_[static_cast<std::size_t>(y) * stride_]; }
    int stride() const { return stride_; }
    int rows() const { return rows_; }

private:
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * stride_ + x; }

    int stride_;
    int rows_;
    std::vector<std::uint8_t> mask_;
    std::vector<std::int32_t> labels_;
};

// Follows one border starting at (x, y), whose known background neighbour
// lies in direction `from`. Labels visited pixels with +-nbd and, when
// `out` is given, records the visited sequence in unpadded coordinates.
void follow_border(LabelImage& f, int x, int y, int from, std::int32_t nbd, std::vector<Point>* out) {
    // Clockwise search around the start pixel for the first non-zero neighbour.
    int first_dir = -1;
    for (int step = 0; step < 8; ++step) {
        const int k = (from - step + 8) % 8;
        if (f(x + kDx[k], y + kDy[k]) != 0) {
            first_dir = k;
            break;
        }
    }
    if (first_dir < 0) {
        f.set(x, y, -nbd);
        if (out) out->push_back({x - 1, y - 1});
        return;
    }

    const int x1 = x + kDx[first_dir], y1 = y + kDy[first_dir];
    int px = x1, py = y1;  // previous pixel on the border
    int cx = x, cy = y;    // current pixel
    while (true) {
        if (out) out->push_back({cx - 1, cy - 1});
        // Counter-clockwise search around the current pixel, starting just
        // after the previous border pixel.
        const int back = direction_of(px - cx, py - cy);
        bool east_examined_zero = false;
        int nx = cx, ny = cy;
        for (int step = 1; step <= 8; ++step) {
            const int k = (back + step) % 8;
            const int qx = cx + kDx[k], qy = cy + kDy[k];
            if (f(qx, qy) != 0) {
                nx = qx;
                ny = qy;
                break;
            }
            if (k == 0) east_examined_zero = true;
        }
        if (east_examined_zero) {
            f.set(cx, cy, -nbd);
        } else if (f(cx, cy) == 1) {
            f.set(cx, cy, nbd);
        }
        if (nx == x && ny == y && cx == x1 && cy == y1) break;
        px = cx;
        py = cy;
        cx = nx;
        cy = ny;
    }
}

}  // namespace

std::vector<Contour> find_contours(const BinaryImage& binary) {
    std::vector<Contour> contours;
    if (binary.width() <= 0 || binary.height() <= 0) return contours;
    LabelImage f(binary);
    std::int32_t nbd = 1;
    const int last = f.stride() - 1;
    for (int y = 1; y < f.rows() - 1; ++y) {
        const std::uint8_t* mask = f.mask_row(y);
        int x = 1;
        while (x < last) {
            // Only run boundaries can start a border; interiors never do.
            const void* hit = std::memchr(mask + x, 1, static_cast<std::size_t>(last - x));
            if (!hit) break;
            const int run_start = static_cast<int>(static_cast<const std::uint8_t*>(hit) - mask);
            int run_end = run_start;
            while (mask[run_end + 1]) ++run_end;

            if (f(run_start, y) == 1) {
                ++nbd;
                Contour c;
                follow_border(f, run_start, y, 4, nbd, &c.points);
                contours.push_back(std::move(c));
            } else if (run_start == run_end && f(run_start, y) >= 1) {
                ++nbd;
                follow_border(f, run_start, y, 0, nbd, nullptr);
            }
            if (run_end != run_start && f(run_end, y) >= 1) {
                ++nbd;
                follow_border(f, run_end, y, 0, nbd, nullptr);
            }
            x = run_end + 1;
        }
    }
    return contours;
}

double contour_area(const Contour& contour) {
    const auto& p = contour.points;
    if (p.size() < 3) return 0.0;
    long long twice = 0;
    for (std::size_t i = 0, j = p.size() - 1; i < p.size(); j = i++)
        twice += static_cast<long long>(p[j].x) * p[i].y - static_cast<long long>(p[i].x) * p[j].y;
    return std::abs(static_cast<double>(twice)) / 2.0;
}

BoundingBox bounding_box(const Contour& contour) {
    if (contour.points.empty()) return {};
    int min_x = contour.points.front().x, max_x = min_x;
    int min_y = contour.points.front().y, max_y = min_y;
    for (const Point& p : contour.points) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    return {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
}

}  // namespace vorcursor
