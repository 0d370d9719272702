#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace vorcursor {

/// 8-bit grayscale image, row-major, row 0 at the top.
class GrayFrame {
public:
    GrayFrame() = default;
    GrayFrame(int width, int height, std::uint8_t fill = 0);
    GrayFrame(int width, int height, std::vector<std::uint8_t> pixels);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return pixels_.empty(); }

    std::uint8_t at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
    std::uint8_t& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

    std::span<const std::uint8_t> pixels() const { return pixels_; }
    std::span<std::uint8_t> pixels() { return pixels_; }
    std::span<std::uint8_t> row(int y) { return std::span(pixels_).subspan(static_cast<std::size_t>(y) * width_, width_); }

    /// Block-average downscale by an integer factor (used for UI thumbnails).
    GrayFrame downscale(int factor) const;

    friend bool operator==(const GrayFrame&, const GrayFrame&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

/// Boolean image; true marks foreground (dark, pupil-candidate) pixels.
/// Stored one byte per pixel so the contour tracer can write border labels
/// into a working copy without repacking.
class BinaryImage {
public:
    BinaryImage() = default;
    BinaryImage(int width, int height) : width_(width), height_(height), bits_(static_cast<std::size_t>(width) * height, 0) {}

    int width() const { return width_; }
    int height() const { return height_; }

    bool at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    void set(int x, int y, bool v) { bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }
    /// Out-of-range coordinates read as background.
    bool get_or_background(int x, int y) const {
        return x >= 0 && y >= 0 && x < width_ && y < height_ && at(x, y);
    }
    std::size_t count() const;

    std::span<const std::uint8_t> bytes() const { return bits_; }
    std::span<std::uint8_t> bytes() { return bits_; }

    friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

void save_pgm(const GrayFrame& frame, const std::filesystem::path& path);
GrayFrame load_pgm(const std::filesystem::path& path);

/// Encodes a frame as binary PGM bytes; save_pgm writes exactly these.
std::string encode_pgm(const GrayFrame& frame);
GrayFrame decode_pgm(std::string_view bytes);

/// Name of the i-th frame in a sequence directory: frame_%06d.pgm.
std::string sequence_frame_name(int index);

void write_sequence_meta(const std::filesystem::path& dir, const std::map<std::string, std::string>& entries);
std::map<std::string, std::string> read_sequence_meta(const std::filesystem::path& dir);

/// PGM files in a directory, sorted by filename.
std::vector<std::filesystem::path> list_sequence_frames(const std::filesystem::path& dir);

}  // namespace vorcursor
