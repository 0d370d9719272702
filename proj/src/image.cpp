#include "vorcursor/image.hpp"

#include <algorithm>
#include <cstdio>
#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

#include "vorcursor/error.hpp"

namespace vorcursor {

namespace fs = std::filesystem;

GrayFrame::GrayFrame(int width, int height, std::uint8_t fill)
    : width_(width), height_(height), pixels_(static_cast<std::size_t>(width) * height, fill) {
    if (width <= 0 || height <= 0) throw ConfigError("frame dimensions must be positive");
}

GrayFrame::GrayFrame(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width <= 0 || height <= 0) throw ConfigError("frame dimensions must be positive");
    if (pixels_.size() != static_cast<std::size_t>(width) * height)
        throw ConfigError("pixel buffer length does not match frame dimensions");
}

GrayFrame GrayFrame::downscale(int factor) const {
    if (factor <= 0) throw ConfigError("downscale factor must be positive");
    const int w = width_ / factor;
    const int h = height_ / factor;
    GrayFrame out(std::max(w, 1), std::max(h, 1));
    const int area = factor * factor;
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            int sum = 0;
            for (int dy = 0; dy < factor; ++dy)
                for (int dx = 0; dx < factor; ++dx)
                    sum += at(std::min(x * factor + dx, width_ - 1), std::min(y * factor + dy, height_ - 1));
            out.at(x, y) = static_cast<std::uint8_t>((sum + area / 2) / area);
        }
    }
    return out;
}

std::size_t BinaryImage::count() const {
    return static_cast<std::size_t>(std::count_if(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; }));
}

std::string encode_pgm(const GrayFrame& frame) {
    std::string out = "P5\n" + std::to_string(frame.width()) + " " + std::to_string(frame.height()) + "\n255\n";
    const auto px = frame.pixels();
    out.append(reinterpret_cast<const char*>(px.data()), px.size());
    return out;
}

namespace {

class HeaderReader {
public:
    explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

    std::string token() {
        skip_space_and_comments();
        std::size_t start = pos_;
        while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
        if (start == pos_) throw FormatError("PGM header truncated");
        return std::string(bytes_.substr(start, pos_ - start));
    }

    long number(const char* what) {
        const std::string tok = token();
        if (!std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            throw FormatError(std::string("PGM header: invalid ") + what + " '" + tok + "'");
        if (tok.size() > 9) throw FormatError(std::string("PGM header: ") + what + " out of range");
        return std::stol(tok);
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t payload_offset() {
        if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
            throw FormatError("PGM header: missing separator before raster");
        return pos_ + 1;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

GrayFrame decode_pgm(std::string_view bytes) {
    if (bytes.size() < 2 || bytes.substr(0, 2) != "P5")
        throw FormatError("not a binary PGM: expected magic 'P5', found '" +
                          std::string(bytes.substr(0, std::min<std::size_t>(2, bytes.size()))) + "'");
    HeaderReader reader(bytes.substr(2));
    const long width = reader.number("width");
    const long height = reader.number("height");
    const long maxval = reader.number("maxval");
    if (width <= 0 || height <= 0) throw FormatError("PGM header: dimensions must be positive");
    if (maxval != 255) throw FormatError("PGM maxval must be 255, found " + std::to_string(maxval));
    const std::size_t offset = 2 + reader.payload_offset();
    const std::size_t expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() < offset + expected)
        throw FormatError("PGM raster truncated: expected " + std::to_string(expected) + " bytes, found " +
                          std::to_string(bytes.size() - std::min(bytes.size(), offset)));
    std::vector<std::uint8_t> pixels(expected);
    std::copy_n(bytes.data() + offset, expected, reinterpret_cast<char*>(pixels.data()));
    return GrayFrame(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

void save_pgm(const GrayFrame& frame, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    const std::string bytes = encode_pgm(frame);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

GrayFrame load_pgm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_pgm(bytes);
}

std::string sequence_frame_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%06d.pgm", index);
    return buf;
}

void write_sequence_meta(const fs::path& dir, const std::map<std::string, std::string>& entries) {
    const fs::path path = dir / "sequence.meta";
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    for (const auto& [key, value] : entries) out << key << '=' << value << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

std::map<std::string, std::string> read_sequence_meta(const fs::path& dir) {
    const fs::path path = dir / "sequence.meta";
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::map<std::string, std::string> entries;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        entries[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return entries;
}

std::vector<fs::path> list_sequence_frames(const fs::path& dir) {
    std::vector<fs::path> frames;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pgm") frames.push_back(entry.path());
    }
    std::sort(frames.begin(), frames.end());
    return frames;
}

}  // namespace vorcursor
