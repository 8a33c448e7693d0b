#ifndef UIC_IMAGE_HPP
#define UIC_IMAGE_HPP

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "error.hpp"
#include "plane.hpp"

namespace uic {

// 8-bit grayscale image, row-major.
class Image {
public:
    Image() = default;

    Image(std::size_t width, std::size_t height, std::uint8_t fill = 0)
        : width_(width), height_(height), pixels_(width * height, fill) {
        check();
    }

    Image(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels)
        : width_(width), height_(height), pixels_(std::move(pixels)) {
        check();
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return pixels_.size(); }

    std::uint8_t& operator()(std::size_t row, std::size_t col) { return pixels_[row * width_ + col]; }
    std::uint8_t operator()(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }

    const std::vector<std::uint8_t>& pixels() const noexcept { return pixels_; }
    std::vector<std::uint8_t>& pixels() noexcept { return pixels_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    void check() const {
        if (width_ == 0 || height_ == 0) throw std::invalid_argument("Image: dimensions must be positive");
        if (pixels_.size() != width_ * height_)
            throw std::invalid_argument("Image: pixel count does not match dimensions");
    }

    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

// ---------------------------------------------------------------------------
// Files

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());
    return bytes;
}

// Writes to a sibling temporary and renames it into place, so readers never
// observe a partially written file.
inline void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
    write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

// ---------------------------------------------------------------------------
// Binary PGM (P5)

namespace detail {

class PgmHeaderParser {
public:
    explicit PgmHeaderParser(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t next_number(const char* field) {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_]))
            throw FormatError(std::string("PGM: expected ") + field);
        std::size_t value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > (std::size_t{1} << 31)) throw FormatError(std::string("PGM: ") + field + " too large");
            ++pos_;
        }
        return value;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_start() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) throw FormatError("PGM: truncated header");
        return pos_ + 1;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 2;
};

} // namespace detail

inline Image load_pgm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P') throw FormatError("PGM: bad magic");
    if (bytes[1] != '5') throw FormatError("PGM: unsupported variant P" + std::string(1, char(bytes[1])));

    detail::PgmHeaderParser parser(bytes);
    const std::size_t width = parser.next_number("width");
    const std::size_t height = parser.next_number("height");
    const std::size_t maxval = parser.next_number("maxval");
    if (width == 0 || height == 0) throw FormatError("PGM: zero dimension");
    if (maxval == 0 || maxval > 255) throw FormatError("PGM: maxval must be in [1, 255]");

    const std::size_t start = parser.raster_start();
    if (bytes.size() < start || bytes.size() - start < width * height) throw FormatError("PGM: truncated payload");
    return Image(width, height, std::vector<std::uint8_t>(bytes.begin() + start, bytes.begin() + start + width * height));
}

inline std::vector<std::uint8_t> save_pgm(const Image& img) {
    const std::string header = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels().begin(), img.pixels().end());
    return out;
}

inline Image read_pgm(const std::filesystem::path& path) { return load_pgm(read_file(path)); }

inline void write_pgm(const std::filesystem::path& path, const Image& img) { write_file_atomic(path, save_pgm(img)); }

// ---------------------------------------------------------------------------
// Noise

enum class NoiseKind : unsigned char { salt_and_pepper };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::salt_and_pepper;
    double density = 0.0;
    std::uint64_t seed = 0;

    friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

// Per-pixel Bernoulli impulse noise. Draws come from std::mt19937_64, whose
// output sequence is fixed by the standard; each pixel consumes one draw for
// the corruption test (top 53 bits as a uniform in [0,1)) and, if corrupted,
// a second draw whose top bit picks pepper (0) or salt (255).
inline Image add_salt_pepper(const Image& img, const NoiseSpec& spec) {
    if (!(spec.density >= 0.0 && spec.density <= 1.0))
        throw std::invalid_argument("noise density must be in [0, 1]");
    std::mt19937_64 rng(spec.seed);
    Image out = img;
    for (auto& px : out.pixels()) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (u < spec.density) px = (rng() >> 63) ? 255 : 0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Conversions and tiling

inline CoeffPlane to_plane(const Image& img) {
    CoeffPlane p(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) p.values()[i] = img.pixels()[i];
    return p;
}

// Rounds half away from zero and clamps to [0, 255].
inline std::uint8_t to_pixel(double v) {
    const double r = std::round(v);
    return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

inline Image to_image(const CoeffPlane& plane) {
    std::vector<std::uint8_t> px(plane.size());
    for (std::size_t i = 0; i < plane.size(); ++i) px[i] = to_pixel(plane.values()[i]);
    return Image(plane.width(), plane.height(), std::move(px));
}

// Cuts the plane into block x block tiles in row-raster tile order.
inline BlockStack tile(const CoeffPlane& plane, std::size_t block) {
    if (block == 0 || plane.width() % block != 0 || plane.height() % block != 0)
        throw std::invalid_argument("tile: block size must divide both image dimensions");
    BlockStack stack;
    stack.grid_rows = plane.height() / block;
    stack.grid_cols = plane.width() / block;
    stack.blocks.reserve(stack.grid_rows * stack.grid_cols);
    for (std::size_t tr = 0; tr < stack.grid_rows; ++tr) {
        for (std::size_t tc = 0; tc < stack.grid_cols; ++tc) {
            CoeffPlane b(block, block);
            for (std::size_t r = 0; r < block; ++r)
                for (std::size_t c = 0; c < block; ++c) b(r, c) = plane(tr * block + r, tc * block + c);
            stack.blocks.push_back(std::move(b));
        }
    }
    return stack;
}

inline BlockStack tile(const Image& img, std::size_t block) { return tile(to_plane(img), block); }

inline CoeffPlane untile(const BlockStack& stack, std::size_t width, std::size_t height) {
    stack.validate();
    if (stack.scan != ScanKind::raster) throw std::invalid_argument("untile: stack must be in row-raster order");
    const std::size_t bw = stack.block_width();
    const std::size_t bh = stack.block_height();
    if (bw * stack.grid_cols != width || bh * stack.grid_rows != height)
        throw std::invalid_argument("untile: stack geometry does not match image dimensions");
    CoeffPlane plane(width, height);
    for (std::size_t tr = 0; tr < stack.grid_rows; ++tr)
        for (std::size_t tc = 0; tc < stack.grid_cols; ++tc) {
            const auto& b = stack.blocks[tr * stack.grid_cols + tc];
            for (std::size_t r = 0; r < bh; ++r)
                for (std::size_t c = 0; c < bw; ++c) plane(tr * bh + r, tc * bw + c) = b(r, c);
        }
    return plane;
}

} // namespace uic

#endif // UIC_IMAGE_HPP
