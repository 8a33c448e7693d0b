#ifndef UIC_PLANE_HPP
#define UIC_PLANE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace uic {

// Row-major grid of real-valued transform coefficients.
class CoeffPlane {
public:
    CoeffPlane() = default;

    CoeffPlane(std::size_t width, std::size_t height, double fill = 0.0)
        : width_(width), height_(height), values_(width * height, fill) {}

    CoeffPlane(std::size_t width, std::size_t height, std::vector<double> values)
        : width_(width), height_(height), values_(std::move(values)) {
        if (values_.size() != width_ * height_)
            throw std::invalid_argument("CoeffPlane: value count does not match dimensions");
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double& operator()(std::size_t row, std::size_t col) { return values_[row * width_ + col]; }
    double operator()(std::size_t row, std::size_t col) const { return values_[row * width_ + col]; }

    std::vector<double>& values() noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }

    bool same_shape(const CoeffPlane& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    double energy() const noexcept {
        double sum = 0.0;
        for (double v : values_) sum += v * v;
        return sum;
    }

    double max_abs() const noexcept {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    friend bool operator==(const CoeffPlane&, const CoeffPlane&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<double> values_;
};

enum class ScanKind : unsigned char { raster = 1, morton = 2 };

inline std::string to_string(ScanKind kind) {
    return kind == ScanKind::morton ? "morton" : "row-raster";
}

// The 3-D matrix of equally sized sub-blocks. `scan` records the order the
// blocks are currently stored in; grid_rows x grid_cols is the 2-D layout they
// were cut from.
struct BlockStack {
    std::vector<CoeffPlane> blocks;
    std::size_t grid_rows = 0;
    std::size_t grid_cols = 0;
    ScanKind scan = ScanKind::raster;

    std::size_t size() const noexcept { return blocks.size(); }

    std::size_t block_width() const noexcept { return blocks.empty() ? 0 : blocks.front().width(); }
    std::size_t block_height() const noexcept { return blocks.empty() ? 0 : blocks.front().height(); }

    void validate() const {
        if (blocks.size() != grid_rows * grid_cols)
            throw std::invalid_argument("BlockStack: block count does not match grid");
        for (const auto& b : blocks)
            if (!b.same_shape(blocks.front()))
                throw std::invalid_argument("BlockStack: blocks differ in size");
    }

    friend bool operator==(const BlockStack&, const BlockStack&) = default;
};

} // namespace uic

#endif // UIC_PLANE_HPP
