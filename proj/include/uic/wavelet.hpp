#ifndef UIC_WAVELET_HPP
#define UIC_WAVELET_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "plane.hpp"

namespace uic {

// One level of the 2-D Haar transform. All four planes are half the parent
// size in each dimension.
struct SubbandQuad {
    CoeffPlane ll; // approximation
    CoeffPlane lh; // vertical detail
    CoeffPlane hl; // horizontal detail
    CoeffPlane hh; // diagonal detail

    friend bool operator==(const SubbandQuad&, const SubbandQuad&) = default;
};

enum class ShrinkMode : unsigned char { none = 0, hard = 1, soft = 2 };

// Orthonormal single-level Haar. For each 2x2 block [[a,b],[c,d]]:
//   LL = (a+b+c+d)/2   LH = (a+b-c-d)/2   HL = (a-b+c-d)/2   HH = (a-b-c+d)/2
inline SubbandQuad haar_forward(const CoeffPlane& plane) {
    if (plane.empty() || plane.width() % 2 != 0 || plane.height() % 2 != 0)
        throw std::invalid_argument("haar_forward: plane dimensions must be even and non-zero");
    const std::size_t w = plane.width() / 2;
    const std::size_t h = plane.height() / 2;
    SubbandQuad q{CoeffPlane(w, h), CoeffPlane(w, h), CoeffPlane(w, h), CoeffPlane(w, h)};
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            const double a = plane(2 * r, 2 * c);
            const double b = plane(2 * r, 2 * c + 1);
            const double cc = plane(2 * r + 1, 2 * c);
            const double d = plane(2 * r + 1, 2 * c + 1);
            q.ll(r, c) = (a + b + cc + d) * 0.5;
            q.lh(r, c) = (a + b - cc - d) * 0.5;
            q.hl(r, c) = (a - b + cc - d) * 0.5;
            q.hh(r, c) = (a - b - cc + d) * 0.5;
        }
    }
    return q;
}

inline CoeffPlane haar_inverse(const SubbandQuad& q) {
    if (!q.ll.same_shape(q.lh) || !q.ll.same_shape(q.hl) || !q.ll.same_shape(q.hh))
        throw std::invalid_argument("haar_inverse: subband dimensions differ");
    const std::size_t w = q.ll.width();
    const std::size_t h = q.ll.height();
    CoeffPlane out(2 * w, 2 * h);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            const double ll = q.ll(r, c), lh = q.lh(r, c), hl = q.hl(r, c), hh = q.hh(r, c);
            out(2 * r, 2 * c) = (ll + lh + hl + hh) * 0.5;
            out(2 * r, 2 * c + 1) = (ll + lh - hl - hh) * 0.5;
            out(2 * r + 1, 2 * c) = (ll - lh + hl - hh) * 0.5;
            out(2 * r + 1, 2 * c + 1) = (ll - lh - hl + hh) * 0.5;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pyramid (recursive LL) decomposition

struct DetailBands {
    CoeffPlane lh, hl, hh;
    friend bool operator==(const DetailBands&, const DetailBands&) = default;
};

struct Pyramid {
    CoeffPlane approximation;         // LL at the coarsest level
    std::vector<DetailBands> details; // details[0] is the finest level
    friend bool operator==(const Pyramid&, const Pyramid&) = default;
};

inline Pyramid pyramid_decompose(const CoeffPlane& plane, std::size_t levels) {
    Pyramid p{plane, {}};
    for (std::size_t l = 0; l < levels; ++l) {
        SubbandQuad q = haar_forward(p.approximation);
        p.details.push_back({std::move(q.lh), std::move(q.hl), std::move(q.hh)});
        p.approximation = std::move(q.ll);
    }
    return p;
}

inline CoeffPlane pyramid_reconstruct(const Pyramid& p) {
    CoeffPlane cur = p.approximation;
    for (auto it = p.details.rbegin(); it != p.details.rend(); ++it)
        cur = haar_inverse(SubbandQuad{std::move(cur), it->lh, it->hl, it->hh});
    return cur;
}

// ---------------------------------------------------------------------------
// Uniform wavelet-packet tree
//
// Every subband is split again at each level. The result is a 2^depth x
// 2^depth arrangement in row-raster grid order; within each split the four
// children sit at (0,0)=LL, (0,1)=LH, (1,0)=HL, (1,1)=HH, so the top bits of a
// cell's row/column select the first-level band and the low bits the last.

namespace detail {

inline void place_quadrant(BlockStack& dst, BlockStack&& src, std::size_t row0, std::size_t col0) {
    for (std::size_t r = 0; r < src.grid_rows; ++r)
        for (std::size_t c = 0; c < src.grid_cols; ++c)
            dst.blocks[(row0 + r) * dst.grid_cols + col0 + c] = std::move(src.blocks[r * src.grid_cols + c]);
}

inline BlockStack extract_quadrant(const BlockStack& src, std::size_t row0, std::size_t col0, std::size_t side) {
    BlockStack out;
    out.grid_rows = out.grid_cols = side;
    out.blocks.reserve(side * side);
    for (std::size_t r = 0; r < side; ++r)
        for (std::size_t c = 0; c < side; ++c) out.blocks.push_back(src.blocks[(row0 + r) * src.grid_cols + col0 + c]);
    return out;
}

} // namespace detail

inline BlockStack packet_decompose(const CoeffPlane& plane, std::size_t depth);

// Continues a packet tree from an already computed first level, so callers
// can modify the first-level subbands (e.g. shrink them) before splitting on.
inline BlockStack packet_decompose(const SubbandQuad& first_level, std::size_t depth) {
    if (depth == 0) throw std::invalid_argument("packet_decompose: a SubbandQuad is already depth 1");
    const std::size_t half = std::size_t{1} << (depth - 1);
    BlockStack out;
    out.grid_rows = out.grid_cols = 2 * half;
    out.blocks.resize(out.grid_rows * out.grid_cols);
    detail::place_quadrant(out, packet_decompose(first_level.ll, depth - 1), 0, 0);
    detail::place_quadrant(out, packet_decompose(first_level.lh, depth - 1), 0, half);
    detail::place_quadrant(out, packet_decompose(first_level.hl, depth - 1), half, 0);
    detail::place_quadrant(out, packet_decompose(first_level.hh, depth - 1), half, half);
    return out;
}

inline BlockStack packet_decompose(const CoeffPlane& plane, std::size_t depth) {
    const std::size_t side = std::size_t{1} << depth;
    if (depth > 20 || plane.empty() || plane.width() % side != 0 || plane.height() % side != 0)
        throw std::invalid_argument("packet_decompose: 2^depth must divide both dimensions");
    if (depth == 0) return BlockStack{{plane}, 1, 1, ScanKind::raster};
    return packet_decompose(haar_forward(plane), depth);
}

inline CoeffPlane packet_reconstruct(const BlockStack& stack, std::size_t depth);

// Inverse of every split below the first: returns the four first-level subbands.
inline SubbandQuad packet_reconstruct_first_level(const BlockStack& stack, std::size_t depth) {
    const std::size_t side = std::size_t{1} << depth;
    if (depth == 0 || depth > 20 || stack.size() != side * side || stack.grid_rows != side || stack.grid_cols != side)
        throw std::invalid_argument("packet_reconstruct: stack must hold 4^depth blocks in a square grid");
    if (stack.scan != ScanKind::raster) throw std::invalid_argument("packet_reconstruct: stack must be in raster order");
    stack.validate();
    const std::size_t half = side / 2;
    SubbandQuad q;
    CoeffPlane* dst[4] = {&q.ll, &q.lh, &q.hl, &q.hh};
    const std::size_t origin[4][2] = {{0, 0}, {0, half}, {half, 0}, {half, half}};
    for (int k = 0; k < 4; ++k)
        *dst[k] = packet_reconstruct(detail::extract_quadrant(stack, origin[k][0], origin[k][1], half), depth - 1);
    return q;
}

inline CoeffPlane packet_reconstruct(const BlockStack& stack, std::size_t depth) {
    if (depth == 0) {
        if (stack.size() != 1) throw std::invalid_argument("packet_reconstruct: depth 0 needs exactly one block");
        return stack.blocks.front();
    }
    return haar_inverse(packet_reconstruct_first_level(stack, depth));
}

// ---------------------------------------------------------------------------
// Shrinkage

// Robust noise scale: median(|c|) / 0.6745. Even counts use the mean of the
// two central order statistics.
inline double mad_sigma(const CoeffPlane& coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("mad_sigma: empty plane");
    std::vector<double> mag(coeffs.size());
    std::transform(coeffs.values().begin(), coeffs.values().end(), mag.begin(), [](double v) { return std::abs(v); });
    const std::size_t n = mag.size();
    const auto mid = mag.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(mag.begin(), mid, mag.end());
    double median = *mid;
    if (n % 2 == 0) median = 0.5 * (median + *std::max_element(mag.begin(), mid));
    return median / 0.6745;
}

// VisuShrink threshold sigma * sqrt(2 ln n).
inline double universal_threshold(double sigma, std::size_t n) {
    if (n == 0) throw std::invalid_argument("universal_threshold: n must be positive");
    if (sigma < 0.0) throw std::invalid_argument("universal_threshold: sigma must be non-negative");
    return sigma * std::sqrt(2.0 * std::log(static_cast<double>(n)));
}

inline double shrink_value(double x, double lambda, ShrinkMode mode) {
    if (mode == ShrinkMode::none) return x;
    if (std::abs(x) <= lambda) return 0.0;
    if (mode == ShrinkMode::hard) return x;
    return std::copysign(std::abs(x) - lambda, x);
}

inline CoeffPlane shrink(const CoeffPlane& plane, double lambda, ShrinkMode mode) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("shrink: lambda must be non-negative");
    CoeffPlane out = plane;
    for (double& v : out.values()) v = shrink_value(v, lambda, mode);
    return out;
}

inline CoeffPlane shrink_universal(const CoeffPlane& plane, ShrinkMode mode) {
    if (mode == ShrinkMode::none || plane.empty()) return plane;
    return shrink(plane, universal_threshold(mad_sigma(plane), plane.size()), mode);
}

// LL passes through; each detail band is shrunk with a threshold derived from
// its own MAD estimate and coefficient count.
inline SubbandQuad denoise_quad(const SubbandQuad& quad, ShrinkMode mode) {
    return SubbandQuad{quad.ll, shrink_universal(quad.lh, mode), shrink_universal(quad.hl, mode),
                       shrink_universal(quad.hh, mode)};
}

} // namespace uic

#endif // UIC_WAVELET_HPP
