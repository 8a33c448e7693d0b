#ifndef UIC_SCAN_HPP
#define UIC_SCAN_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "plane.hpp"

namespace uic {

inline std::size_t raster_index(std::size_t row, std::size_t col, std::size_t grid_cols) {
    if (col >= grid_cols) throw std::out_of_range("raster_index: column outside grid");
    return row * grid_cols + col;
}

namespace detail {

// Spreads the low 32 bits of x to the even bit positions.
constexpr std::uint64_t spread_bits(std::uint64_t x) noexcept {
    x &= 0xFFFFFFFFull;
    x = (x | (x << 16)) & 0x0000FFFF0000FFFFull;
    x = (x | (x << 8)) & 0x00FF00FF00FF00FFull;
    x = (x | (x << 4)) & 0x0F0F0F0F0F0F0F0Full;
    x = (x | (x << 2)) & 0x3333333333333333ull;
    x = (x | (x << 1)) & 0x5555555555555555ull;
    return x;
}

} // namespace detail

// Z-order: column bits on even positions, row bits on odd positions, which
// visits each quad NW, NE, SW, SE.
constexpr std::uint64_t morton_index(std::uint32_t row, std::uint32_t col) noexcept {
    return detail::spread_bits(col) | (detail::spread_bits(row) << 1);
}

// order[i] = raster position of the block visited i-th by the scan.
inline std::vector<std::size_t> scan_order(ScanKind kind, std::size_t grid_rows, std::size_t grid_cols) {
    const std::size_t n = grid_rows * grid_cols;
    std::vector<std::size_t> order(n);
    if (kind == ScanKind::raster) {
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        return order;
    }
    if (grid_rows != grid_cols || !std::has_single_bit(grid_rows) || grid_rows > (std::size_t{1} << 31))
        throw std::invalid_argument("morton scan needs a square power-of-two grid");
    for (std::size_t r = 0; r < grid_rows; ++r)
        for (std::size_t c = 0; c < grid_cols; ++c)
            order[morton_index(static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c))] =
                raster_index(r, c, grid_cols);
    return order;
}

inline BlockStack order_stack(const BlockStack& stack, ScanKind kind) {
    stack.validate();
    if (stack.scan != ScanKind::raster) throw std::invalid_argument("order_stack: stack is not in raster order");
    const auto order = scan_order(kind, stack.grid_rows, stack.grid_cols);
    BlockStack out{{}, stack.grid_rows, stack.grid_cols, kind};
    out.blocks.reserve(order.size());
    for (std::size_t pos : order) out.blocks.push_back(stack.blocks[pos]);
    return out;
}

inline BlockStack unorder_stack(const BlockStack& stack, ScanKind kind) {
    stack.validate();
    if (stack.scan != kind) throw std::invalid_argument("unorder_stack: stack is not in the requested scan order");
    const auto order = scan_order(kind, stack.grid_rows, stack.grid_cols);
    BlockStack out{std::vector<CoeffPlane>(order.size()), stack.grid_rows, stack.grid_cols, ScanKind::raster};
    for (std::size_t i = 0; i < order.size(); ++i) out.blocks[order[i]] = stack.blocks[i];
    return out;
}

} // namespace uic

#endif // UIC_SCAN_HPP
