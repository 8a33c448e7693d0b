#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "test_support.hpp"

using namespace uic;

namespace {

BlockStack numbered_stack(std::size_t rows, std::size_t cols) {
    BlockStack s{{}, rows, cols, ScanKind::raster};
    for (std::size_t i = 0; i < rows * cols; ++i) s.blocks.emplace_back(1, 1, static_cast<double>(i));
    return s;
}

bool is_permutation_of_iota(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != i) return false;
    return true;
}

} // namespace

TEST(RasterIndex, SpotValues) {
    EXPECT_EQ(raster_index(0, 0, 4), 0u);
    EXPECT_EQ(raster_index(1, 2, 4), 6u);
    EXPECT_THROW(raster_index(0, 4, 4), std::out_of_range);
}

TEST(RasterIndex, FourByFourIsReadingOrder) {
    std::size_t expected = 0;
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(raster_index(r, c, 4), expected++);
}

TEST(MortonIndex, ZPatternWithinQuad) {
    EXPECT_EQ(morton_index(0, 0), 0u);
    EXPECT_EQ(morton_index(0, 1), 1u);
    EXPECT_EQ(morton_index(1, 0), 2u);
    EXPECT_EQ(morton_index(1, 1), 3u);
}

TEST(MortonIndex, SpotValueInFourByFour) { EXPECT_EQ(morton_index(2, 3), 13u); }

TEST(MortonIndex, MatchesRecursiveQuadrantEnumeration) {
    for (std::size_t side = 2; side <= 16; side *= 2) {
        const auto oracle = test::recursive_quadrant_order(side);
        for (std::size_t r = 0; r < side; ++r)
            for (std::size_t c = 0; c < side; ++c)
                EXPECT_EQ(morton_index(static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c)), oracle[r * side + c])
                    << side << " " << r << "," << c;
    }
}

TEST(MortonIndex, LargeCoordinates) {
    EXPECT_EQ(morton_index(0, 0xFFFFFFFFu), 0x5555555555555555ull);
    EXPECT_EQ(morton_index(0xFFFFFFFFu, 0), 0xAAAAAAAAAAAAAAAAull);
}

TEST(ScanOrder, RasterIsIdentity) {
    const auto order = scan_order(ScanKind::raster, 3, 5);
    std::vector<std::size_t> iota(15);
    std::iota(iota.begin(), iota.end(), 0);
    EXPECT_EQ(order, iota);
}

TEST(ScanOrder, BothScansAreBijections) {
    for (std::size_t side = 1; side <= 16; side *= 2) {
        EXPECT_TRUE(is_permutation_of_iota(scan_order(ScanKind::morton, side, side)));
        EXPECT_TRUE(is_permutation_of_iota(scan_order(ScanKind::raster, side, side)));
    }
}

TEST(ScanOrder, MortonNeedsSquarePowerOfTwoGrid) {
    EXPECT_THROW(scan_order(ScanKind::morton, 2, 4), std::invalid_argument);
    EXPECT_THROW(scan_order(ScanKind::morton, 3, 3), std::invalid_argument);
}

TEST(OrderStack, FourBlocksMortonMatchesRaster) {
    const BlockStack s = numbered_stack(2, 2);
    const BlockStack m = order_stack(s, ScanKind::morton);
    EXPECT_EQ(m.scan, ScanKind::morton);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(m.blocks[i](0, 0), static_cast<double>(i));
}

TEST(OrderStack, MortonOrderOfFourByFour) {
    const BlockStack m = order_stack(numbered_stack(4, 4), ScanKind::morton);
    const std::vector<double> expected{0, 1, 4, 5, 2, 3, 6, 7, 8, 9, 12, 13, 10, 11, 14, 15};
    for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(m.blocks[i](0, 0), expected[i]);
}

TEST(OrderStack, RoundTrip64Blocks) {
    const BlockStack s = numbered_stack(8, 8);
    for (auto kind : {ScanKind::raster, ScanKind::morton}) EXPECT_EQ(unorder_stack(order_stack(s, kind), kind), s);
}

TEST(OrderStack, RejectsWrongSourceOrder) {
    const BlockStack m = order_stack(numbered_stack(2, 2), ScanKind::morton);
    EXPECT_THROW(order_stack(m, ScanKind::raster), std::invalid_argument);
    EXPECT_THROW(unorder_stack(m, ScanKind::raster), std::invalid_argument);
}
