#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace uic;

namespace {

const Image& camera() {
    static const Image img = read_pgm(test::data_path("camera.pgm"));
    return img;
}

CodecConfig config(Technique t, double cr = 4.0, std::size_t block = 64) {
    CodecConfig cfg;
    cfg.technique = t;
    cfg.target_cr = cr;
    cfg.block = block;
    return cfg;
}

double round_trip_mse(const Image& img, const CodecConfig& cfg) { return mse(img, decompress(compress(img, cfg))); }

int max_pixel_error(const Image& a, const Image& b) {
    int m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(int(a.pixels()[i]) - int(b.pixels()[i])));
    return m;
}

} // namespace

TEST(TechniqueTable, NamesIdsAndFlags) {
    const char* names[] = {"haar", "haar+morton", "haar+row-rafter", "morton+klt",
                           "row-rafter+klt", "haar+morton+klt", "haar+row-rafter+klt"};
    for (std::size_t i = 0; i < kAllTechniques.size(); ++i) {
        const Technique t = kAllTechniques[i];
        EXPECT_EQ(static_cast<int>(t), static_cast<int>(i) + 1);
        EXPECT_EQ(technique_name(t), names[i]);
        EXPECT_EQ(parse_technique(names[i]), t);
    }
    EXPECT_FALSE(parse_technique("dct").has_value());
    EXPECT_FALSE(traits(Technique::haar).scan.has_value());
    EXPECT_TRUE(traits(Technique::haar_raster_klt).uses_haar);
    EXPECT_EQ(traits(Technique::morton_klt).scan, ScanKind::morton);
    EXPECT_FALSE(traits(Technique::raster_klt).uses_haar);
}

TEST(KeptChannels, FloorWithMinimumOne) {
    EXPECT_EQ(kept_channels(64, 4.0), 16u);
    EXPECT_EQ(kept_channels(64, 16.0), 4u);
    EXPECT_EQ(kept_channels(64, 5.0), 12u);
    EXPECT_EQ(kept_channels(64, 64.0), 1u);
    EXPECT_EQ(kept_channels(64, 1.0), 64u);
    EXPECT_THROW(kept_channels(64, 65.0), std::invalid_argument);
    EXPECT_THROW(kept_channels(64, 0.5), std::invalid_argument);
}

TEST(PacketDepth, FromImageAndBlock) {
    EXPECT_EQ(packet_depth_for(512, 512, 64), 3u);
    EXPECT_EQ(packet_depth_for(512, 512, 256), 1u);
    EXPECT_EQ(packet_depth_for(512, 512, 512), 0u);
    EXPECT_THROW(packet_depth_for(512, 512, 96), std::invalid_argument);
    EXPECT_THROW(packet_depth_for(512, 256, 64), std::invalid_argument);
    EXPECT_THROW(packet_depth_for(384, 384, 128), std::invalid_argument);
}

TEST(Compress, TechniqueSixGeometry) {
    const CompressedArtifact a = compress(camera(), config(Technique::haar_morton_klt));
    EXPECT_EQ(a.depth, 3);
    ASSERT_TRUE(a.klt.has_value());
    EXPECT_EQ(a.klt->n, 64u);
    EXPECT_EQ(a.klt->kept, 16u);
    EXPECT_EQ(a.steps.size(), 16u);
    EXPECT_EQ(a.symbol_count, 16u * 64 * 64);
    EXPECT_EQ(a.scan, static_cast<std::uint8_t>(ScanKind::morton));
}

TEST(Compress, TechniqueOneLevelOneIsShrunkQuad) {
    // With every band kept and a fine quantizer, the output is the inverse of
    // the soft-shrunk first-level quad.
    CodecConfig cfg = config(Technique::haar, 1.0);
    cfg.bits = 16;
    const CompressedArtifact a = compress(camera(), cfg);
    EXPECT_EQ(a.depth, 1);
    EXPECT_EQ(a.steps.size(), 4u);
    EXPECT_EQ(a.shrink, static_cast<std::uint8_t>(ShrinkMode::soft));
    const Image expected = to_image(haar_inverse(denoise_quad(haar_forward(to_plane(camera())), ShrinkMode::soft)));
    EXPECT_LE(max_pixel_error(decompress(a), expected), 1);
    EXPECT_GT(mse(expected, camera()), 0.0);
}

TEST(Compress, TechniqueOneKeepsBandsWithinBudget) {
    EXPECT_EQ(compress(camera(), config(Technique::haar, 4.0)).steps.size(), 1u);
    CodecConfig two = config(Technique::haar, 16.0);
    two.levels = 2;
    EXPECT_EQ(compress(camera(), two).steps.size(), 1u);
    CodecConfig quarter = config(Technique::haar, 4.0);
    quarter.levels = 2;
    // LL2 plus the three level-2 details is exactly a quarter of the pixels
    EXPECT_EQ(compress(camera(), quarter).steps.size(), 4u);
    CodecConfig half = config(Technique::haar, 2.0);
    half.levels = 2;
    EXPECT_EQ(compress(camera(), half).steps.size(), 5u);
}

TEST(Compress, HaarScanKeepsLeadingPackets) {
    const CompressedArtifact a = compress(camera(), config(Technique::haar_morton, 4.0, 64));
    EXPECT_EQ(a.steps.size(), 16u);
    EXPECT_FALSE(a.klt.has_value());
    const CompressedArtifact b = compress(camera(), config(Technique::haar_raster, 4.0, 256));
    EXPECT_EQ(b.steps.size(), 1u);
}

TEST(Compress, Deterministic) {
    for (Technique t : kAllTechniques) {
        CodecConfig cfg = config(t, 4.0, traits(t).uses_klt ? 64 : 256);
        cfg.noise = NoiseSpec{NoiseKind::salt_and_pepper, 0.02, 9};
        const auto a = serialize(compress(camera(), cfg));
        const auto b = serialize(compress(camera(), cfg));
        EXPECT_EQ(a, b) << technique_name(t);
        EXPECT_EQ(decompress(deserialize(a)), decompress(deserialize(b))) << technique_name(t);
    }
}

TEST(Compress, NoiseChangesTheInput) {
    CodecConfig cfg = config(Technique::haar_morton_klt);
    const auto clean = serialize(compress(camera(), cfg));
    cfg.noise = NoiseSpec{NoiseKind::salt_and_pepper, 0.02, 1};
    EXPECT_NE(serialize(compress(camera(), cfg)), clean);
}

TEST(Compress, ScanChoiceIsTrivialWithoutNoise) {
    EXPECT_NEAR(round_trip_mse(camera(), config(Technique::morton_klt)), round_trip_mse(camera(), config(Technique::raster_klt)),
                1e-9);
    EXPECT_NEAR(round_trip_mse(camera(), config(Technique::haar_morton_klt)),
                round_trip_mse(camera(), config(Technique::haar_raster_klt)), 1e-9);
}

TEST(Compress, FullRetentionSixteenBitsIsNearLossless) {
    CodecConfig cfg = config(Technique::haar_morton_klt, 1.0);
    cfg.shrink = ShrinkMode::none;
    cfg.bits = 16;
    EXPECT_LE(max_pixel_error(decompress(compress(camera(), cfg)), camera()), 1);
}

TEST(Compress, ConstantImageIsExactForEveryTechnique) {
    for (std::uint8_t gray : {std::uint8_t{0}, std::uint8_t{77}, std::uint8_t{200}, std::uint8_t{255}}) {
        const Image img(64, 64, gray);
        for (Technique t : kAllTechniques) {
            const CodecConfig cfg = config(t, 4.0, traits(t).uses_klt ? 8 : 16);
            EXPECT_EQ(decompress(compress(img, cfg)), img) << technique_name(t) << " gray " << int(gray);
        }
    }
}

TEST(Compress, QualityImprovesWithLowerTarget) {
    for (Technique t : {Technique::haar_morton_klt, Technique::raster_klt}) {
        const double tight = round_trip_mse(camera(), config(t, 16.0));
        const double loose = round_trip_mse(camera(), config(t, 2.0));
        EXPECT_LT(loose, tight) << technique_name(t);
    }
}

TEST(Compress, RejectsInvalidConfigs) {
    EXPECT_THROW(compress(camera(), config(Technique::haar_morton_klt, 0.5)), std::invalid_argument);
    EXPECT_THROW(compress(camera(), config(Technique::haar_morton_klt, 65.0)), std::invalid_argument);
    EXPECT_THROW(compress(camera(), config(Technique::raster_klt, 4.0, 96)), std::invalid_argument);
    EXPECT_THROW(compress(Image(96, 96), config(Technique::haar_morton_klt, 4.0, 32)), std::invalid_argument);
    CodecConfig bits = config(Technique::haar);
    bits.bits = 1;
    EXPECT_THROW(compress(camera(), bits), std::invalid_argument);
    CodecConfig levels = config(Technique::haar);
    levels.levels = 0;
    EXPECT_THROW(compress(camera(), levels), std::invalid_argument);
    CodecConfig deep = config(Technique::haar);
    deep.levels = 2;
    EXPECT_THROW(compress(Image(6, 6), deep), std::invalid_argument);
}

TEST(Compress, RasterTilingAcceptsRectangularGrids) {
    const Image img = test::synthetic_image(96, 48);
    const CompressedArtifact a = compress(img, config(Technique::raster_klt, 4.0, 16));
    EXPECT_EQ(a.klt->n, 18u);
    EXPECT_EQ(decompress(a).width(), 96u);
    EXPECT_THROW(compress(img, config(Technique::morton_klt, 4.0, 16)), std::invalid_argument);
}

TEST(Decompress, RejectsInconsistentArtifacts) {
    const CompressedArtifact good = compress(camera(), config(Technique::haar_morton_klt));
    CompressedArtifact a = good;
    a.symbol_count += 1;
    EXPECT_THROW(decompress(a), FormatError);
    a = good;
    a.block = 48;
    EXPECT_THROW(decompress(a), FormatError);
    a = good;
    a.scan = static_cast<std::uint8_t>(ScanKind::raster) + 5;
    EXPECT_THROW(decompress(a), FormatError);
    a = good;
    a.technique = 9;
    EXPECT_THROW(decompress(a), FormatError);
    a = good;
    a.klt->kept = 15;
    EXPECT_THROW(decompress(a), FormatError);
}

TEST(MeasuredCr, Arithmetic) {
    EXPECT_DOUBLE_EQ(measured_cr(10'000'000, 2'000'000), 5.0);
    EXPECT_LT(measured_cr(100, 250), 1.0);
}

TEST(MeasuredCr, TechniqueSixMeetsNominalTarget) {
    const CompressedArtifact a = compress(camera(), config(Technique::haar_morton_klt));
    const double cr = measured_cr(a, camera());
    EXPECT_GE(cr, 3.5);
    EXPECT_DOUBLE_EQ(cr, 262144.0 / static_cast<double>(serialize(a).size()));
}

TEST(MeasuredCr, OneBytePerValueAccountingGivesNominalRatio) {
    // 16 kept 64x64 channels, 16 eigenvector columns of 64 entries and a
    // 64-entry mean, one byte each: the 4:1 target lands at 3.9347.
    const double bytes = 16.0 * 64 * 64 + 16.0 * 64 + 64;
    EXPECT_NEAR(262144.0 / bytes, 3.9347, 5e-5);
    const double bytes16 = 4.0 * 64 * 64 + 4.0 * 64 + 64;
    EXPECT_NEAR(262144.0 / bytes16, 15.6935, 5e-5);
}

TEST(KltInputStack, MatchesTechniqueGeometry) {
    const BlockStack tiles = klt_input_stack(camera(), config(Technique::morton_klt));
    const BlockStack packets = klt_input_stack(camera(), config(Technique::haar_raster_klt));
    EXPECT_EQ(tiles.size(), 64u);
    EXPECT_EQ(tiles.scan, ScanKind::morton);
    EXPECT_EQ(packets.size(), 64u);
    EXPECT_EQ(packets.scan, ScanKind::raster);
    EXPECT_THROW(klt_input_stack(camera(), config(Technique::haar)), std::invalid_argument);
}
