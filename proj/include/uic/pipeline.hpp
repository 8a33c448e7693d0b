#ifndef UIC_PIPELINE_HPP
#define UIC_PIPELINE_HPP

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "container.hpp"
#include "huffman.hpp"
#include "image.hpp"
#include "klt.hpp"
#include "quantizer.hpp"
#include "scan.hpp"
#include "wavelet.hpp"

namespace uic {

enum class Technique : std::uint8_t {
    haar = 1,
    haar_morton = 2,
    haar_raster = 3,
    morton_klt = 4,
    raster_klt = 5,
    haar_morton_klt = 6,
    haar_raster_klt = 7,
};

inline constexpr std::array<Technique, 7> kAllTechniques{
    Technique::haar,       Technique::haar_morton,     Technique::haar_raster,    Technique::morton_klt,
    Technique::raster_klt, Technique::haar_morton_klt, Technique::haar_raster_klt,
};

struct TechniqueTraits {
    bool uses_haar;
    std::optional<ScanKind> scan;
    bool uses_klt;
    std::string_view name;
};

constexpr TechniqueTraits traits(Technique t) {
    switch (t) {
    case Technique::haar: return {true, std::nullopt, false, "haar"};
    case Technique::haar_morton: return {true, ScanKind::morton, false, "haar+morton"};
    case Technique::haar_raster: return {true, ScanKind::raster, false, "haar+row-rafter"};
    case Technique::morton_klt: return {false, ScanKind::morton, true, "morton+klt"};
    case Technique::raster_klt: return {false, ScanKind::raster, true, "row-rafter+klt"};
    case Technique::haar_morton_klt: return {true, ScanKind::morton, true, "haar+morton+klt"};
    case Technique::haar_raster_klt: return {true, ScanKind::raster, true, "haar+row-rafter+klt"};
    }
    throw std::invalid_argument("unknown technique");
}

inline std::string technique_name(Technique t) { return std::string(traits(t).name); }

inline std::optional<Technique> parse_technique(std::string_view name) {
    for (Technique t : kAllTechniques)
        if (traits(t).name == name) return t;
    return std::nullopt;
}

struct CodecConfig {
    Technique technique = Technique::haar_morton_klt;
    std::size_t block = 64;   // sub-block side for techniques 2-7
    double target_cr = 4.0;
    ShrinkMode shrink = ShrinkMode::soft;
    std::size_t levels = 1;   // pyramid levels, technique 1 only
    unsigned bits = 8;        // coefficient bit budget of the quantizer
    std::optional<NoiseSpec> noise;
};

// Channels kept by KLT pruning: floor(n / target_cr), at least one.
inline std::size_t kept_channels(std::size_t n, double target_cr) {
    if (!(target_cr >= 1.0)) throw std::invalid_argument("target compression ratio must be >= 1");
    if (target_cr > static_cast<double>(n))
        throw std::invalid_argument("target compression ratio exceeds the number of sub-blocks");
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(n) / target_cr)));
}

// Packet depth whose subbands are block x block: the image must be a square
// power-of-two multiple of the block.
inline std::size_t packet_depth_for(std::size_t width, std::size_t height, std::size_t block) {
    if (block == 0 || width % block != 0 || height % block != 0)
        throw std::invalid_argument("block size must divide both image dimensions");
    const std::size_t per_side = width / block;
    if (per_side != height / block || !std::has_single_bit(per_side))
        throw std::invalid_argument("wavelet-packet techniques need a square power-of-two grid of blocks");
    return static_cast<std::size_t>(std::countr_zero(per_side));
}

namespace detail {

inline void validate(const CodecConfig& cfg, const Image& img) {
    if (!(cfg.target_cr >= 1.0) || !std::isfinite(cfg.target_cr))
        throw std::invalid_argument("target compression ratio must be >= 1");
    if (cfg.bits < 2 || cfg.bits > 16) throw std::invalid_argument("coefficient bit budget must be in [2, 16]");
    if (img.width() > 0xFFFFFFFFu || img.height() > 0xFFFFFFFFu) throw std::invalid_argument("image too large");
    if (cfg.technique == Technique::haar) {
        if (cfg.levels < 1 || cfg.levels > 20) throw std::invalid_argument("pyramid levels must be in [1, 20]");
        const std::size_t side = std::size_t{1} << cfg.levels;
        if (img.width() % side != 0 || img.height() % side != 0)
            throw std::invalid_argument("2^levels must divide both image dimensions");
    }
}

// First split shrunk with per-band universal thresholds, then every subband
// split again down to `depth`.
inline BlockStack shrunk_packet_stack(const CoeffPlane& plane, std::size_t depth, ShrinkMode shrink) {
    if (depth == 0) return packet_decompose(plane, 0);
    return packet_decompose(denoise_quad(haar_forward(plane), shrink), depth);
}

inline BlockStack klt_stack_from_plane(const CoeffPlane& plane, const CodecConfig& cfg) {
    const auto t = traits(cfg.technique);
    if (!t.uses_klt) throw std::invalid_argument("technique does not use the KLT");
    BlockStack stack = t.uses_haar
                           ? shrunk_packet_stack(plane, packet_depth_for(plane.width(), plane.height(), cfg.block),
                                                 cfg.shrink)
                           : tile(plane, cfg.block);
    return order_stack(stack, *t.scan);
}

// Coarse-to-fine band list: approximation, then LH/HL/HH from the coarsest
// level down to the finest.
inline std::vector<CoeffPlane> pyramid_bands(const Pyramid& p) {
    std::vector<CoeffPlane> bands{p.approximation};
    for (auto it = p.details.rbegin(); it != p.details.rend(); ++it) {
        bands.push_back(it->lh);
        bands.push_back(it->hl);
        bands.push_back(it->hh);
    }
    return bands;
}

struct PlaneShape {
    std::size_t width, height;
};

inline std::vector<PlaneShape> pyramid_shapes(std::size_t width, std::size_t height, std::size_t levels) {
    std::vector<PlaneShape> shapes{{width >> levels, height >> levels}};
    for (std::size_t l = levels; l >= 1; --l)
        for (int k = 0; k < 3; ++k) shapes.push_back({width >> l, height >> l});
    return shapes;
}

// Whole bands, coarse to fine, while the coefficient count stays within
// floor(N / target_cr). The approximation band is always kept.
inline std::size_t bands_within_budget(const std::vector<PlaneShape>& shapes, std::size_t pixels, double target_cr) {
    const auto budget = static_cast<std::size_t>(std::floor(static_cast<double>(pixels) / target_cr));
    std::size_t count = 1;
    std::size_t used = shapes.front().width * shapes.front().height;
    while (count < shapes.size() && used + shapes[count].width * shapes[count].height <= budget) {
        used += shapes[count].width * shapes[count].height;
        ++count;
    }
    return count;
}

inline KltModel transmitted_model(const KltModel& fitted, std::size_t kept, KltSideInfo& side) {
    const std::size_t n = fitted.n();
    side.n = static_cast<std::uint32_t>(n);
    side.kept = static_cast<std::uint32_t>(kept);
    KltModel m;
    m.kept = kept;
    m.eigenvalues = fitted.eigenvalues;
    m.basis = Matrix(n, kept);
    for (std::size_t k = 0; k < n; ++k) {
        side.mean.push_back(static_cast<float>(fitted.mean[k]));
        m.mean.push_back(side.mean.back());
    }
    for (std::size_t j = 0; j < kept; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            side.basis.push_back(static_cast<float>(fitted.basis(k, j)));
            m.basis(k, j) = side.basis.back();
        }
    return m;
}

inline KltModel received_model(const KltSideInfo& side) {
    KltModel m;
    m.kept = side.kept;
    m.mean.assign(side.mean.begin(), side.mean.end());
    m.basis = Matrix(side.n, side.kept);
    for (std::size_t j = 0; j < side.kept; ++j)
        for (std::size_t k = 0; k < side.n; ++k) m.basis(k, j) = side.basis[j * side.n + k];
    return m;
}

} // namespace detail

// The sub-block stack the KLT of techniques 4-7 is fitted on, in scan order,
// after any configured noise.
inline BlockStack klt_input_stack(const Image& img, const CodecConfig& cfg) {
    detail::validate(cfg, img);
    const Image noisy = cfg.noise ? add_salt_pepper(img, *cfg.noise) : img;
    return detail::klt_stack_from_plane(to_plane(noisy), cfg);
}

inline CompressedArtifact compress(const Image& input, const CodecConfig& cfg) {
    detail::validate(cfg, input);
    const auto t = traits(cfg.technique);
    const Image img = cfg.noise ? add_salt_pepper(input, *cfg.noise) : input;
    const CoeffPlane plane = to_plane(img);

    CompressedArtifact a;
    a.technique = static_cast<std::uint8_t>(cfg.technique);
    a.width = static_cast<std::uint32_t>(img.width());
    a.height = static_cast<std::uint32_t>(img.height());
    a.shrink = t.uses_haar ? static_cast<std::uint8_t>(cfg.shrink) : 0;
    a.scan = t.scan ? static_cast<std::uint8_t>(*t.scan) : 0;
    a.bits = static_cast<std::uint8_t>(cfg.bits);

    std::vector<CoeffPlane> planes;
    if (cfg.technique == Technique::haar) {
        a.depth = static_cast<std::uint8_t>(cfg.levels);
        SubbandQuad first = denoise_quad(haar_forward(plane), cfg.shrink);
        Pyramid p = pyramid_decompose(first.ll, cfg.levels - 1);
        p.details.insert(p.details.begin(), DetailBands{std::move(first.lh), std::move(first.hl), std::move(first.hh)});
        planes = detail::pyramid_bands(p);
        const auto shapes = detail::pyramid_shapes(img.width(), img.height(), cfg.levels);
        planes.resize(detail::bands_within_budget(shapes, img.size(), cfg.target_cr));
    } else if (!t.uses_klt) {
        a.block = static_cast<std::uint32_t>(cfg.block);
        const std::size_t depth = packet_depth_for(img.width(), img.height(), cfg.block);
        a.depth = static_cast<std::uint8_t>(depth);
        BlockStack stack = order_stack(detail::shrunk_packet_stack(plane, depth, cfg.shrink), *t.scan);
        const std::size_t n = stack.size();
        const std::size_t kept =
            std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(n) / cfg.target_cr)));
        planes.assign(stack.blocks.begin(), stack.blocks.begin() + static_cast<std::ptrdiff_t>(kept));
    } else {
        a.block = static_cast<std::uint32_t>(cfg.block);
        if (t.uses_haar) a.depth = static_cast<std::uint8_t>(packet_depth_for(img.width(), img.height(), cfg.block));
        const BlockStack stack = detail::klt_stack_from_plane(plane, cfg);
        const std::size_t kept = kept_channels(stack.size(), cfg.target_cr);
        KltSideInfo side;
        const KltModel model = detail::transmitted_model(fit(stack), kept, side);
        BlockStack channels = forward(stack, model);
        planes.assign(channels.blocks.begin(), channels.blocks.begin() + static_cast<std::ptrdiff_t>(kept));
        a.klt = std::move(side);
    }

    std::vector<std::int32_t> symbols;
    for (const auto& pl : planes) {
        const QuantSpec spec = step_for_bits(pl.max_abs(), cfg.bits);
        a.steps.push_back(spec);
        const auto q = quantize(pl, spec);
        symbols.insert(symbols.end(), q.begin(), q.end());
    }
    if (symbols.size() > 0xFFFFFFFFu) throw std::invalid_argument("image too large for the container");
    a.symbol_count = static_cast<std::uint32_t>(symbols.size());
    EncodedStream enc = entropy_encode(symbols);
    a.table = std::move(enc.table);
    a.payload_bits = enc.bit_count;
    a.payload = std::move(enc.bytes);
    return a;
}

inline Image decompress(const CompressedArtifact& a) {
    if (a.technique < 1 || a.technique > 7) throw FormatError("artifact: unknown technique");
    const auto technique = static_cast<Technique>(a.technique);
    const auto t = traits(technique);
    const std::size_t width = a.width, height = a.height;
    if (width == 0 || height == 0) throw FormatError("artifact: zero image dimension");
    if (a.scan != (t.scan ? static_cast<std::uint8_t>(*t.scan) : 0)) throw FormatError("artifact: scan does not match technique");
    if (a.steps.empty()) throw FormatError("artifact: no coefficient planes");

    // shapes of every plane the technique produces; the artifact carries a prefix
    std::vector<detail::PlaneShape> shapes;
    std::size_t depth = a.depth;
    try {
        if (technique == Technique::haar) {
            if (depth < 1 || depth > 20 || width % (std::size_t{1} << depth) || height % (std::size_t{1} << depth))
                throw FormatError("artifact: bad pyramid levels");
            shapes = detail::pyramid_shapes(width, height, depth);
        } else if (t.uses_haar) {
            if (depth != packet_depth_for(width, height, a.block)) throw FormatError("artifact: bad packet depth");
            shapes.assign(std::size_t{1} << (2 * depth), {a.block, a.block});
        } else {
            const BlockStack probe = tile(CoeffPlane(width, height), a.block);
            shapes.assign(probe.size(), {a.block, a.block});
        }
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("artifact: inconsistent geometry: ") + e.what());
    }
    if (a.steps.size() > shapes.size()) throw FormatError("artifact: too many coefficient planes");
    if (t.uses_klt && (!a.klt || a.klt->n != shapes.size() || a.klt->kept != a.steps.size()))
        throw FormatError("artifact: KLT side info does not match geometry");

    std::size_t expected = 0;
    for (std::size_t i = 0; i < a.steps.size(); ++i) expected += shapes[i].width * shapes[i].height;
    if (expected != a.symbol_count) throw FormatError("artifact: symbol count does not match geometry");

    const auto symbols = entropy_decode(a.payload, a.payload_bits, a.table, a.symbol_count);
    std::vector<CoeffPlane> planes;
    std::size_t offset = 0;
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        const auto [w, h] = shapes[i];
        if (i < a.steps.size()) {
            planes.push_back(dequantize(std::span(symbols).subspan(offset, w * h), w, h, a.steps[i]));
            offset += w * h;
        } else {
            planes.emplace_back(w, h);
        }
    }

    CoeffPlane recon;
    if (technique == Technique::haar) {
        Pyramid p{planes[0], std::vector<DetailBands>(depth)};
        for (std::size_t l = 0; l < depth; ++l) {
            const std::size_t base = 1 + 3 * (depth - 1 - l); // coarsest level first in `planes`
            p.details[l] = DetailBands{planes[base], planes[base + 1], planes[base + 2]};
        }
        recon = pyramid_reconstruct(p);
    } else {
        const std::size_t grid_cols = t.uses_haar ? (std::size_t{1} << depth) : width / a.block;
        BlockStack stack{std::move(planes), shapes.size() / grid_cols, grid_cols, *t.scan};
        if (t.uses_klt) stack = inverse(stack, detail::received_model(*a.klt));
        stack = unorder_stack(stack, *t.scan);
        recon = t.uses_haar ? packet_reconstruct(stack, depth) : untile(stack, width, height);
    }
    return to_image(recon);
}

inline double measured_cr(std::size_t raw_bytes, std::size_t compressed_bytes) {
    return static_cast<double>(raw_bytes) / static_cast<double>(compressed_bytes);
}

// Uncompressed size (one byte per pixel) over the serialized artifact size.
inline double measured_cr(const CompressedArtifact& artifact, const Image& img) {
    return measured_cr(img.width() * img.height(), serialize(artifact).size());
}

} // namespace uic

#endif // UIC_PIPELINE_HPP
