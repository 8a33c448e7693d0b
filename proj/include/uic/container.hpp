#ifndef UIC_CONTAINER_HPP
#define UIC_CONTAINER_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <zlib.h>

#include "error.hpp"
#include "huffman.hpp"
#include "quantizer.hpp"

namespace uic {

// .uic layout, all integers little-endian, floats IEEE-754 binary32:
//
//   "UIC1" u8 version
//   u8 technique   u32 width   u32 height   u32 block
//   u8 depth       u8 shrink   u8 scan      u8 bits
//   u32 plane_count, then plane_count x f32 quantizer step
//   if the technique uses the KLT:
//     u32 n   u32 kept   n x f32 mean   kept x (n x f32) eigenvector columns
//   u32 symbol_count
//   i32 min_symbol  u32 symbol_range  symbol_range x u8 code length (0 = unused)
//   u64 payload_bits  ceil(payload_bits / 8) payload bytes
//   u32 CRC-32 of everything above
inline constexpr std::array<std::uint8_t, 4> kMagic{'U', 'I', 'C', '1'};
inline constexpr std::uint8_t kFormatVersion = 1;

struct KltSideInfo {
    std::uint32_t n = 0;
    std::uint32_t kept = 0;
    std::vector<float> mean;  // n
    std::vector<float> basis; // kept columns of n entries each

    friend bool operator==(const KltSideInfo&, const KltSideInfo&) = default;
};

struct CompressedArtifact {
    std::uint8_t technique = 0;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint32_t block = 0;
    std::uint8_t depth = 0; // packet depth, or pyramid levels for technique 1
    std::uint8_t shrink = 0;
    std::uint8_t scan = 0; // 0 none, 1 row-raster, 2 morton
    std::uint8_t bits = 0;
    std::vector<QuantSpec> steps;
    std::optional<KltSideInfo> klt;
    std::uint32_t symbol_count = 0;
    CodeTable table;
    std::uint64_t payload_bits = 0;
    std::vector<std::uint8_t> payload;

    friend bool operator==(const CompressedArtifact&, const CompressedArtifact&) = default;
};

inline bool technique_uses_klt(std::uint8_t technique) { return technique >= 4 && technique <= 7; }

// Byte counts of the serialized regions; they sum to the serialized size.
struct SizeBreakdown {
    std::size_t header = 0;    // fixed fields, quantizer steps, symbol count, checksum
    std::size_t side_info = 0; // KLT mean and eigenvector columns
    std::size_t table = 0;     // code-length table
    std::size_t payload = 0;   // bit count field and entropy-coded bits

    std::size_t total() const noexcept { return header + side_info + table + payload; }
};

namespace detail {

class ByteWriter {
public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void raw(std::span<const std::uint8_t> b) { bytes_.insert(bytes_.end(), b.begin(), b.end()); }

    std::vector<std::uint8_t>& bytes() noexcept { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() { return take(1)[0]; }
    std::uint32_t u32() {
        auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t{b[i]} << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        auto b = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    float f32() { return std::bit_cast<float>(u32()); }

    std::span<const std::uint8_t> take(std::size_t n) {
        if (bytes_.size() - pos_ < n) throw FormatError("container truncated");
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

inline std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    crc = ::crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
    return static_cast<std::uint32_t>(crc);
}

inline void write_table(ByteWriter& w, const CodeTable& table) {
    if (table.lengths.empty()) {
        w.i32(0);
        w.u32(0);
        return;
    }
    const std::int64_t lo = table.lengths.front().first;
    const std::int64_t hi = table.lengths.back().first;
    w.i32(static_cast<std::int32_t>(lo));
    w.u32(static_cast<std::uint32_t>(hi - lo + 1));
    std::vector<std::uint8_t> dense(static_cast<std::size_t>(hi - lo + 1), 0);
    for (const auto& [symbol, length] : table.lengths) dense[static_cast<std::size_t>(symbol - lo)] = length;
    w.raw(dense);
}

inline CodeTable read_table(ByteReader& r) {
    const std::int64_t lo = r.i32();
    const std::uint32_t range = r.u32();
    if (range > 2 * kMaxSymbolMagnitude + 1 || lo + std::int64_t{range} - 1 > kMaxSymbolMagnitude ||
        lo < -kMaxSymbolMagnitude)
        throw FormatError("container: code table range out of bounds");
    const auto dense = r.take(range);
    CodeTable table;
    for (std::uint32_t i = 0; i < range; ++i)
        if (dense[i] != 0) table.lengths.emplace_back(static_cast<std::int32_t>(lo + i), dense[i]);
    return table;
}

} // namespace detail

inline std::vector<std::uint8_t> serialize(const CompressedArtifact& a) {
    detail::ByteWriter w;
    w.raw(kMagic);
    w.u8(kFormatVersion);
    w.u8(a.technique);
    w.u32(a.width);
    w.u32(a.height);
    w.u32(a.block);
    w.u8(a.depth);
    w.u8(a.shrink);
    w.u8(a.scan);
    w.u8(a.bits);
    w.u32(static_cast<std::uint32_t>(a.steps.size()));
    for (const auto& s : a.steps) w.f32(s.step);
    if (technique_uses_klt(a.technique) != a.klt.has_value())
        throw std::invalid_argument("serialize: KLT side info must be present iff the technique uses the KLT");
    if (a.klt) {
        const auto& k = *a.klt;
        if (k.mean.size() != k.n || k.basis.size() != std::size_t{k.n} * k.kept)
            throw std::invalid_argument("serialize: KLT side info sizes inconsistent");
        w.u32(k.n);
        w.u32(k.kept);
        for (float v : k.mean) w.f32(v);
        for (float v : k.basis) w.f32(v);
    }
    w.u32(a.symbol_count);
    detail::write_table(w, a.table);
    if (a.payload.size() != (a.payload_bits + 7) / 8)
        throw std::invalid_argument("serialize: payload size does not match bit count");
    w.u64(a.payload_bits);
    w.raw(a.payload);
    w.u32(detail::crc32_of(w.bytes()));
    return std::move(w.bytes());
}

inline CompressedArtifact deserialize(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
        throw FormatError("container: bad magic");
    if (bytes.size() < 9) throw FormatError("container truncated");
    if (bytes[4] != kFormatVersion) throw FormatError("container: unsupported version " + std::to_string(bytes[4]));
    const auto body = bytes.first(bytes.size() - 4);
    detail::ByteReader tail(bytes.last(4));
    if (tail.u32() != detail::crc32_of(body)) throw FormatError("container: checksum mismatch");

    detail::ByteReader r(body);
    r.take(5);
    CompressedArtifact a;
    a.technique = r.u8();
    if (a.technique < 1 || a.technique > 7) throw FormatError("container: unknown technique id");
    a.width = r.u32();
    a.height = r.u32();
    a.block = r.u32();
    a.depth = r.u8();
    a.shrink = r.u8();
    a.scan = r.u8();
    a.bits = r.u8();
    const std::uint32_t planes = r.u32();
    if (planes > r.remaining() / 4) throw FormatError("container truncated");
    for (std::uint32_t i = 0; i < planes; ++i) a.steps.push_back(QuantSpec{r.f32()});
    if (technique_uses_klt(a.technique)) {
        KltSideInfo k;
        k.n = r.u32();
        k.kept = r.u32();
        if (k.kept > k.n || std::uint64_t{k.n} * (std::uint64_t{k.kept} + 1) > r.remaining() / 4)
            throw FormatError("container: KLT side info out of bounds");
        for (std::uint32_t i = 0; i < k.n; ++i) k.mean.push_back(r.f32());
        for (std::uint64_t i = 0; i < std::uint64_t{k.n} * k.kept; ++i) k.basis.push_back(r.f32());
        a.klt = std::move(k);
    }
    a.symbol_count = r.u32();
    a.table = detail::read_table(r);
    a.payload_bits = r.u64();
    const std::uint64_t payload_bytes = (a.payload_bits + 7) / 8;
    if (payload_bytes != r.remaining()) throw FormatError("container: payload length mismatch");
    const auto p = r.take(static_cast<std::size_t>(payload_bytes));
    a.payload.assign(p.begin(), p.end());
    return a;
}

inline SizeBreakdown size_breakdown(const CompressedArtifact& a) {
    SizeBreakdown s;
    s.header = 4 + 1 + 1 + 12 + 4 + 4 + 4 * a.steps.size() + 4 + 4;
    if (a.klt) s.side_info = 8 + 4 * (a.klt->mean.size() + a.klt->basis.size());
    s.table = 8;
    if (!a.table.lengths.empty())
        s.table += static_cast<std::size_t>(std::int64_t{a.table.lengths.back().first} - a.table.lengths.front().first + 1);
    s.payload = 8 + a.payload.size();
    return s;
}

} // namespace uic

#endif // UIC_CONTAINER_HPP
