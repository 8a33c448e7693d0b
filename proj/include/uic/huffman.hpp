#ifndef UIC_HUFFMAN_HPP
#define UIC_HUFFMAN_HPP

#include <algorithm>
#include <cstdint>
#include <queue>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "error.hpp"

namespace uic {

inline constexpr unsigned kMaxCodeLength = 32;

// MSB-first bit packing.
class BitWriter {
public:
    void put(std::uint32_t code, unsigned length) {
        for (unsigned i = length; i-- > 0;) put_bit((code >> i) & 1u);
    }

    void put_bit(unsigned bit) {
        if (bit_count_ % 8 == 0) bytes_.push_back(0);
        if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bit_count_ % 8));
        ++bit_count_;
    }

    std::uint64_t bit_count() const noexcept { return bit_count_; }
    std::vector<std::uint8_t> take() && { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
    std::uint64_t bit_count_ = 0;
};

class BitReader {
public:
    BitReader(std::span<const std::uint8_t> bytes, std::uint64_t bit_count) : bytes_(bytes), bit_count_(bit_count) {
        if (bit_count > bytes.size() * std::uint64_t{8}) throw FormatError("bit stream shorter than its bit count");
    }

    unsigned get_bit() {
        if (pos_ >= bit_count_) throw FormatError("bit stream underrun");
        const unsigned bit = (bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1u;
        ++pos_;
        return bit;
    }

    std::uint64_t position() const noexcept { return pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::uint64_t bit_count_;
    std::uint64_t pos_ = 0;
};

// Code lengths per symbol, sorted by symbol. Canonical codes are assigned in
// (length, symbol) order, so the lengths alone define the code.
struct CodeTable {
    std::vector<std::pair<std::int32_t, std::uint8_t>> lengths;

    friend bool operator==(const CodeTable&, const CodeTable&) = default;
};

struct EncodedStream {
    CodeTable table;
    std::vector<std::uint8_t> bytes;
    std::uint64_t bit_count = 0;
};

namespace detail {

// Plain Huffman code lengths; ties in weight resolve toward the lower node id,
// and leaves get ids in ascending symbol order, so the result is deterministic.
inline std::vector<unsigned> huffman_lengths(const std::vector<std::uint64_t>& weights) {
    const std::size_t leaves = weights.size();
    if (leaves == 1) return {1};
    struct Node {
        std::uint64_t weight;
        std::size_t id;
        bool operator>(const Node& o) const { return weight != o.weight ? weight > o.weight : id > o.id; }
    };
    std::priority_queue<Node, std::vector<Node>, std::greater<>> heap;
    std::vector<std::size_t> parent(2 * leaves - 1, 0);
    for (std::size_t i = 0; i < leaves; ++i) heap.push({weights[i], i});
    std::size_t next = leaves;
    while (heap.size() > 1) {
        const Node a = heap.top();
        heap.pop();
        const Node b = heap.top();
        heap.pop();
        parent[a.id] = parent[b.id] = next;
        heap.push({a.weight + b.weight, next++});
    }
    const std::size_t root = next - 1;
    std::vector<unsigned> depth(2 * leaves - 1, 0);
    for (std::size_t id = root; id-- > 0;) depth[id] = depth[parent[id]] + 1;
    return {depth.begin(), depth.begin() + static_cast<std::ptrdiff_t>(leaves)};
}

struct CanonicalCode {
    std::vector<std::int32_t> symbols_by_code; // (length, symbol) order
    std::vector<std::uint32_t> count_per_length; // index = length

    explicit CanonicalCode(const CodeTable& table) : count_per_length(kMaxCodeLength + 1, 0) {
        std::vector<std::pair<std::uint8_t, std::int32_t>> order;
        order.reserve(table.lengths.size());
        std::uint64_t kraft = 0; // in units of 2^-32
        for (std::size_t i = 0; i < table.lengths.size(); ++i) {
            const auto [symbol, length] = table.lengths[i];
            if (length < 1 || length > kMaxCodeLength) throw FormatError("code table: length out of range");
            if (i > 0 && table.lengths[i - 1].first >= symbol) throw FormatError("code table: symbols not ascending");
            kraft += std::uint64_t{1} << (kMaxCodeLength - length);
            ++count_per_length[length];
            order.emplace_back(length, symbol);
        }
        if (kraft > (std::uint64_t{1} << kMaxCodeLength)) throw FormatError("code table: lengths violate Kraft inequality");
        std::sort(order.begin(), order.end());
        for (const auto& [length, symbol] : order) symbols_by_code.push_back(symbol);
    }
};

} // namespace detail

// Canonical Huffman over integer symbols. Code lengths are capped at 32 by
// halving the weights (never below 1) until the tree fits.
inline CodeTable build_code_table(std::span<const std::int32_t> symbols) {
    std::vector<std::int32_t> sorted(symbols.begin(), symbols.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::int32_t> distinct;
    std::vector<std::uint64_t> weights;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        distinct.push_back(sorted[i]);
        weights.push_back(j - i);
        i = j;
    }
    CodeTable table;
    if (distinct.empty()) return table;

    std::vector<unsigned> lengths = detail::huffman_lengths(weights);
    while (*std::max_element(lengths.begin(), lengths.end()) > kMaxCodeLength) {
        for (auto& w : weights) w = std::max<std::uint64_t>(1, w / 2);
        lengths = detail::huffman_lengths(weights);
    }
    for (std::size_t i = 0; i < distinct.size(); ++i)
        table.lengths.emplace_back(distinct[i], static_cast<std::uint8_t>(lengths[i]));
    return table;
}

inline EncodedStream entropy_encode(std::span<const std::int32_t> symbols) {
    EncodedStream out;
    out.table = build_code_table(symbols);
    if (symbols.empty()) return out;

    const detail::CanonicalCode canon(out.table);
    // code per symbol, looked up by binary search over the sorted table
    std::vector<std::uint32_t> code_of(out.table.lengths.size());
    {
        std::uint32_t code = 0;
        std::size_t idx = 0;
        std::vector<std::uint32_t> by_code(canon.symbols_by_code.size());
        for (unsigned len = 1; len <= kMaxCodeLength; ++len) {
            for (std::uint32_t k = 0; k < canon.count_per_length[len]; ++k) by_code[idx++] = code++;
            code <<= 1;
        }
        for (std::size_t i = 0; i < canon.symbols_by_code.size(); ++i) {
            const auto it = std::lower_bound(out.table.lengths.begin(), out.table.lengths.end(),
                                             canon.symbols_by_code[i],
                                             [](const auto& entry, std::int32_t s) { return entry.first < s; });
            code_of[static_cast<std::size_t>(it - out.table.lengths.begin())] = by_code[i];
        }
    }

    BitWriter writer;
    for (std::int32_t s : symbols) {
        const auto it = std::lower_bound(out.table.lengths.begin(), out.table.lengths.end(), s,
                                         [](const auto& entry, std::int32_t v) { return entry.first < v; });
        const auto i = static_cast<std::size_t>(it - out.table.lengths.begin());
        writer.put(code_of[i], it->second);
    }
    out.bit_count = writer.bit_count();
    out.bytes = std::move(writer).take();
    return out;
}

inline std::vector<std::int32_t> entropy_decode(std::span<const std::uint8_t> bytes, std::uint64_t bit_count,
                                                const CodeTable& table, std::size_t count) {
    std::vector<std::int32_t> out;
    if (count == 0) return out;
    if (table.lengths.empty()) throw FormatError("entropy_decode: empty code table for non-empty stream");
    const detail::CanonicalCode canon(table);
    BitReader reader(bytes, bit_count);
    out.reserve(count);
    while (out.size() < count) {
        std::uint64_t code = 0, first = 0, index = 0;
        bool found = false;
        for (unsigned len = 1; len <= kMaxCodeLength; ++len) {
            code |= reader.get_bit();
            const std::uint64_t n = canon.count_per_length[len];
            if (code - first < n) {
                out.push_back(canon.symbols_by_code[index + (code - first)]);
                found = true;
                break;
            }
            index += n;
            first = (first + n) << 1;
            code <<= 1;
        }
        if (!found) throw FormatError("entropy_decode: invalid code in bit stream");
    }
    return out;
}

} // namespace uic

#endif // UIC_HUFFMAN_HPP
