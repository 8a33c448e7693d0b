#ifndef UIC_QUANTIZER_HPP
#define UIC_QUANTIZER_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "plane.hpp"

namespace uic {

// Largest |q| the entropy coder's alphabet accepts.
inline constexpr std::int64_t kMaxSymbolMagnitude = 65535;

inline constexpr double kMinQuantStep = 1e-12;

struct QuantSpec {
    float step = 1.0f; // stored as binary32 in the container; this is the value both sides use

    friend bool operator==(const QuantSpec&, const QuantSpec&) = default;
};

// Midtread step covering [-max_abs, max_abs] with 2^bits - 1 levels, so every
// symbol fits a signed `bits`-bit code and max_abs itself maps to a level.
inline QuantSpec step_for_bits(double max_abs, unsigned bits) {
    if (bits < 2 || bits > 16) throw std::invalid_argument("coefficient bit budget must be in [2, 16]");
    const double levels = static_cast<double>((1u << (bits - 1)) - 1u);
    const double step = std::max(max_abs / levels, kMinQuantStep);
    return QuantSpec{static_cast<float>(step)};
}

// q = round(v / step), halves away from zero.
inline std::int32_t quantize_value(double v, const QuantSpec& spec) {
    if (!(spec.step > 0.0f)) throw std::invalid_argument("quantize: step must be positive");
    const double q = std::round(v / static_cast<double>(spec.step));
    if (!(std::abs(q) <= static_cast<double>(kMaxSymbolMagnitude)))
        throw std::range_error("quantize: symbol exceeds alphabet bound (step too small)");
    return static_cast<std::int32_t>(q);
}

inline double dequantize_value(std::int32_t q, const QuantSpec& spec) { return q * static_cast<double>(spec.step); }

inline std::vector<std::int32_t> quantize(const CoeffPlane& plane, const QuantSpec& spec) {
    std::vector<std::int32_t> out;
    out.reserve(plane.size());
    for (double v : plane.values()) out.push_back(quantize_value(v, spec));
    return out;
}

inline CoeffPlane dequantize(std::span<const std::int32_t> symbols, std::size_t width, std::size_t height,
                             const QuantSpec& spec) {
    if (symbols.size() != width * height) throw std::invalid_argument("dequantize: symbol count does not match plane");
    CoeffPlane plane(width, height);
    for (std::size_t i = 0; i < symbols.size(); ++i) plane.values()[i] = dequantize_value(symbols[i], spec);
    return plane;
}

} // namespace uic

#endif // UIC_QUANTIZER_HPP
