#ifndef UIC_METRICS_HPP
#define UIC_METRICS_HPP

#include <cmath>
#include <cstdio>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "image.hpp"
#include "klt.hpp"

namespace uic {

inline constexpr double kPeakValue = 255.0;

inline double mse(const Image& a, const Image& b) {
    if (a.width() != b.width() || a.height() != b.height()) throw std::invalid_argument("mse: image dimensions differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a.pixels()[i]) - static_cast<double>(b.pixels()[i]);
        sum += d * d;
    }
    return sum / static_cast<double>(a.size());
}

// 10 log10(255^2 / mse); +infinity for identical images.
inline double psnr(double mse_value) {
    if (!(mse_value >= 0.0)) throw std::invalid_argument("psnr: mse must be non-negative");
    if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(kPeakValue * kPeakValue / mse_value);
}

struct MetricsRow {
    std::string technique;
    double cr = 0.0;
    double mse = 0.0;
    double psnr = 0.0;
};

struct Report {
    std::string table;
    std::string csv;
};

namespace detail {

inline std::string fixed4(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

inline std::string pad(std::string s, std::size_t width, bool left) {
    if (s.size() >= width) return s;
    return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

} // namespace detail

inline Report build_report(std::span<const MetricsRow> rows) {
    std::size_t name_width = 9; // "Technique"
    for (const auto& r : rows) name_width = std::max(name_width, r.technique.size());

    Report out;
    out.csv = "technique,cr,mse,psnr\n";
    out.table = detail::pad("Technique", name_width, true) + "  " + detail::pad("CR", 10, false) + "  " +
                detail::pad("MSE", 10, false) + "  " + detail::pad("PSNR", 10, false) + "\n";
    for (const auto& r : rows) {
        const std::string cr = detail::fixed4(r.cr), m = detail::fixed4(r.mse), p = detail::fixed4(r.psnr);
        out.table += detail::pad(r.technique, name_width, true) + "  " + detail::pad(cr, 10, false) + "  " +
                     detail::pad(m, 10, false) + "  " + detail::pad(p, 10, false) + "\n";
        out.csv += r.technique + "," + cr + "," + m + "," + p + "\n";
    }
    return out;
}

// One row per eigenvalue, descending: channel,eigenvalue,cumulative_fraction.
// A zero-trace report writes "undefined" fractions.
inline std::string eigen_csv(const EnergyReport& report) {
    std::string out = "channel,eigenvalue,cumulative_fraction\n";
    char buf[96];
    for (std::size_t i = 0; i < report.eigenvalues.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.10g,", i + 1, report.eigenvalues[i]);
        out += buf;
        if (report.zero_trace) {
            out += "undefined\n";
        } else {
            std::snprintf(buf, sizeof buf, "%.10f\n", report.cumulative_fraction[i]);
            out += buf;
        }
    }
    return out;
}

} // namespace uic

#endif // UIC_METRICS_HPP
