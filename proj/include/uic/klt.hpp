#ifndef UIC_KLT_HPP
#define UIC_KLT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "plane.hpp"

namespace uic {

// Dense row-major real matrix; only what the KLT needs.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("Matrix: inner dimensions differ");
        Matrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct EigenDecomposition {
    std::vector<double> values; // descending
    Matrix vectors;             // column j pairs with values[j]
    std::size_t sweeps = 0;
};

// Cyclic Jacobi for symmetric matrices. Sweeps rows p < q in order until the
// off-diagonal Frobenius norm falls to 1e-12 of the trace (of the Frobenius
// norm when the trace is not positive). Eigenpairs are sorted by descending
// eigenvalue, ties kept in original diagonal order, and each eigenvector is
// signed so that its largest-magnitude component (first one on ties) is
// positive.
inline EigenDecomposition jacobi_eigen(const Matrix& symmetric, std::size_t max_sweeps = 100) {
    const std::size_t n = symmetric.rows();
    if (n != symmetric.cols()) throw std::invalid_argument("jacobi_eigen: matrix must be square");
    Matrix a = symmetric;
    Matrix v = Matrix::identity(n);

    double scale = a.trace();
    if (!(scale > 0.0)) {
        scale = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) scale += a(i, j) * a(i, j);
        scale = std::sqrt(scale);
    }
    const double tolerance = 1e-12 * scale;

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    std::size_t sweep = 0;
    for (; sweep < max_sweeps && off_norm() > tolerance; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    EigenDecomposition out{std::vector<double>(n), Matrix(n, n), sweep};
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.values[j] = a(src, src);
        std::size_t lead = 0;
        for (std::size_t k = 1; k < n; ++k)
            if (std::abs(v(k, src)) > std::abs(v(lead, src))) lead = k;
        const double sign = v(lead, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = sign * v(k, src);
    }
    return out;
}

// Side information of a cross-block KLT. A fitted model carries the full
// n x n basis and all eigenvalues; a model rebuilt from a container carries
// only the transmitted columns and no eigenvalues.
struct KltModel {
    std::vector<double> mean;
    Matrix basis; // n rows; column j is the eigenvector of channel j
    std::vector<double> eigenvalues;
    std::size_t kept = 0;

    std::size_t n() const noexcept { return mean.size(); }
};

namespace detail {

inline void check_stack_for_model(const BlockStack& stack, const KltModel& model) {
    stack.validate();
    if (stack.size() != model.n() || model.basis.rows() != model.n())
        throw std::invalid_argument("klt: stack size does not match model channel count");
}

// Channels the model transforms: the kept count, limited to the columns present.
inline std::size_t active_channels(const KltModel& model) { return std::min(model.kept, model.basis.cols()); }

} // namespace detail

// Every pixel position of the blocks is one observation x in R^n (component j
// from block j). Mean and covariance use the population divisor rows*cols.
inline Matrix covariance(const BlockStack& stack, std::vector<double>* mean_out = nullptr) {
    if (stack.size() < 2) throw std::invalid_argument("klt fit: need at least two blocks");
    stack.validate();
    const std::size_t n = stack.size();
    const std::size_t positions = stack.blocks.front().size();
    if (positions == 0) throw std::invalid_argument("klt fit: empty blocks");

    std::vector<double> mean(n);
    std::vector<std::vector<double>> centered(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& vals = stack.blocks[j].values();
        mean[j] = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(positions);
        centered[j].resize(positions);
        for (std::size_t p = 0; p < positions; ++p) centered[j][p] = vals[p] - mean[j];
    }
    Matrix cov(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t p = 0; p < positions; ++p) s += centered[i][p] * centered[j][p];
            cov(i, j) = cov(j, i) = s / static_cast<double>(positions);
        }
    if (mean_out) *mean_out = std::move(mean);
    return cov;
}

inline KltModel fit(const BlockStack& stack) {
    KltModel model;
    const Matrix cov = covariance(stack, &model.mean);
    EigenDecomposition eig = jacobi_eigen(cov);
    model.basis = std::move(eig.vectors);
    model.eigenvalues = std::move(eig.values);
    model.kept = model.n();
    return model;
}

// y = V^T (x - m) per pixel position. Output block j is channel j; channels
// past the kept count come out as zero planes.
inline BlockStack forward(const BlockStack& stack, const KltModel& model) {
    detail::check_stack_for_model(stack, model);
    const std::size_t n = model.n();
    const std::size_t cols = detail::active_channels(model);
    const std::size_t w = stack.block_width(), h = stack.block_height();
    BlockStack out{std::vector<CoeffPlane>(n, CoeffPlane(w, h)), stack.grid_rows, stack.grid_cols, stack.scan};
    std::vector<double> x(n);
    for (std::size_t p = 0; p < w * h; ++p) {
        for (std::size_t k = 0; k < n; ++k) x[k] = stack.blocks[k].values()[p] - model.mean[k];
        for (std::size_t j = 0; j < cols; ++j) {
            double y = 0.0;
            for (std::size_t k = 0; k < n; ++k) y += model.basis(k, j) * x[k];
            out.blocks[j].values()[p] = y;
        }
    }
    return out;
}

// x = V y + m per pixel position, over the kept channels only.
inline BlockStack inverse(const BlockStack& channels, const KltModel& model) {
    detail::check_stack_for_model(channels, model);
    const std::size_t n = model.n();
    const std::size_t cols = detail::active_channels(model);
    const std::size_t w = channels.block_width(), h = channels.block_height();
    BlockStack out{std::vector<CoeffPlane>(n, CoeffPlane(w, h)), channels.grid_rows, channels.grid_cols, channels.scan};
    std::vector<double> y(cols);
    for (std::size_t p = 0; p < w * h; ++p) {
        for (std::size_t j = 0; j < cols; ++j) y[j] = channels.blocks[j].values()[p];
        for (std::size_t k = 0; k < n; ++k) {
            double x = model.mean[k];
            for (std::size_t j = 0; j < cols; ++j) x += model.basis(k, j) * y[j];
            out.blocks[k].values()[p] = x;
        }
    }
    return out;
}

inline KltModel prune(const KltModel& model, std::size_t target_kept) {
    if (target_kept < 1 || target_kept > model.basis.cols())
        throw std::out_of_range("prune: kept channel count out of range");
    KltModel out = model;
    out.kept = target_kept;
    return out;
}

inline BlockStack zero_pruned(const BlockStack& channels, std::size_t kept) {
    if (kept < 1 || kept > channels.size()) throw std::out_of_range("zero_pruned: kept channel count out of range");
    BlockStack out = channels;
    for (std::size_t j = kept; j < out.size(); ++j)
        std::fill(out.blocks[j].values().begin(), out.blocks[j].values().end(), 0.0);
    return out;
}

struct EnergyReport {
    std::vector<double> eigenvalues;         // descending
    std::vector<double> cumulative_fraction; // empty when the trace is zero
    bool zero_trace = false;

    // Smallest k whose leading k eigenvalues reach `fraction` of the total.
    std::size_t channels_for(double fraction) const {
        if (zero_trace) throw std::domain_error("channels_for: eigenvalues sum to zero");
        for (std::size_t k = 0; k < cumulative_fraction.size(); ++k)
            if (cumulative_fraction[k] >= fraction) return k + 1;
        return cumulative_fraction.size();
    }
};

// Tiny negative eigenvalues from round-off are treated as zero.
inline EnergyReport energy_report(const std::vector<double>& eigenvalues) {
    EnergyReport r;
    r.eigenvalues = eigenvalues;
    std::vector<double> partial(eigenvalues.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
        sum += std::max(eigenvalues[i], 0.0);
        partial[i] = sum;
    }
    if (!(sum > 0.0)) {
        r.zero_trace = true;
        return r;
    }
    r.cumulative_fraction.resize(partial.size());
    for (std::size_t i = 0; i < partial.size(); ++i) r.cumulative_fraction[i] = partial[i] / sum;
    return r;
}

inline EnergyReport energy_report(const KltModel& model) { return energy_report(model.eigenvalues); }

} // namespace uic

#endif // UIC_KLT_HPP
