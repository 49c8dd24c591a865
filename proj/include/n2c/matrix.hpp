#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "n2c/errors.hpp"

namespace n2c::nn {

// Row-major dense matrix of doubles. Deliberately minimal: the network code
// only needs matrix-vector products, outer-product accumulation, and flat
// access for the optimizer.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {
        if (r < 0 || c < 0) throw ShapeMismatch("Matrix dimensions must be non-negative");
    }

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    std::span<double> row(int r) { return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)}; }
    std::span<const double> row(int r) const { return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)}; }

    std::size_t size() const { return data.size(); }
    void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// y += W x
inline void matvec_acc(const Matrix& w, std::span<const double> x, std::span<double> y) {
    if (static_cast<std::size_t>(w.cols) != x.size() || static_cast<std::size_t>(w.rows) != y.size())
        throw ShapeMismatch("matvec_acc: shape mismatch");
    for (int r = 0; r < w.rows; ++r) y[r] += dot(w.row(r), x);
}

// y += W^T a, computed row-wise so memory access stays contiguous.
inline void matvec_t_acc(const Matrix& w, std::span<const double> a, std::span<double> y) {
    if (static_cast<std::size_t>(w.rows) != a.size() || static_cast<std::size_t>(w.cols) != y.size())
        throw ShapeMismatch("matvec_t_acc: shape mismatch");
    for (int r = 0; r < w.rows; ++r) {
        const double ar = a[r];
        if (ar == 0.0) continue;
        auto row = w.row(r);
        for (int c = 0; c < w.cols; ++c) y[c] += ar * row[c];
    }
}

// W += a x^T
inline void outer_acc(Matrix& w, std::span<const double> a, std::span<const double> x) {
    if (static_cast<std::size_t>(w.rows) != a.size() || static_cast<std::size_t>(w.cols) != x.size())
        throw ShapeMismatch("outer_acc: shape mismatch");
    for (int r = 0; r < w.rows; ++r) {
        const double ar = a[r];
        if (ar == 0.0) continue;
        auto row = w.row(r);
        for (int c = 0; c < w.cols; ++c) row[c] += ar * x[c];
    }
}

}  // namespace n2c::nn
