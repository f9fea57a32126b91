#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace roomnet {

using Vec = std::vector<double>;

// Dense row-major matrix, sized for the small parameter blocks used here.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vec a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

inline Vec matvec(const Mat& m, const Vec& x) {
    assert(x.size() == m.cols);
    Vec y(m.rows, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        double acc = 0.0;
        const double* row = &m.a[r * m.cols];
        for (std::size_t c = 0; c < m.cols; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
    return y;
}

// y = M^T x
inline Vec matvec_t(const Mat& m, const Vec& x) {
    assert(x.size() == m.rows);
    Vec y(m.cols, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* row = &m.a[r * m.cols];
        const double xr = x[r];
        for (std::size_t c = 0; c < m.cols; ++c) y[c] += row[c] * xr;
    }
    return y;
}

// M += d * x^T
inline void add_outer(Mat& m, const Vec& d, const Vec& x) {
    assert(d.size() == m.rows && x.size() == m.cols);
    for (std::size_t r = 0; r < m.rows; ++r) {
        double* row = &m.a[r * m.cols];
        const double dr = d[r];
        for (std::size_t c = 0; c < m.cols; ++c) row[c] += dr * x[c];
    }
}

inline void axpy(Vec& y, double alpha, const Vec& x) {
    assert(y.size() == x.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

inline double dot(const Vec& a, const Vec& b) {
    assert(a.size() == b.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

inline double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Vec softmax(const Vec& z) {
    if (z.empty()) throw std::invalid_argument("softmax of empty vector");
    double mx = z[0];
    for (double v : z) mx = std::max(mx, v);
    Vec p(z.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        p[i] = std::exp(z[i] - mx);
        sum += p[i];
    }
    for (auto& v : p) v /= sum;
    return p;
}

inline std::size_t argmax(const Vec& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

}  // namespace roomnet
