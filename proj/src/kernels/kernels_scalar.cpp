#include "ropscan/kernels.hpp"

namespace ropscan::kernels::scalar {

double dot(const double* a, const double* b, size_t n) {
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy(double alpha, const double* x, double* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void sgd_momentum(double* w, double* v, const double* g, double mu, double lr, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        v[i] = mu * v[i] - lr * g[i];
        w[i] += v[i];
    }
}

void col_sums(const double* x, size_t rows, size_t cols, double* acc) {
    for (size_t r = 0; r < rows; ++r) {
        const double* row = x + r * cols;
        for (size_t c = 0; c < cols; ++c) acc[c] += row[c];
    }
}

void col_sums_sq(const double* x, size_t rows, size_t cols, double* acc) {
    for (size_t r = 0; r < rows; ++r) {
        const double* row = x + r * cols;
        for (size_t c = 0; c < cols; ++c) acc[c] += row[c] * row[c];
    }
}

void scale_shift_rows(const double* x, double* y, const double* scale, const double* shift,
                      size_t rows, size_t cols) {
    for (size_t r = 0; r < rows; ++r) {
        const double* xr = x + r * cols;
        double* yr = y + r * cols;
        for (size_t c = 0; c < cols; ++c) yr[c] = xr[c] * scale[c] + shift[c];
    }
}

} // namespace ropscan::kernels::scalar
