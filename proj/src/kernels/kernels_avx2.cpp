#include "ropscan/kernels.hpp"

#include <immintrin.h>

namespace ropscan::kernels::avx2 {

bool compiled_in() { return true; }

double dot(const double* a, const double* b, size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    acc0 = _mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3));
    __m128d lo = _mm256_castpd256_pd128(acc0);
    __m128d hi = _mm256_extractf128_pd(acc0, 1);
    lo = _mm_add_pd(lo, hi);
    double acc = _mm_cvtsd_f64(_mm_hadd_pd(lo, lo));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy(double alpha, const double* x, double* y, size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d y0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        __m256d y1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4));
        _mm256_storeu_pd(y + i, y0);
        _mm256_storeu_pd(y + i + 4, y1);
    }
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void sgd_momentum(double* w, double* v, const double* g, double mu, double lr, size_t n) {
    const __m256d vmu = _mm256_set1_pd(mu);
    const __m256d vnlr = _mm256_set1_pd(-lr);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vv = _mm256_fmadd_pd(vmu, _mm256_loadu_pd(v + i),
                                     _mm256_mul_pd(vnlr, _mm256_loadu_pd(g + i)));
        _mm256_storeu_pd(v + i, vv);
        _mm256_storeu_pd(w + i, _mm256_add_pd(_mm256_loadu_pd(w + i), vv));
    }
    for (; i < n; ++i) {
        v[i] = mu * v[i] - lr * g[i];
        w[i] += v[i];
    }
}

void col_sums(const double* x, size_t rows, size_t cols, double* acc) {
    for (size_t r = 0; r < rows; ++r) {
        const double* row = x + r * cols;
        size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            _mm256_storeu_pd(acc + c,
                             _mm256_add_pd(_mm256_loadu_pd(acc + c), _mm256_loadu_pd(row + c)));
        }
        for (; c < cols; ++c) acc[c] += row[c];
    }
}

void col_sums_sq(const double* x, size_t rows, size_t cols, double* acc) {
    for (size_t r = 0; r < rows; ++r) {
        const double* row = x + r * cols;
        size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            __m256d v = _mm256_loadu_pd(row + c);
            _mm256_storeu_pd(acc + c, _mm256_fmadd_pd(v, v, _mm256_loadu_pd(acc + c)));
        }
        for (; c < cols; ++c) acc[c] += row[c] * row[c];
    }
}

void scale_shift_rows(const double* x, double* y, const double* scale, const double* shift,
                      size_t rows, size_t cols) {
    for (size_t r = 0; r < rows; ++r) {
        const double* xr = x + r * cols;
        double* yr = y + r * cols;
        size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            __m256d v = _mm256_fmadd_pd(_mm256_loadu_pd(xr + c), _mm256_loadu_pd(scale + c),
                                        _mm256_loadu_pd(shift + c));
            _mm256_storeu_pd(yr + c, v);
        }
        for (; c < cols; ++c) yr[c] = xr[c] * scale[c] + shift[c];
    }
}

} // namespace ropscan::kernels::avx2
