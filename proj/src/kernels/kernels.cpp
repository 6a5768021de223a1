#include "ropscan/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace ropscan::kernels {

#if !ROPSCAN_BUILD_AVX2
// Stubs so the symbols exist on targets without the AVX2 translation unit.
namespace avx2 {
bool compiled_in() { return false; }
double dot(const double*, const double*, size_t) { throw std::runtime_error("avx2 backend not built"); }
void axpy(double, const double*, double*, size_t) { throw std::runtime_error("avx2 backend not built"); }
void sgd_momentum(double*, double*, const double*, double, double, size_t) {
    throw std::runtime_error("avx2 backend not built");
}
void col_sums(const double*, size_t, size_t, double*) { throw std::runtime_error("avx2 backend not built"); }
void col_sums_sq(const double*, size_t, size_t, double*) { throw std::runtime_error("avx2 backend not built"); }
void scale_shift_rows(const double*, double*, const double*, const double*, size_t, size_t) {
    throw std::runtime_error("avx2 backend not built");
}
} // namespace avx2
#endif

namespace {

enum class Backend { Scalar = 0, Avx2 = 1 };

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend detect_backend() {
    if (const char* env = std::getenv("ROPSCAN_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
        if (std::strcmp(env, "avx2") == 0) {
            if (avx2::compiled_in() && cpu_has_avx2_fma()) return Backend::Avx2;
            throw std::runtime_error("ROPSCAN_KERNELS=avx2 but AVX2+FMA is unavailable");
        }
        // anything else, including "auto": fall through to detection
    }
    return (avx2::compiled_in() && cpu_has_avx2_fma()) ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<int> g_backend{-1};

Backend backend() {
    int b = g_backend.load(std::memory_order_acquire);
    if (b < 0) {
        b = static_cast<int>(detect_backend());
        g_backend.store(b, std::memory_order_release);
    }
    return static_cast<Backend>(b);
}

} // namespace

bool avx2_available() { return avx2::compiled_in() && cpu_has_avx2_fma(); }

std::string active_backend() { return backend() == Backend::Avx2 ? "avx2" : "scalar"; }

void select_backend(const std::string& name) {
    if (name == "scalar") {
        g_backend.store(static_cast<int>(Backend::Scalar), std::memory_order_release);
    } else if (name == "avx2") {
        if (!avx2_available()) throw std::runtime_error("AVX2+FMA backend unavailable on this CPU");
        g_backend.store(static_cast<int>(Backend::Avx2), std::memory_order_release);
    } else if (name == "auto") {
        g_backend.store(-1, std::memory_order_release);
    } else {
        throw std::runtime_error("unknown kernel backend: " + name);
    }
}

double dot(const double* a, const double* b, size_t n) {
    return backend() == Backend::Avx2 ? avx2::dot(a, b, n) : scalar::dot(a, b, n);
}

void axpy(double alpha, const double* x, double* y, size_t n) {
    backend() == Backend::Avx2 ? avx2::axpy(alpha, x, y, n) : scalar::axpy(alpha, x, y, n);
}

void sgd_momentum(double* w, double* v, const double* g, double mu, double lr, size_t n) {
    backend() == Backend::Avx2 ? avx2::sgd_momentum(w, v, g, mu, lr, n)
                               : scalar::sgd_momentum(w, v, g, mu, lr, n);
}

void col_sums(const double* x, size_t rows, size_t cols, double* acc) {
    backend() == Backend::Avx2 ? avx2::col_sums(x, rows, cols, acc)
                               : scalar::col_sums(x, rows, cols, acc);
}

void col_sums_sq(const double* x, size_t rows, size_t cols, double* acc) {
    backend() == Backend::Avx2 ? avx2::col_sums_sq(x, rows, cols, acc)
                               : scalar::col_sums_sq(x, rows, cols, acc);
}

void scale_shift_rows(const double* x, double* y, const double* scale, const double* shift,
                      size_t rows, size_t cols) {
    backend() == Backend::Avx2 ? avx2::scale_shift_rows(x, y, scale, shift, rows, cols)
                               : scalar::scale_shift_rows(x, y, scale, shift, rows, cols);
}

} // namespace ropscan::kernels
