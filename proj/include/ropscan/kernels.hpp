#pragma once

#include <cstddef>
#include <string>

// Arithmetic inner loops of the network, behind a runtime-dispatched
// interface: the top-level functions pick the widest backend the CPU
// supports on first use. Scalar versions are the reference semantics;
// vector backends must agree with them to tight tolerance (reassociation
// of floating-point sums is the only permitted difference) and are
// equivalence-tested against them.
namespace ropscan::kernels {

// Reference implementations, always available.
namespace scalar {
double dot(const double* a, const double* b, size_t n);
void axpy(double alpha, const double* x, double* y, size_t n);
// v <- mu*v - lr*g ; w <- w + v (classic momentum step, fused)
void sgd_momentum(double* w, double* v, const double* g, double mu, double lr, size_t n);
// acc[c] += sum over rows of x[r*cols + c]
void col_sums(const double* x, size_t rows, size_t cols, double* acc);
// acc[c] += sum over rows of x[r*cols + c]^2
void col_sums_sq(const double* x, size_t rows, size_t cols, double* acc);
// y[r*cols + c] = x[r*cols + c] * scale[c] + shift[c]
void scale_shift_rows(const double* x, double* y, const double* scale, const double* shift,
                      size_t rows, size_t cols);
} // namespace scalar

// AVX2+FMA implementations. Compiled on x86 builds; calling them when
// avx2_available() is false is undefined.
namespace avx2 {
bool compiled_in();
double dot(const double* a, const double* b, size_t n);
void axpy(double alpha, const double* x, double* y, size_t n);
void sgd_momentum(double* w, double* v, const double* g, double mu, double lr, size_t n);
void col_sums(const double* x, size_t rows, size_t cols, double* acc);
void col_sums_sq(const double* x, size_t rows, size_t cols, double* acc);
void scale_shift_rows(const double* x, double* y, const double* scale, const double* shift,
                      size_t rows, size_t cols);
} // namespace avx2

bool avx2_available();

// Name of the backend the dispatched entry points currently use
// ("scalar" or "avx2"). The ROPSCAN_KERNELS environment variable
// (scalar|avx2|auto) overrides auto-detection.
std::string active_backend();
// Force a backend explicitly; throws std::runtime_error if unavailable.
void select_backend(const std::string& name);

double dot(const double* a, const double* b, size_t n);
void axpy(double alpha, const double* x, double* y, size_t n);
void sgd_momentum(double* w, double* v, const double* g, double mu, double lr, size_t n);
void col_sums(const double* x, size_t rows, size_t cols, double* acc);
void col_sums_sq(const double* x, size_t rows, size_t cols, double* acc);
void scale_shift_rows(const double* x, double* y, const double* scale, const double* shift,
                      size_t rows, size_t cols);

} // namespace ropscan::kernels
