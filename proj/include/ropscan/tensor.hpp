#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace ropscan {

// Dense row-major matrix of doubles: rows = sequence positions,
// cols = channels.
struct Tensor2D {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> values;

    Tensor2D() = default;
    Tensor2D(size_t r, size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

    double* row(size_t r) { return values.data() + r * cols; }
    const double* row(size_t r) const { return values.data() + r * cols; }
    double& at(size_t r, size_t c) { return values[r * cols + c]; }
    double at(size_t r, size_t c) const { return values[r * cols + c]; }

    void fill(double v) { std::fill(values.begin(), values.end(), v); }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }

    void require_finite(const char* what) const {
        if (!all_finite()) throw std::runtime_error(std::string("non-finite values in ") + what);
    }
};

} // namespace ropscan
