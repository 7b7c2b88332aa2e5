#include "table.hpp"

#include <cmath>

// ============================================================================
// Scalar reference backend. Straight libm per sample; this is the ground
// truth the SIMD variants are tested against.
// ============================================================================

namespace ladderprobe::kernels::detail {

namespace {

void accumulate_tones_scalar(double* out, std::size_t n, double t0, double dt,
                             const Tone* tones, std::size_t n_tones) {
    for (std::size_t j = 0; j < n_tones; ++j) {
        const Tone& tone = tones[j];
        for (std::size_t k = 0; k < n; ++k) {
            const double phase = tone.omega * (t0 + static_cast<double>(k) * dt);
            out[k] += tone.re * std::cos(phase) + tone.im * std::sin(phase);
        }
    }
}

void sin_bias_scalar(const double* x, std::size_t n, double amp, double bias,
                     double* y) {
    for (std::size_t k = 0; k < n; ++k) y[k] = amp * std::sin(x[k] + bias);
}

void multiply_scalar(const double* x, const double* w, std::size_t n, double* y) {
    for (std::size_t k = 0; k < n; ++k) y[k] = x[k] * w[k];
}

void scaled_diff_scalar(const double* a, const double* b, std::size_t n,
                        double scale, double* out) {
    for (std::size_t k = 0; k < n; ++k) out[k] = scale * (a[k] - b[k]);
}

double sum_squares_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += x[k] * x[k];
    return acc;
}

Projection project_tone_scalar(const double* x, std::size_t n, double t0,
                               double dt, double omega) {
    Projection p;
    for (std::size_t k = 0; k < n; ++k) {
        const double phase = omega * (t0 + static_cast<double>(k) * dt);
        p.cos_sum += x[k] * std::cos(phase);
        p.sin_sum += x[k] * std::sin(phase);
    }
    return p;
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{
        accumulate_tones_scalar, sin_bias_scalar, multiply_scalar,
        scaled_diff_scalar,      sum_squares_scalar, project_tone_scalar};
    return table;
}

} // namespace ladderprobe::kernels::detail
