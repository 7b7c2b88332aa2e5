#pragma once

#include "ladderprobe/kernels.hpp"

#include <cstddef>

// Internal dispatch table shared by the backend translation units.

namespace ladderprobe::kernels::detail {

struct KernelTable {
    void (*accumulate_tones)(double* out, std::size_t n, double t0, double dt,
                             const Tone* tones, std::size_t n_tones) = nullptr;
    void (*sin_bias)(const double* x, std::size_t n, double amp, double bias,
                     double* y) = nullptr;
    void (*multiply)(const double* x, const double* w, std::size_t n,
                     double* y) = nullptr;
    void (*scaled_diff)(const double* a, const double* b, std::size_t n,
                        double scale, double* out) = nullptr;
    double (*sum_squares)(const double* x, std::size_t n) = nullptr;
    Projection (*project_tone)(const double* x, std::size_t n, double t0,
                               double dt, double omega) = nullptr;
};

[[nodiscard]] const KernelTable& scalar_table();

/// Null pointers when this build or CPU cannot run AVX2.
[[nodiscard]] const KernelTable* avx2_table();

[[nodiscard]] bool cpu_has_avx2();

} // namespace ladderprobe::kernels::detail
