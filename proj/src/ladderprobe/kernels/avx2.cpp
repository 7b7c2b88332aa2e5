#include "table.hpp"

#include <cmath>

// ============================================================================
// AVX2 backend. Compiled with -mavx2 -mfma on x86-64; dispatch only routes
// here after a runtime CPU check. Tone loops use chunked phasor rotation
// reseeded from libm every CHUNK samples to bound drift; the vector sine is
// a Cody-Waite reduction plus the standard fdlibm kernel polynomials
// (valid to ~1 ulp for |x| well below 1e6, far beyond the arguments the
// junction nonlinearity produces).
// ============================================================================

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace ladderprobe::kernels::detail {

namespace {

constexpr std::size_t CHUNK = 1024;

// --- vector sine ------------------------------------------------------------

const __m256d INV_PIO2 = _mm256_set1_pd(6.36619772367581382433e-01);
const __m256d PIO2_1 = _mm256_set1_pd(1.57079632673412561417e+00);
const __m256d PIO2_1T = _mm256_set1_pd(6.07710050650619224932e-11);

__m256d sin_poly(__m256d r, __m256d z) {
    // sin(r) = r + r^3 * (S1 + z*(S2 + ... )), z = r^2
    __m256d p = _mm256_set1_pd(1.58969099521155010221e-10);
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-2.50507602534068634195e-08));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.75573137070700676789e-06));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-1.98412698298579493134e-04));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(8.33333333332248946124e-03));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-1.66666666666666324348e-01));
    return _mm256_fmadd_pd(_mm256_mul_pd(r, z), p, r);
}

__m256d cos_poly(__m256d z) {
    // cos(r) = 1 - z/2 + z^2 * (C1 + z*(C2 + ... )), z = r^2
    __m256d p = _mm256_set1_pd(-1.13596475577881948265e-11);
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.08757232129817482790e-09));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-2.75573143513906633035e-07));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.48015872894767294178e-05));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-1.38888888888741095749e-03));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(4.16666666666666019037e-02));
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d half = _mm256_set1_pd(0.5);
    return _mm256_fmadd_pd(_mm256_mul_pd(z, z), p,
                           _mm256_fnmadd_pd(half, z, one));
}

__m256d sin_pd(__m256d x) {
    const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, INV_PIO2),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(k, PIO2_1, x);
    r = _mm256_fnmadd_pd(k, PIO2_1T, r);
    const __m256d z = _mm256_mul_pd(r, r);

    // quadrant q = k mod 4
    const __m256d q = _mm256_fnmadd_pd(
        _mm256_floor_pd(_mm256_mul_pd(k, _mm256_set1_pd(0.25))),
        _mm256_set1_pd(4.0), k);
    const __m256d is1 = _mm256_cmp_pd(q, _mm256_set1_pd(1.0), _CMP_EQ_OQ);
    const __m256d is2 = _mm256_cmp_pd(q, _mm256_set1_pd(2.0), _CMP_EQ_OQ);
    const __m256d is3 = _mm256_cmp_pd(q, _mm256_set1_pd(3.0), _CMP_EQ_OQ);

    const __m256d use_cos = _mm256_or_pd(is1, is3);
    const __m256d negate = _mm256_or_pd(is2, is3);

    const __m256d value = _mm256_blendv_pd(sin_poly(r, z), cos_poly(z), use_cos);
    const __m256d sign = _mm256_and_pd(negate, _mm256_set1_pd(-0.0));
    return _mm256_xor_pd(value, sign);
}

double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d sum2 = _mm_add_pd(lo, hi);
    const __m128d swap = _mm_unpackhi_pd(sum2, sum2);
    return _mm_cvtsd_f64(_mm_add_sd(sum2, swap));
}

struct Phasor {
    __m256d c, s;   // cos/sin at four consecutive samples
    __m256d c4, s4; // rotation by four sample intervals

    Phasor(double omega, double t_first, double dt) {
        alignas(32) double ci[4], si[4];
        for (int j = 0; j < 4; ++j) {
            const double phase = omega * (t_first + j * dt);
            ci[j] = std::cos(phase);
            si[j] = std::sin(phase);
        }
        c = _mm256_load_pd(ci);
        s = _mm256_load_pd(si);
        const double delta = 4.0 * omega * dt;
        c4 = _mm256_set1_pd(std::cos(delta));
        s4 = _mm256_set1_pd(std::sin(delta));
    }

    void rotate() {
        const __m256d cn = _mm256_fnmadd_pd(s, s4, _mm256_mul_pd(c, c4));
        s = _mm256_fmadd_pd(c, s4, _mm256_mul_pd(s, c4));
        c = cn;
    }
};

// --- kernels ----------------------------------------------------------------

void accumulate_tones_avx2(double* out, std::size_t n, double t0, double dt,
                           const Tone* tones, std::size_t n_tones) {
    for (std::size_t j = 0; j < n_tones; ++j) {
        const Tone& tone = tones[j];
        const __m256d re = _mm256_set1_pd(tone.re);
        const __m256d im = _mm256_set1_pd(tone.im);
        for (std::size_t base = 0; base < n; base += CHUNK) {
            const std::size_t m = std::min(CHUNK, n - base);
            const std::size_t mv = m & ~std::size_t{3};
            Phasor ph(tone.omega, t0 + static_cast<double>(base) * dt, dt);
            for (std::size_t i = 0; i < mv; i += 4) {
                __m256d acc = _mm256_loadu_pd(out + base + i);
                acc = _mm256_fmadd_pd(re, ph.c, acc);
                acc = _mm256_fmadd_pd(im, ph.s, acc);
                _mm256_storeu_pd(out + base + i, acc);
                ph.rotate();
            }
            for (std::size_t i = mv; i < m; ++i) {
                const double phase =
                    tone.omega * (t0 + static_cast<double>(base + i) * dt);
                out[base + i] +=
                    tone.re * std::cos(phase) + tone.im * std::sin(phase);
            }
        }
    }
}

void sin_bias_avx2(const double* x, std::size_t n, double amp, double bias,
                   double* y) {
    const __m256d amp_v = _mm256_set1_pd(amp);
    const __m256d bias_v = _mm256_set1_pd(bias);
    const std::size_t nv = n & ~std::size_t{3};
    for (std::size_t k = 0; k < nv; k += 4) {
        const __m256d arg = _mm256_add_pd(_mm256_loadu_pd(x + k), bias_v);
        _mm256_storeu_pd(y + k, _mm256_mul_pd(amp_v, sin_pd(arg)));
    }
    for (std::size_t k = nv; k < n; ++k) y[k] = amp * std::sin(x[k] + bias);
}

void multiply_avx2(const double* x, const double* w, std::size_t n, double* y) {
    const std::size_t nv = n & ~std::size_t{3};
    for (std::size_t k = 0; k < nv; k += 4)
        _mm256_storeu_pd(y + k, _mm256_mul_pd(_mm256_loadu_pd(x + k),
                                              _mm256_loadu_pd(w + k)));
    for (std::size_t k = nv; k < n; ++k) y[k] = x[k] * w[k];
}

void scaled_diff_avx2(const double* a, const double* b, std::size_t n,
                      double scale, double* out) {
    const __m256d s = _mm256_set1_pd(scale);
    const std::size_t nv = n & ~std::size_t{3};
    for (std::size_t k = 0; k < nv; k += 4)
        _mm256_storeu_pd(out + k,
                         _mm256_mul_pd(s, _mm256_sub_pd(_mm256_loadu_pd(a + k),
                                                        _mm256_loadu_pd(b + k))));
    for (std::size_t k = nv; k < n; ++k) out[k] = scale * (a[k] - b[k]);
}

double sum_squares_avx2(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    const std::size_t nv = n & ~std::size_t{7};
    for (std::size_t k = 0; k < nv; k += 8) {
        const __m256d a = _mm256_loadu_pd(x + k);
        const __m256d b = _mm256_loadu_pd(x + k + 4);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
        acc1 = _mm256_fmadd_pd(b, b, acc1);
    }
    double total = hsum(_mm256_add_pd(acc0, acc1));
    for (std::size_t k = nv; k < n; ++k) total += x[k] * x[k];
    return total;
}

Projection project_tone_avx2(const double* x, std::size_t n, double t0,
                             double dt, double omega) {
    __m256d acc_c = _mm256_setzero_pd();
    __m256d acc_s = _mm256_setzero_pd();
    double tail_c = 0.0, tail_s = 0.0;
    for (std::size_t base = 0; base < n; base += CHUNK) {
        const std::size_t m = std::min(CHUNK, n - base);
        const std::size_t mv = m & ~std::size_t{3};
        Phasor ph(omega, t0 + static_cast<double>(base) * dt, dt);
        for (std::size_t i = 0; i < mv; i += 4) {
            const __m256d xv = _mm256_loadu_pd(x + base + i);
            acc_c = _mm256_fmadd_pd(xv, ph.c, acc_c);
            acc_s = _mm256_fmadd_pd(xv, ph.s, acc_s);
            ph.rotate();
        }
        for (std::size_t i = mv; i < m; ++i) {
            const double phase = omega * (t0 + static_cast<double>(base + i) * dt);
            tail_c += x[base + i] * std::cos(phase);
            tail_s += x[base + i] * std::sin(phase);
        }
    }
    return {hsum(acc_c) + tail_c, hsum(acc_s) + tail_s};
}

} // namespace

const KernelTable* avx2_table() {
    static const KernelTable table{
        accumulate_tones_avx2, sin_bias_avx2, multiply_avx2,
        scaled_diff_avx2,      sum_squares_avx2, project_tone_avx2};
    return &table;
}

} // namespace ladderprobe::kernels::detail

#else // !(__AVX2__ && __FMA__)

namespace ladderprobe::kernels::detail {

const KernelTable* avx2_table() { return nullptr; }

} // namespace ladderprobe::kernels::detail

#endif
