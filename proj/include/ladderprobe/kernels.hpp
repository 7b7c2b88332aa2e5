#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// ============================================================================
// Sample-loop kernels
//
// The hot per-sample loops of the probe/readout pipeline live here: tone
// synthesis, the junction sine nonlinearity, elementwise window application,
// and single-frequency projections. Each kernel has a scalar reference
// implementation and an AVX2 variant; the backend is chosen once at runtime
// (CPU detection, overridable via LADDERPROBE_KERNELS or force_backend) and
// the variants are equivalence-tested against each other.
// ============================================================================

namespace ladderprobe::kernels {

enum class Backend { Scalar, Avx2 };

/// One spectral component: value(t) = re*cos(omega*t) + im*sin(omega*t),
/// i.e. Re[(re + i*im) * exp(-i*omega*t)].
struct Tone {
    double omega = 0.0;
    double re = 0.0;
    double im = 0.0;
};

/// Cosine/sine projections of a record against one frequency.
struct Projection {
    double cos_sum = 0.0;
    double sin_sum = 0.0;
};

[[nodiscard]] Backend active_backend();
[[nodiscard]] std::string_view backend_name();
[[nodiscard]] bool backend_supported(Backend backend);

/// Overrides backend selection (tests, CLI flag). Throws std::runtime_error
/// if the requested backend is not supported on this machine.
void force_backend(Backend backend);

/// out[k] += sum_j re_j*cos(omega_j*t_k) + im_j*sin(omega_j*t_k),
/// t_k = t0 + k*dt.
void accumulate_tones(std::span<double> out, double t0, double dt,
                      std::span<const Tone> tones);

/// y[k] = amp * sin(x[k] + bias)
void sin_bias(std::span<const double> x, double amp, double bias,
              std::span<double> y);

/// y[k] = x[k] * w[k]
void multiply(std::span<const double> x, std::span<const double> w,
              std::span<double> y);

/// out[k] = scale * (a[k] - b[k])
void scaled_diff(std::span<const double> a, std::span<const double> b,
                 double scale, std::span<double> out);

/// sum_k x[k]^2
[[nodiscard]] double sum_squares(std::span<const double> x);

/// (sum_k x[k]*cos(omega*t_k), sum_k x[k]*sin(omega*t_k)), t_k = t0 + k*dt.
[[nodiscard]] Projection project_tone(std::span<const double> x, double t0,
                                      double dt, double omega);

} // namespace ladderprobe::kernels
