#include "ladderprobe/probe.hpp"

#include "ladderprobe/constants.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace ladderprobe {

using constants::pi;

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("probe config: " + what);
}

/// RAII wrappers for FFTW buffers and plans.
struct RealFft {
    std::size_t n;
    double* in;
    fftw_complex* out;
    fftw_plan forward;
    fftw_plan backward;

    explicit RealFft(std::size_t n_)
        : n(n_), in(fftw_alloc_real(n_)),
          out(fftw_alloc_complex(n_ / 2 + 1)),
          forward(fftw_plan_dft_r2c_1d(static_cast<int>(n_), in, out, FFTW_ESTIMATE)),
          backward(fftw_plan_dft_c2r_1d(static_cast<int>(n_), out, in, FFTW_ESTIMATE)) {}

    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    ~RealFft() {
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
        fftw_free(in);
        fftw_free(out);
    }
};

/// Exponential-kernel low-pass with unity DC gain, state carried sample to
/// sample: y[k] = a y[k-1] + (1-a) x[k], a = exp(-kappa dt).
void one_pole_filter(std::vector<double>& x, double kappa, double dt) {
    if (kappa <= 0.0 || x.empty()) return;
    const double a = std::exp(-kappa * dt);
    double y = x[0];
    for (auto& v : x) {
        y = a * y + (1.0 - a) * v;
        v = y;
    }
}

/// Damped LC section y'' + 2 kappa y' + wP^2 y = wP^2 x, advanced with a
/// zero-order hold on x. Complex arithmetic covers the under/overdamped cases
/// uniformly.
void two_pole_filter(std::vector<double>& x, double kappa, double omega_P,
                     double dt) {
    if (x.empty()) return;
    using C = std::complex<double>;
    const C wd = std::sqrt(C(omega_P * omega_P - kappa * kappa, 0.0));
    const double decay = std::exp(-kappa * dt);
    const C cwd = std::cos(wd * dt);
    const C swd = (std::abs(wd) > 0.0) ? std::sin(wd * dt) / wd : C(dt, 0.0);

    double y = x[0], v = 0.0;
    for (auto& sample : x) {
        const double u = sample;
        // Homogeneous propagation of (y - u, v), then add the hold value back.
        const C h0 = C(y - u, 0.0);
        const C h1 = C(v, 0.0);
        const C yh = decay * (h0 * (cwd + kappa * swd) + h1 * swd);
        const C vh = decay * (h1 * (cwd - kappa * swd) -
                              h0 * swd * (omega_P * omega_P));
        y = u + yh.real();
        v = vh.real();
        sample = y;
    }
}

} // namespace

void ProbeConfig::validate() const {
    require(C_S > 0.0, "C_S must be positive");
    require(L_S > 0.0, "L_S must be positive");
    require(C_X > 0.0, "C_X must be positive");
    require(L_X > 0.0, "L_X must be positive");
    require(EJ_P > 0.0, "EJ_P must be positive");
    require(I_c > 0.0, "I_c must be positive");
    require(M >= 0.0, "M must be non-negative");
    require(L_P > 0.0, "L_P must be positive");
    require(C_P > 0.0, "C_P must be positive");
    require(E_M > 0.0, "E_M must be positive");
    require(kappa_probe >= 0.0, "kappa_probe must be non-negative");
    const double tol = 1e-9;
    require(std::abs(phi_ext) < tol || std::abs(phi_ext - pi / 2) < tol,
            "phi_ext must be 0 or pi/2");
}

double ProbeConfig::omega_P() const { return 1.0 / std::sqrt(L_P * C_P); }

double ProbeConfig::Z_P() const { return std::sqrt(L_P / C_P); }

double ProbeConfig::output_scale() const {
    return constants::phi0_red * EJ_P / (L_P * E_M);
}

double beta(const ProbeConfig& config, double omega) {
    const double w2 = omega * omega;
    const double numerator = 1.0 / config.L_S - config.C_S * w2;
    const double denominator =
        (1.0 / config.L_S + 2.0 / config.L_X) - (config.C_S + 2.0 * config.C_X) * w2;
    const double dc = 1.0 / config.L_S + 2.0 / config.L_X;
    if (std::abs(denominator) < 1e-9 * dc)
        throw std::domain_error("coupler pole: beta diverges near this frequency");
    return numerator / denominator;
}

double junction_current(double delta_phi_scaled, double phi_ext, double I_c) {
    return I_c * std::sin(delta_phi_scaled + phi_ext);
}

TimeSeries simulate_readout(const TimeSeries& phi_i, const TimeSeries& phi_j,
                            const ProbeConfig& config,
                            std::vector<std::string>* warnings) {
    config.validate();
    if (phi_i.samples.size() != phi_j.samples.size())
        throw std::invalid_argument("readout: input lengths differ");
    if (phi_i.dt <= 0.0 || std::abs(phi_i.dt - phi_j.dt) > 1e-15 * phi_i.dt)
        throw std::invalid_argument("readout: input sample spacings differ");
    const std::size_t n = phi_i.samples.size();
    if (n < 2) throw std::invalid_argument("readout: need at least 2 samples");
    const double dt = phi_i.dt;

    TimeSeries out;
    out.t0 = phi_i.t0;
    out.dt = dt;
    out.samples.resize(n);
    kernels::scaled_diff(phi_i.samples, phi_j.samples, 1.0, out.samples);

    // Coupler stage: scale each Fourier component by beta, checking that the
    // input band is well resolved by the sampling.
    {
        RealFft fft(n);
        const std::size_t bins = n / 2 + 1;
        const double domega = 2.0 * pi / (static_cast<double>(n) * dt);

        // Band estimate on a Hann-windowed copy; rectangular leakage from an
        // off-bin tone would otherwise smear across the whole spectrum and
        // falsely trip the sampling guard.
        for (std::size_t k = 0; k < n; ++k) {
            const double w =
                0.5 - 0.5 * std::cos(2.0 * pi * static_cast<double>(k) /
                                     static_cast<double>(n));
            fft.in[k] = out.samples[k] * w;
        }
        fftw_execute(fft.forward);
        double band_max = 0.0;
        std::vector<double> band(bins);
        for (std::size_t k = 0; k < bins; ++k) {
            band[k] = std::hypot(fft.out[k][0], fft.out[k][1]);
            band_max = std::max(band_max, band[k]);
        }
        double omega_max = 0.0;
        for (std::size_t k = 0; k < bins; ++k)
            if (band[k] > 1e-4 * band_max) omega_max = static_cast<double>(k) * domega;
        if (omega_max > 0.0 && dt > (2.0 * pi / omega_max) / 20.0)
            throw std::domain_error(
                "readout: sampling too coarse for the input band (need 20 "
                "samples per shortest period)");

        std::copy(out.samples.begin(), out.samples.end(), fft.in);
        fftw_execute(fft.forward);
        double max_amp = 0.0;
        std::vector<double> amp(bins);
        for (std::size_t k = 0; k < bins; ++k) {
            amp[k] = std::hypot(fft.out[k][0], fft.out[k][1]);
            max_amp = std::max(max_amp, amp[k]);
        }
        const double beta0 = beta(config, 0.0);
        for (std::size_t k = 0; k < bins; ++k) {
            double b = beta0;
            if (config.beta_mode == BetaMode::PerComponent && amp[k] > 1e-14 * max_amp)
                b = beta(config, static_cast<double>(k) * domega);
            fft.out[k][0] *= b / static_cast<double>(n);
            fft.out[k][1] *= b / static_cast<double>(n);
        }
        fftw_execute(fft.backward);
        std::copy(fft.in, fft.in + n, out.samples.begin());
    }

    double max_drive = 0.0;
    for (double v : out.samples) max_drive = std::max(max_drive, std::abs(v));
    if (max_drive >= 1.0)
        throw std::domain_error(
            "readout: scaled drive reaches 1 rad; junction regime violated");
    if (max_drive > 0.5 && warnings)
        warnings->push_back("readout: scaled drive exceeds 0.5 rad; cubic "
                            "corrections are no longer small");

    kernels::sin_bias(out.samples, config.output_scale(), config.phi_ext,
                      out.samples);

    switch (config.channel) {
    case ChannelModel::OnePole:
        one_pole_filter(out.samples, config.kappa_probe, dt);
        break;
    case ChannelModel::TwoPole:
        two_pole_filter(out.samples, config.kappa_probe, config.omega_P(), dt);
        break;
    case ChannelModel::None: break;
    }
    return out;
}

std::complex<double> channel_response(const ProbeConfig& config, double omega,
                                      double dt) {
    using C = std::complex<double>;
    switch (config.channel) {
    case ChannelModel::None: return C(1.0, 0.0);
    case ChannelModel::TwoPole: {
        // Amplitude convention value = Re[amp e^{-iwt}] makes the transfer
        // factor the conjugate of the usual e^{+iwt} form.
        const double wp2 = config.omega_P() * config.omega_P();
        return wp2 / C(wp2 - omega * omega, -2.0 * config.kappa_probe * omega);
    }
    case ChannelModel::OnePole: break;
    }
    const double kappa = config.kappa_probe;
    if (kappa <= 0.0) return C(1.0, 0.0);
    if (dt > 0.0) {
        // Exact response of the sampled recursion y[k] = a y[k-1] + (1-a) x[k].
        const double a = std::exp(-kappa * dt);
        return (1.0 - a) / (1.0 - a * std::exp(C(0.0, omega * dt)));
    }
    return kappa / C(kappa, -omega);
}

std::vector<SpectralComponent> predicted_fourier_components(
    const CorrelationSet& corr, const std::vector<double>& coeffs_i,
    const std::vector<double>& coeffs_j, const ProbeConfig& config, double dt) {
    config.validate();
    const int n_modes = corr.n_modes();
    if (static_cast<int>(coeffs_i.size()) != n_modes)
        throw std::invalid_argument("predicted components: coeffs_i size mismatch");
    if (!coeffs_j.empty() && static_cast<int>(coeffs_j.size()) != n_modes)
        throw std::invalid_argument("predicted components: coeffs_j size mismatch");

    const double K = config.output_scale();
    const double w0 = corr.omega0();
    std::vector<double> bc(n_modes); // beta_n * (c_i,n - c_j,n)
    for (int n = 1; n <= n_modes; ++n) {
        const double c = coeffs_i[n - 1] - (coeffs_j.empty() ? 0.0 : coeffs_j[n - 1]);
        bc[n - 1] = beta(config, corr.mode_omega(n)) * c;
    }

    std::map<long, std::complex<double>> by_harmonic;
    const bool linear = std::abs(config.phi_ext) < 1e-9;

    if (linear) {
        // I = K sin(dphi~) ~ K dphi~: one component per mode at omega_n with
        // the mean field 2 Re[alpha e^{-iwt}].
        for (int n = 1; n <= n_modes; ++n) {
            const std::complex<double> amp = K * bc[n - 1] * 2.0 * corr.Q()(n - 1);
            if (std::abs(amp) > 0.0) by_harmonic[n] += amp;
        }
    } else {
        // I = K cos(dphi~) ~ K (1 - dphi~^2/2) with
        // <dphi~^2> = sum_nm bc_n bc_m (2 N_nm(t) + 2 A_nm(t) + delta_nm).
        std::complex<double> dc = K;
        for (int n = 1; n <= n_modes; ++n) {
            dc -= 0.5 * K * bc[n - 1] * bc[n - 1] *
                  (2.0 * corr.Nmat()(n - 1, n - 1) + 1.0);
            for (int m = n + 1; m <= n_modes; ++m) {
                const double w = bc[n - 1] * bc[m - 1];
                const std::complex<double> diff_amp = -2.0 * K * w * corr.Nmat()(n - 1, m - 1);
                if (std::abs(diff_amp) > 0.0) by_harmonic[m - n] += diff_amp;
                const std::complex<double> sum_amp = -2.0 * K * w * corr.Amat()(n - 1, m - 1);
                if (std::abs(sum_amp) > 0.0) by_harmonic[n + m] += sum_amp;
            }
            const std::complex<double> self_amp =
                -K * bc[n - 1] * bc[n - 1] * corr.Amat()(n - 1, n - 1);
            if (std::abs(self_amp) > 0.0) by_harmonic[2 * n] += self_amp;
        }
        by_harmonic[0] += dc;
    }

    std::vector<SpectralComponent> components;
    components.reserve(by_harmonic.size());
    for (const auto& [harmonic, amp] : by_harmonic) {
        const double omega = static_cast<double>(harmonic) * w0;
        components.push_back({omega, amp * channel_response(config, omega, dt)});
    }
    return components;
}

std::vector<std::string> probe_regime_report(const ProbeConfig& config,
                                             double omega0, double Z0) {
    std::vector<std::string> report;
    const double zp = config.Z_P();
    if (Z0 > 0.0 && zp <= Z0)
        report.push_back("probe impedance Z_P = " + std::to_string(zp) +
                         " ohm does not exceed the system impedance " +
                         std::to_string(Z0) + " ohm");
    if (omega0 > 0.0) {
        const double ratio = config.omega_P() / omega0;
        report.push_back("readout frequency is " + std::to_string(ratio) +
                         " of the system mode spacing" +
                         (ratio < 1.0 ? " (slow, classical readout regime)"
                                      : " (faster than the mode spacing)"));
    }
    return report;
}

TimeSeries synthesize_tones(const std::vector<kernels::Tone>& tones, double t0,
                            double dt, std::size_t count) {
    TimeSeries series;
    series.t0 = t0;
    series.dt = dt;
    series.samples.assign(count, 0.0);
    kernels::accumulate_tones(series.samples, t0, dt, tones);
    return series;
}

} // namespace ladderprobe
