#pragma once

#include "ladderprobe/kernels.hpp"
#include "ladderprobe/states.hpp"

#include <complex>
#include <string>
#include <vector>

// ============================================================================
// Classical probe circuit
//
// Three stages: a coupler that scales the incoming node-phase difference by
// the frequency-dependent factor beta, a flux-tunable Josephson junction
// I = I_c sin(beta dphi + phi_ext), and a damped readout loop that turns the
// junction current into the measurable output with prefactor
// Phi0 EJ_P / (2 pi L_P E_M). At phi_ext = 0 the output is linear in the
// input; at phi_ext = pi/2 it encodes the squared phase difference.
// ============================================================================

namespace ladderprobe {

enum class BetaMode { PerComponent, QuasiStatic };
enum class ChannelModel { OnePole, TwoPole, None };

/// Probe circuit parameters. SI units.
struct ProbeConfig {
    double C_S = 0.0;          ///< coupler series capacitance [F]
    double L_S = 0.0;          ///< coupler series inductance [H]
    double C_X = 0.0;          ///< coupler shunt capacitance [F]
    double L_X = 0.0;          ///< coupler shunt inductance [H]
    double EJ_P = 0.0;         ///< readout junction energy [J]
    double I_c = 0.0;          ///< tuner junction critical current [A]
    double M = 0.0;            ///< tuner mutual inductance [H]
    double L_P = 0.0;          ///< readout loop inductance [H]
    double C_P = 0.0;          ///< readout loop capacitance [F]
    double E_M = 0.0;          ///< mutual-coupling energy [J], explicit input
    double phi_ext = 0.0;      ///< control flux [rad], 0 or pi/2
    double kappa_probe = 0.0;  ///< readout photon loss rate [1/s]
    BetaMode beta_mode = BetaMode::PerComponent;
    ChannelModel channel = ChannelModel::OnePole;

    /// Throws std::invalid_argument on non-physical values.
    void validate() const;

    /// Readout loop frequency 1/sqrt(L_P C_P) [rad/s].
    [[nodiscard]] double omega_P() const;

    /// Readout loop impedance sqrt(L_P/C_P) [ohm].
    [[nodiscard]] double Z_P() const;

    /// Output current prefactor Phi0 EJ_P / (2 pi L_P E_M) [A].
    [[nodiscard]] double output_scale() const;
};

/// Uniformly sampled real record starting at t0.
struct TimeSeries {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> samples;
};

/// Coupler scale factor at angular frequency omega. Throws std::domain_error
/// near the coupler pole (denominator below 1e-9 of its DC value).
[[nodiscard]] double beta(const ProbeConfig& config, double omega);

/// Tuner junction current I_c sin(delta_phi_scaled + phi_ext).
[[nodiscard]] double junction_current(double delta_phi_scaled, double phi_ext,
                                      double I_c);

/// Simulates the probe output for node-phase inputs phi_i, phi_j. Applies the
/// coupler per Fourier component (or at DC in quasi-static mode), the junction
/// sine, the output prefactor, and the damping channel. Appends regime
/// warnings (scaled drive above 0.5 rad) to *warnings when given; throws
/// std::domain_error when the scaled drive reaches 1 rad or the sampling is
/// too coarse for the input band.
[[nodiscard]] TimeSeries simulate_readout(const TimeSeries& phi_i,
                                          const TimeSeries& phi_j,
                                          const ProbeConfig& config,
                                          std::vector<std::string>* warnings = nullptr);

/// One predicted single-frequency output component, value(t) = Re[amp e^{-iwt}].
struct SpectralComponent {
    double omega = 0.0;
    std::complex<double> amplitude;
};

/// Closed-form prediction of the probe output components for a correlation
/// set observed through nodes with mode coefficient vectors coeffs_i/coeffs_j
/// (coeffs_j empty means the second lead is grounded). phi_ext must be 0 or
/// pi/2. dt > 0 evaluates the one-pole channel at its exact sampled response
/// so predictions can be compared with simulate_readout records; dt = 0 uses
/// the continuous-time response.
[[nodiscard]] std::vector<SpectralComponent> predicted_fourier_components(
    const CorrelationSet& corr, const std::vector<double>& coeffs_i,
    const std::vector<double>& coeffs_j, const ProbeConfig& config,
    double dt = 0.0);

/// Complex response of the configured damping channel at angular frequency
/// omega (dt as in predicted_fourier_components).
[[nodiscard]] std::complex<double> channel_response(const ProbeConfig& config,
                                                    double omega, double dt = 0.0);

/// Design-regime observations: readout impedance versus the system impedance,
/// and the readout frequency versus the system mode spacing.
[[nodiscard]] std::vector<std::string> probe_regime_report(const ProbeConfig& config,
                                                           double omega0, double Z0);

/// Synthesizes a node-phase record from tones (for probe bench runs).
[[nodiscard]] TimeSeries synthesize_tones(const std::vector<kernels::Tone>& tones,
                                          double t0, double dt, std::size_t count);

} // namespace ladderprobe
