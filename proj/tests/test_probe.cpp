#include "ladderprobe/constants.hpp"
#include "ladderprobe/probe.hpp"
#include "ladderprobe/spectrum.hpp"
#include "ladderprobe/states.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <set>
#include <vector>

using namespace ladderprobe;
using constants::pi;

namespace {

// Table-style bench values: the symmetric coupler (C_S = C_X, L_S = L_X)
// makes beta exactly 1/3 at every frequency, so the junction chain can be
// checked against closed forms without coupler dispersion.
ProbeConfig bench_probe() {
    ProbeConfig config;
    config.C_S = 10e-15;
    config.L_S = 100e-6;
    config.C_X = 10e-15;
    config.L_X = 100e-6;
    config.EJ_P = 3e9 * constants::h_planck;
    config.I_c = 1e-9;
    config.M = 10e-9;
    config.L_P = 1e-6;
    config.C_P = 10e-12;
    config.E_M = 3.2710189495134086e-23;
    config.phi_ext = 0.0;
    config.kappa_probe = 0.0;
    config.channel = ChannelModel::None;
    return config;
}

ProbeConfig dispersive_coupler() {
    ProbeConfig config = bench_probe();
    config.L_X = 50e-6;
    config.C_X = 5e-15;
    return config;
}

TimeSeries zero_series(const TimeSeries& like) {
    TimeSeries z = like;
    std::fill(z.samples.begin(), z.samples.end(), 0.0);
    return z;
}

/// Complex amplitude of the omega component, valid when the record covers an
/// integer number of periods: value(t) = Re[amp e^{-i omega t}].
std::complex<double> projected_amplitude(const TimeSeries& series, double omega) {
    const auto p =
        kernels::project_tone(series.samples, series.t0, series.dt, omega);
    const double n = static_cast<double>(series.samples.size());
    return {2.0 * p.cos_sum / n, 2.0 * p.sin_sum / n};
}

double mean_value(const TimeSeries& series) {
    double sum = 0.0;
    for (double v : series.samples) sum += v;
    return sum / static_cast<double>(series.samples.size());
}

TimeSeries tail(const TimeSeries& series, std::size_t skip) {
    TimeSeries t;
    t.t0 = series.t0 + static_cast<double>(skip) * series.dt;
    t.dt = series.dt;
    t.samples.assign(series.samples.begin() + static_cast<long>(skip),
                     series.samples.end());
    return t;
}

} // namespace

TEST_CASE("coupler scale factor is flat for the symmetric bench values") {
    const ProbeConfig config = bench_probe();
    for (double omega : {0.0, 5e9, 2e10})
        CHECK(std::abs(beta(config, omega) - 1.0 / 3.0) < 1e-12);
}

TEST_CASE("coupler scale factor dispersion, zero, and pole") {
    const ProbeConfig config = dispersive_coupler();
    CHECK(beta(config, 0.0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(beta(config, 5e8) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(std::abs(beta(config, 1e9)) < 1e-12);
    CHECK(beta(config, 3e9) ==
          doctest::Approx(0.6153846153846154).epsilon(1e-12));
    CHECK_THROWS_AS((void)beta(config, 1581138830.0841897), std::domain_error);
}

TEST_CASE("tuner junction current follows the biased sine") {
    CHECK(junction_current(0.0, 0.0, 1e-9) == 0.0);
    CHECK(junction_current(0.0, pi / 2, 1e-9) == doctest::Approx(1e-9));
    CHECK(junction_current(0.3, 0.0, 2e-9) ==
          doctest::Approx(2e-9 * std::sin(0.3)));
    CHECK(junction_current(-0.3, pi / 2, 2e-9) ==
          doctest::Approx(2e-9 * std::cos(0.3)));
}

TEST_CASE("readout loop quantities and output scale") {
    const ProbeConfig config = bench_probe();
    CHECK(config.omega_P() == doctest::Approx(316227766.01683795).epsilon(1e-12));
    CHECK(config.Z_P() == doctest::Approx(316.22776601683796).epsilon(1e-12));
    CHECK(config.output_scale() == doctest::Approx(20e-12).epsilon(1e-12));
}

TEST_CASE("probe config validation") {
    ProbeConfig config = bench_probe();
    config.validate();
    config.phi_ext = pi / 2;
    config.validate();

    ProbeConfig bad = bench_probe();
    bad.L_S = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = bench_probe();
    bad.phi_ext = 0.3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = bench_probe();
    bad.E_M = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("tone synthesis matches direct evaluation") {
    const std::vector<kernels::Tone> tones = {{1e9, 0.4, -0.2}, {2.5e9, -0.1, 0.7}};
    const TimeSeries series = synthesize_tones(tones, 1e-9, 2e-10, 64);
    for (std::size_t k = 0; k < series.samples.size(); ++k) {
        const double t = series.t0 + static_cast<double>(k) * series.dt;
        double expected = 0.0;
        for (const auto& tone : tones)
            expected += tone.re * std::cos(tone.omega * t) +
                        tone.im * std::sin(tone.omega * t);
        CHECK(series.samples[k] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("linear readout reproduces the Bessel harmonics of the sine") {
    // Input a cos(wt) with beta a = 0.3; sin(b cos) = 2 J1(b) cos - 2 J3(b) cos(3.)
    ProbeConfig config = bench_probe();
    const double dt = 1e-10;
    const double omega = 2.0 * pi / (64.0 * dt);
    const std::size_t n = 64 * 50;
    const TimeSeries phi_i = synthesize_tones({{omega, 0.9, 0.0}}, 0.0, dt, n);
    const TimeSeries out = simulate_readout(phi_i, zero_series(phi_i), config);

    const double K = config.output_scale();
    const double b = 0.3;
    const auto fundamental = projected_amplitude(out, omega);
    const auto third = projected_amplitude(out, 3.0 * omega);
    CHECK(std::abs(fundamental.real() - 2.0 * K * std::cyl_bessel_j(1, b)) <
          1e-9 * K);
    CHECK(std::abs(fundamental.imag()) < 1e-9 * K);
    CHECK(std::abs(third.real() + 2.0 * K * std::cyl_bessel_j(3, b)) < 1e-9 * K);
    CHECK(std::abs(mean_value(out)) < 1e-9 * K);
}

TEST_CASE("quadratic readout reproduces the Bessel harmonics of the cosine") {
    // cos(b cos) = J0(b) - 2 J2(b) cos(2.) + 2 J4(b) cos(4.)
    ProbeConfig config = bench_probe();
    config.phi_ext = pi / 2;
    const double dt = 1e-10;
    const double omega = 2.0 * pi / (64.0 * dt);
    const std::size_t n = 64 * 50;
    const TimeSeries phi_i = synthesize_tones({{omega, 0.6, 0.0}}, 0.0, dt, n);
    const TimeSeries out = simulate_readout(phi_i, zero_series(phi_i), config);

    const double K = config.output_scale();
    const double b = 0.2;
    CHECK(std::abs(mean_value(out) - K * std::cyl_bessel_j(0, b)) < 1e-9 * K);
    const auto second = projected_amplitude(out, 2.0 * omega);
    const auto fourth = projected_amplitude(out, 4.0 * omega);
    CHECK(std::abs(second.real() + 2.0 * K * std::cyl_bessel_j(2, b)) < 1e-9 * K);
    CHECK(std::abs(second.imag()) < 1e-9 * K);
    CHECK(std::abs(fourth.real() - 2.0 * K * std::cyl_bessel_j(4, b)) < 1e-9 * K);
    const auto fundamental = projected_amplitude(out, omega);
    CHECK(std::abs(fundamental) < 1e-9 * K);
}

TEST_CASE("two-tone quadratic mixing lands on the sum, difference, and doubled bins") {
    ProbeConfig config = bench_probe();
    config.phi_ext = pi / 2;
    const double dt = 1e-10;
    const std::size_t m = 256; // samples per fundamental period
    const double Omega = 2.0 * pi / (static_cast<double>(m) * dt);
    const std::size_t n = m * 24;
    const TimeSeries phi_i = synthesize_tones(
        {{3.0 * Omega, 0.45, 0.0}, {4.0 * Omega, 0.45, 0.0}}, 0.0, dt, n);
    const TimeSeries out = simulate_readout(phi_i, zero_series(phi_i), config);

    const Spectrum spectrum = power_spectrum(out, Window::Rect);
    const auto peaks = find_peaks(spectrum, 4);
    REQUIRE(peaks.size() == 4);
    const std::set<std::size_t> bins = {peaks[0].bin, peaks[1].bin,
                                        peaks[2].bin, peaks[3].bin};
    const std::size_t base = n / m;
    CHECK(bins == std::set<std::size_t>{base, 6 * base, 7 * base, 8 * base});
    // Difference and sum intermods outrank the doubled tones.
    const std::set<std::size_t> top2 = {peaks[0].bin, peaks[1].bin};
    CHECK(top2 == std::set<std::size_t>{base, 7 * base});

    // Exact product-of-Bessel amplitudes: cos(X + Y) = cosX cosY - sinX sinY
    // puts -2 J1(b)^2 on the sum and difference intermods.
    const double K = config.output_scale();
    const double b = 0.15;
    const double J1 = std::cyl_bessel_j(1, b);
    const auto sum_amp = projected_amplitude(out, 7.0 * Omega);
    const auto diff_amp = projected_amplitude(out, Omega);
    CHECK(std::abs(sum_amp.real() + 2.0 * K * J1 * J1) < 1e-9 * K);
    CHECK(std::abs(diff_amp.real() + 2.0 * K * J1 * J1) < 1e-9 * K);
    const auto dbl_amp = projected_amplitude(out, 6.0 * Omega);
    CHECK(std::abs(dbl_amp.real() +
                   2.0 * K * std::cyl_bessel_j(2, b) * std::cyl_bessel_j(0, b)) <
          1e-9 * K);
}

TEST_CASE("rectangular-window spectrum preserves the mean square") {
    TimeSeries series;
    series.t0 = 0.0;
    series.dt = 1e-9;
    std::mt19937_64 rng(77);
    std::normal_distribution<double> gauss(0.0, 1.0);
    series.samples.resize(1024);
    for (auto& v : series.samples) v = gauss(rng);

    const Spectrum spectrum = power_spectrum(series, Window::Rect);
    REQUIRE(spectrum.psd.size() == 513);
    const double domega = spectrum.frequencies[1] - spectrum.frequencies[0];
    double total = 0.0;
    for (double p : spectrum.psd) total += p * domega;
    const double ms = kernels::sum_squares(series.samples) / 1024.0;
    CHECK(total == doctest::Approx(ms).epsilon(1e-9));
}

TEST_CASE("Hann window concentrates a bin-centred tone") {
    const double dt = 1e-9;
    const std::size_t n = 1024;
    const double omega = 2.0 * pi * 32.0 / (static_cast<double>(n) * dt);
    const TimeSeries series = synthesize_tones({{omega, 1.0, 0.0}}, 0.0, dt, n);
    const Spectrum spectrum = power_spectrum(series, Window::Hann);

    double total = 0.0, local = 0.0;
    for (std::size_t k = 0; k < spectrum.psd.size(); ++k) {
        total += spectrum.psd[k];
        if (k >= 30 && k <= 34) local += spectrum.psd[k];
    }
    CHECK(local / total > 0.999);
}

TEST_CASE("peak finder sorts by power and skips the dc lobe") {
    ProbeConfig config = bench_probe();
    config.phi_ext = pi / 2; // large dc component from the cosine
    const double dt = 1e-10;
    const double omega = 2.0 * pi / (64.0 * dt);
    const std::size_t n = 64 * 32;
    const TimeSeries phi_i = synthesize_tones({{omega, 0.6, 0.0}}, 0.0, dt, n);
    const TimeSeries out = simulate_readout(phi_i, zero_series(phi_i), config);
    const Spectrum spectrum = power_spectrum(out, Window::Rect);

    const auto peaks = find_peaks(spectrum, 2);
    REQUIRE(peaks.size() >= 1);
    CHECK(peaks[0].bin == n / 32); // 2 omega bin
    CHECK(peaks[0].bin != 0);
    if (peaks.size() > 1) CHECK(peaks[0].power >= peaks[1].power);
}

TEST_CASE("sampling guard rejects a coarse record") {
    ProbeConfig config = bench_probe();
    const double dt = 1e-10;
    const double omega = 2.0 * pi / (10.0 * dt); // 10 samples per period
    const TimeSeries phi_i = synthesize_tones({{omega, 0.1, 0.0}}, 0.0, dt, 640);
    CHECK_THROWS_AS((void)simulate_readout(phi_i, zero_series(phi_i), config),
                    std::domain_error);
}

TEST_CASE("junction regime guard warns and then refuses") {
    ProbeConfig config = bench_probe();
    const double dt = 1e-10;
    const double omega = 2.0 * pi / (64.0 * dt);

    const TimeSeries loud = synthesize_tones({{omega, 3.15, 0.0}}, 0.0, dt, 640);
    CHECK_THROWS_AS((void)simulate_readout(loud, zero_series(loud), config),
                    std::domain_error);

    const TimeSeries warm = synthesize_tones({{omega, 1.8, 0.0}}, 0.0, dt, 640);
    std::vector<std::string> warnings;
    (void)simulate_readout(warm, zero_series(warm), config, &warnings);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("0.5") != std::string::npos);

    const TimeSeries quiet = synthesize_tones({{omega, 0.9, 0.0}}, 0.0, dt, 640);
    warnings.clear();
    (void)simulate_readout(quiet, zero_series(quiet), config, &warnings);
    CHECK(warnings.empty());
}

TEST_CASE("one-pole channel matches its exact sampled response") {
    const double dt = 1e-10;
    const double omega = 2.0 * pi / (64.0 * dt);
    const std::size_t n = 64 * 120;
    const TimeSeries phi_i = synthesize_tones({{omega, 0.15, 0.0}}, 0.0, dt, n);
    const TimeSeries ground = zero_series(phi_i);

    ProbeConfig flat = bench_probe();
    const TimeSeries reference = simulate_readout(phi_i, ground, flat);

    ProbeConfig damped = bench_probe();
    damped.channel = ChannelModel::OnePole;
    damped.kappa_probe = 5e7;
    const TimeSeries filtered = simulate_readout(phi_i, ground, damped);

    const std::size_t skip = 64 * 62; // integer periods, transient ~ e^{-20}
    const auto ref_amp = projected_amplitude(tail(reference, skip), omega);
    const auto out_amp = projected_amplitude(tail(filtered, skip), omega);
    const std::complex<double> expected = channel_response(damped, omega, dt);
    CHECK(std::abs(out_amp / ref_amp - expected) < 1e-6 * std::abs(expected));

    // Discrete and continuous responses differ at finite sampling.
    const std::complex<double> continuous = channel_response(damped, omega);
    CHECK(std::abs(expected - continuous) > 1e-3 * std::abs(continuous));

    // Unity dc gain: a constant input passes through unchanged.
    TimeSeries flat_in;
    flat_in.t0 = 0.0;
    flat_in.dt = dt;
    flat_in.samples.assign(256, 0.2);
    const TimeSeries flat_out = simulate_readout(flat_in, zero_series(flat_in), damped);
    for (double v : flat_out.samples)
        CHECK(v == doctest::Approx(flat_out.samples[0]).epsilon(1e-12));
}

TEST_CASE("two-pole channel resonates at the loop frequency and settles at dc") {
    const double dt = 2e-10;
    const double omega = 2.0 * pi / (100.0 * dt); // near omega_P = 3.16e8
    const std::size_t n = 100 * 160;
    const TimeSeries phi_i = synthesize_tones({{omega, 0.15, 0.0}}, 0.0, dt, n);
    const TimeSeries ground = zero_series(phi_i);

    ProbeConfig flat = bench_probe();
    const TimeSeries reference = simulate_readout(phi_i, ground, flat);

    ProbeConfig resonant = bench_probe();
    resonant.channel = ChannelModel::TwoPole;
    resonant.kappa_probe = resonant.omega_P() / 20.0;
    const TimeSeries filtered = simulate_readout(phi_i, ground, resonant);

    const std::size_t skip = 100 * 60;
    const auto ref_amp = projected_amplitude(tail(reference, skip), omega);
    const auto out_amp = projected_amplitude(tail(filtered, skip), omega);
    // The held input adds a half-sample phase lag, so compare moduli.
    const std::complex<double> expected = channel_response(resonant, omega);
    CHECK(std::abs(std::abs(out_amp / ref_amp) - std::abs(expected)) <
          0.01 * std::abs(expected));
    CHECK(std::abs(out_amp / ref_amp) > 5.0); // resonant gain, Q = 10

    TimeSeries step;
    step.t0 = 0.0;
    step.dt = dt;
    step.samples.assign(n, 0.2);
    const TimeSeries settled = simulate_readout(step, zero_series(step), resonant);
    CHECK(settled.samples[n - 1] ==
          doctest::Approx(settled.samples[0]).epsilon(1e-6));
}

TEST_CASE("quasi-static coupler mode applies the dc scale factor") {
    ProbeConfig per_component = dispersive_coupler();
    ProbeConfig quasi_static = dispersive_coupler();
    quasi_static.beta_mode = BetaMode::QuasiStatic;

    const double dt = 2e-10;
    const double omega = 5e8; // beta = 1/6 there, beta(0) = 0.2
    const std::size_t n = 4096;
    const TimeSeries phi_i = synthesize_tones({{omega, 0.3, 0.0}}, 0.0, dt, n);
    const TimeSeries ground = zero_series(phi_i);

    const auto pc = simulate_readout(phi_i, ground, per_component);
    const auto qs = simulate_readout(phi_i, ground, quasi_static);
    const auto pc_amp = projected_amplitude(pc, omega);
    const auto qs_amp = projected_amplitude(qs, omega);
    CHECK(qs_amp.real() / pc_amp.real() ==
          doctest::Approx(0.2 / (1.0 / 6.0)).epsilon(1e-3));
}

TEST_CASE("predicted components match a simulated coherent record") {
    LadderConfig ladder;
    ladder.N = 51;
    ladder.L = 254e-12;
    ladder.C = 100e-15;
    ladder.n_modes = 4;
    const ModeBasis basis = build_mode_basis(ladder);
    const int site = 4;

    Eigen::VectorXcd alpha(4);
    alpha << std::polar(1.2, 0.3), std::polar(1.0, -1.2), std::polar(0.9, 2.0),
        std::polar(0.8, 0.9);
    const CorrelationSet corr = correlations(make_coherent(alpha), basis);

    std::vector<double> coeffs(4);
    std::vector<kernels::Tone> tones;
    for (int n = 1; n <= 4; ++n) {
        coeffs[n - 1] = basis.gamma(n, site);
        const std::complex<double> amp = 2.0 * basis.gamma(n, site) * alpha(n - 1);
        tones.push_back({basis.harmonic_omega(n), amp.real(), amp.imag()});
    }

    const double period = 2.0 * pi / basis.omega0();
    const double dt = period / 256.0;
    const std::size_t n_samples = 256 * 40;
    const TimeSeries phi_i = synthesize_tones(tones, 0.0, dt, n_samples);
    const TimeSeries ground = zero_series(phi_i);

    for (double phi_ext : {pi / 2, 0.0}) {
        ProbeConfig config = bench_probe();
        config.phi_ext = phi_ext;
        const TimeSeries out = simulate_readout(phi_i, ground, config);
        const auto predicted =
            predicted_fourier_components(corr, coeffs, {}, config);

        double max_osc = 0.0;
        for (const auto& comp : predicted)
            if (comp.omega > 0.0) max_osc = std::max(max_osc, std::abs(comp.amplitude));

        for (const auto& comp : predicted) {
            if (comp.omega == 0.0) {
                // The classical record carries no zero-point part; the
                // prediction shifts the dc level by K/2 sum (beta c)^2.
                double zp = 0.0;
                for (double c : coeffs) {
                    const double bc = beta(config, 0.0) * c;
                    zp += 0.5 * config.output_scale() * bc * bc;
                }
                const double sim_dc = mean_value(out);
                CHECK(std::abs(sim_dc - (comp.amplitude.real() + zp)) < 0.05 * zp);
                continue;
            }
            if (std::abs(comp.amplitude) < 1e-3 * max_osc) continue;
            const auto measured = projected_amplitude(out, comp.omega);
            CHECK(std::abs(measured - comp.amplitude) <
                  0.05 * std::abs(comp.amplitude));
        }
        REQUIRE(!predicted.empty());
    }
}

TEST_CASE("predicted components validate coefficient sizes") {
    const CorrelationSet corr(3, 1e9);
    ProbeConfig config = bench_probe();
    CHECK_THROWS_AS(
        (void)predicted_fourier_components(corr, {0.1, 0.2}, {}, config),
        std::invalid_argument);
    CHECK_THROWS_AS((void)predicted_fourier_components(corr, {0.1, 0.2, 0.3},
                                                       {0.1}, config),
                    std::invalid_argument);
}

TEST_CASE("regime report describes impedance and bandwidth context") {
    const ProbeConfig config = bench_probe();
    const auto slow = probe_regime_report(config, 1.2e10, 50.0);
    REQUIRE(slow.size() == 1);
    CHECK(slow[0].find("slow") != std::string::npos);

    const auto mismatched = probe_regime_report(config, 1.2e10, 400.0);
    REQUIRE(mismatched.size() == 2);
    CHECK(mismatched[0].find("does not exceed") != std::string::npos);
}
