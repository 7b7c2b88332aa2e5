#include "ladderprobe/spectrum.hpp"

#include "ladderprobe/constants.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace ladderprobe {

using constants::pi;

Spectrum power_spectrum(const TimeSeries& series, Window window) {
    const std::size_t n = series.samples.size();
    if (n < 2) throw std::invalid_argument("power spectrum: need at least 2 samples");
    if (series.dt <= 0.0)
        throw std::invalid_argument("power spectrum: sample spacing must be positive");

    std::unique_ptr<double, decltype(&fftw_free)> in(fftw_alloc_real(n), fftw_free);
    const std::size_t bins = n / 2 + 1;
    std::unique_ptr<fftw_complex, decltype(&fftw_free)> out(fftw_alloc_complex(bins),
                                                            fftw_free);

    double window_power = 1.0;
    if (window == Window::Rect) {
        std::copy(series.samples.begin(), series.samples.end(), in.get());
    } else {
        window_power = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double w =
                0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(k) /
                                      static_cast<double>(n)));
            in.get()[k] = w * series.samples[k];
            window_power += w * w;
        }
        window_power /= static_cast<double>(n);
    }

    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(),
                                          FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    Spectrum spectrum;
    spectrum.frequencies.resize(bins);
    spectrum.psd.resize(bins);
    const double domega = 2.0 * pi / (static_cast<double>(n) * series.dt);
    const double norm = 1.0 / (static_cast<double>(n) * static_cast<double>(n) *
                               window_power * domega);
    for (std::size_t k = 0; k < bins; ++k) {
        spectrum.frequencies[k] = static_cast<double>(k) * domega;
        const double mag2 = out.get()[k][0] * out.get()[k][0] +
                            out.get()[k][1] * out.get()[k][1];
        const bool shared = (k == 0) || (n % 2 == 0 && k == bins - 1);
        spectrum.psd[k] = (shared ? 1.0 : 2.0) * mag2 * norm;
    }
    return spectrum;
}

std::vector<Peak> find_peaks(const Spectrum& spectrum, std::size_t max_count,
                             bool exclude_dc) {
    const std::size_t bins = spectrum.psd.size();
    std::vector<Peak> peaks;
    if (bins < 3) return peaks;

    std::size_t start = 1;
    if (exclude_dc) {
        // Skip the DC lobe: advance to the first local minimum.
        while (start + 1 < bins && spectrum.psd[start] <= spectrum.psd[start - 1])
            ++start;
    }
    for (std::size_t k = std::max<std::size_t>(start, 1); k + 1 < bins; ++k) {
        if (spectrum.psd[k] > spectrum.psd[k - 1] &&
            spectrum.psd[k] >= spectrum.psd[k + 1])
            peaks.push_back({spectrum.frequencies[k], spectrum.psd[k], k});
    }
    std::stable_sort(peaks.begin(), peaks.end(),
                     [](const Peak& a, const Peak& b) { return a.power > b.power; });
    if (peaks.size() > max_count) peaks.resize(max_count);
    return peaks;
}

} // namespace ladderprobe
