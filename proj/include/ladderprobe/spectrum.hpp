#pragma once

#include "ladderprobe/probe.hpp"

#include <vector>

// ============================================================================
// Power spectra of readout records
//
// One-sided power spectral density normalized so that sum(psd) * dOmega
// equals the mean square of the (windowed) record, plus a local-maximum
// peak finder.
// ============================================================================

namespace ladderprobe {

enum class Window { Rect, Hann };

/// One-sided PSD over angular frequency.
struct Spectrum {
    std::vector<double> frequencies; ///< [rad/s], uniformly spaced from 0
    std::vector<double> psd;         ///< non-negative, per rad/s
};

/// Windowed one-sided PSD of a record. Throws std::invalid_argument for
/// records shorter than 2 samples.
[[nodiscard]] Spectrum power_spectrum(const TimeSeries& series,
                                      Window window = Window::Rect);

struct Peak {
    double omega = 0.0;
    double power = 0.0; ///< psd value at the peak bin
    std::size_t bin = 0;
};

/// Local maxima of the PSD sorted by descending power. exclude_dc skips the
/// leading bins up to the first local minimum.
[[nodiscard]] std::vector<Peak> find_peaks(const Spectrum& spectrum,
                                           std::size_t max_count,
                                           bool exclude_dc = true);

} // namespace ladderprobe
