#pragma once

#include <string>
#include <string_view>

// ============================================================================
// Unit-suffixed quantity parsing
//
// Config files carry every physical quantity as a quoted string with an
// explicit unit suffix ("254 pH", "3 GHz h", "1.2 kHz"). Bare numbers are
// rejected for dimensioned fields. Values are returned in SI units; energies
// given as a frequency times h ("3 GHz h") are converted via the Planck
// constant. Rates (kHz etc.) are plain inverse seconds.
// ============================================================================

namespace ladderprobe {

enum class Dimension {
    Inductance,       ///< henry
    Capacitance,      ///< farad
    Rate,             ///< 1/s, written with Hz-family suffixes
    Frequency,        ///< cycles/s (converted to rad/s by the caller as needed)
    AngularFrequency, ///< rad/s
    Energy,           ///< joule, or "<f> <Hz-unit> h"
    Current,          ///< ampere
    Time,             ///< second
    Angle             ///< radian
};

/// Parses "<number> <unit>" into SI units for the given dimension.
/// Throws std::invalid_argument on missing/unknown/mismatched units.
[[nodiscard]] double parse_quantity(std::string_view text, Dimension dim);

/// Human-readable dimension name for diagnostics.
[[nodiscard]] std::string_view dimension_name(Dimension dim);

} // namespace ladderprobe
