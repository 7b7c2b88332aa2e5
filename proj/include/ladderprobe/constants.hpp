#pragma once

// ============================================================================
// Physical constants (SI, CODATA 2018 exact values where defined)
// ============================================================================

namespace ladderprobe::constants {

inline constexpr double pi       = 3.14159265358979323846;
inline constexpr double e_charge = 1.602176634e-19;       ///< elementary charge [C]
inline constexpr double h_planck = 6.62607015e-34;        ///< Planck constant [J s]
inline constexpr double hbar     = h_planck / (2.0 * pi); ///< reduced Planck constant [J s]
inline constexpr double phi0     = h_planck / (2.0 * e_charge); ///< flux quantum [Wb]
inline constexpr double phi0_red = phi0 / (2.0 * pi);     ///< reduced flux quantum [Wb]

} // namespace ladderprobe::constants
