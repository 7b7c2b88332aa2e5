#pragma once

#include "ladderprobe/states.hpp"

#include <stdexcept>

// ============================================================================
// Brute-force correlator oracle
//
// Builds explicit truncated-Fock operators for the active modes, prepares the
// state by applying squeeze exponentials first and displacement exponentials
// after (matching the ansatz ordering), and reads the correlators off as
// operator expectation values. Entirely independent of the closed forms.
// ============================================================================

namespace ladderprobe {

/// Thrown when probability mass at the top Fock level exceeds the threshold.
class TruncationError : public std::runtime_error {
public:
    TruncationError(int mode, double mass);
    [[nodiscard]] int mode() const { return mode_; }
    [[nodiscard]] double mass() const { return mass_; }

private:
    int mode_;
    double mass_;
};

/// Expectation-value correlators of the state on a truncated Fock space.
/// At most 3 modes may be simultaneously active (nonzero alpha/occupation or
/// pair membership); more throws std::invalid_argument. Throws TruncationError
/// when top-level mass exceeds overflow_threshold.
[[nodiscard]] CorrelationSet fock_space_oracle(const TrialState& state,
                                               const ModeBasis& basis,
                                               int truncation,
                                               double overflow_threshold = 1e-10);

} // namespace ladderprobe
