#pragma once

#include "ladderprobe/mode_basis.hpp"

#include <vector>

// ============================================================================
// Three-wave coupling tensor
//
// At flux bias pi/2 the impurity junction's leading nonlinearity is cubic in
// the phase drop, which under the rotating-wave approximation keeps only
// energy-matched triples n + m = l. Amplitudes factorize through the overlap
// f_n = (1/sqrt(n)) sin(n pi (i0-j0)/D) cos(n pi (i0+j0)/D); the denominator
// D is 2(N+1) by default (it follows from the node-difference identity) with
// the alternative 2N+1 selectable via config.
// ============================================================================

namespace ladderprobe {

/// One retained triple with n <= m and l = n + m.
struct CouplingEntry {
    int n = 0;
    int m = 0;
    int l = 0;
    double A = 0.0;
};

/// Sparse symmetric tensor A_nml over the retained modes.
class CouplingTensor {
public:
    CouplingTensor(std::vector<CouplingEntry> entries, double g, int n_modes);

    /// Symmetric lookup; zero when the triple is absent.
    [[nodiscard]] double A(int n, int m, int l) const;

    [[nodiscard]] const std::vector<CouplingEntry>& entries() const { return entries_; }

    /// Coupling energy scale g = EJ (E_C/E_L)^(3/4) [J].
    [[nodiscard]] double g() const { return g_; }

    [[nodiscard]] int n_modes() const { return n_modes_; }

private:
    std::vector<CouplingEntry> entries_; // canonical n <= m, sorted (l, n)
    double g_;
    int n_modes_;
};

/// Mode-overlap factors f_n for impurity nodes (i0, j0), n = 1..n_modes.
[[nodiscard]] std::vector<double> coupling_overlaps(int N, int i0, int j0, int n_modes,
                                                    FnDenominator denominator);

/// Builds the RWA tensor for the basis' configured impurity. Exact zeros are
/// not stored.
[[nodiscard]] CouplingTensor build_coupling_tensor(const ModeBasis& basis);

/// As above with explicit impurity nodes (the config validator forbids
/// i0 == j0; this entry point does not, so degenerate placements can be probed).
[[nodiscard]] CouplingTensor build_coupling_tensor(const ModeBasis& basis, int i0,
                                                   int j0);

} // namespace ladderprobe
