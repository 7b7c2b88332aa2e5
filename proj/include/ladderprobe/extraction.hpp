#pragma once

#include "ladderprobe/probe.hpp"

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

// ============================================================================
// Correlator extraction
//
// Inverts probe outputs back into mode-space correlators. Q amplitudes come
// from a least-squares tone fit of one linear-regime record. The pi/2
// two-body channels are degenerate in frequency on the harmonic spectrum, so
// unknowns are grouped per frequency bin and each group is solved as a small
// linear system over several site-pair measurements, with singular-value
// based rank and conditioning reports. The measurement planner greedily
// chooses site pairs to maximize the worst group's minimum singular value.
// ============================================================================

namespace ladderprobe {

enum class CorrChannel { Normal, Anomalous };

/// One unknown in the degenerate-frequency system, canonical n <= m.
struct CorrLabel {
    CorrChannel channel = CorrChannel::Normal;
    int n = 0;
    int m = 0;

    friend bool operator==(const CorrLabel&, const CorrLabel&) = default;
};

/// Unknowns sharing one frequency bin (width omega0/100). Bin b covers
/// harmonic b/100; the zero bin aggregates every static N_nn unknown.
struct DegeneracyGroup {
    long bin = 0;
    double omega = 0.0;
    std::vector<CorrLabel> labels;
};

struct DegeneracyTable {
    std::vector<DegeneracyGroup> groups; ///< ascending bin order
    int max_group_size = 0;
    double bin_width = 0.0;
};

/// Enumerates N(n,m) at |m-n| omega0 and A(n,m) at (n+m) omega0 into bins.
[[nodiscard]] DegeneracyTable degeneracy_groups(const ModeBasis& basis, int n_modes);

/// One probe run: second lead grounded when site_j = 0.
struct MeasurementEntry {
    int site_i = 0;
    int site_j = 0;
    double phi_ext = 0.0;
};

struct MeasurementPlan {
    std::vector<MeasurementEntry> entries;
    ProbeConfig probe;  ///< apparatus settings shared by every entry
    int n_modes = 0;
    std::vector<double> expected_frequencies; ///< harmonic grid covered
};

/// Result of fitting one linear-regime record.
struct QuadratureExtraction {
    Eigen::VectorXcd Q;
    std::vector<char> recoverable; ///< 0 where gamma_n(site) (or scale) ~ 0
    double condition = 0.0;        ///< of the tone-fit normal equations
};

/// Least-squares fit of a record to the harmonic tone stack, divided by
/// 2 gamma_n(site) and the optional per-mode complex scale (probe dressing).
/// Modes whose divisor is below 1e-6 of the largest are flagged instead of
/// amplified. Requires the record to span 10 periods of the fundamental.
[[nodiscard]] QuadratureExtraction extract_quadratures(
    const TimeSeries& record, const ModeBasis& basis, int site,
    const std::vector<std::complex<double>>& per_mode_scale = {});

/// Conditioning of one solved group.
struct GroupReport {
    long bin = 0;
    double omega = 0.0;
    std::size_t unknowns = 0;
    int rank = 0;
    double condition = 0.0; ///< sigma_max/sigma_min, inf when rank-deficient
    std::vector<std::pair<int, int>> suggested_pairs; ///< fills missing rank
};

struct ExtractionResult {
    CorrelationSet recovered;
    std::vector<GroupReport> reports;
    bool full_rank = true;
};

/// Solves every degeneracy group from the per-entry component lists (aligned
/// with plan.entries). The analytic vacuum contribution to the DC component
/// is subtracted before solving. Rank-deficient groups are reported with
/// suggested additional site pairs and their unknowns left at zero.
[[nodiscard]] ExtractionResult assemble_and_solve(
    const MeasurementPlan& plan,
    const std::vector<std::vector<SpectralComponent>>& measured,
    const ModeBasis& basis);

/// Greedy plan: one linear-regime entry for the Q channel, then pi/2 site
/// pairs chosen to maximize the minimum singular value across groups, until
/// every group reaches full rank (capped at max degeneracy + 2 entries).
/// The seed only breaks ties between equally good candidates.
[[nodiscard]] MeasurementPlan plan_measurements(const ModeBasis& basis, int n_modes,
                                               const ProbeConfig& probe,
                                               std::uint64_t seed = 0);

} // namespace ladderprobe
