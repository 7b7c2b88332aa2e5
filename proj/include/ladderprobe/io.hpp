#pragma once

#include "ladderprobe/dynamics.hpp"
#include "ladderprobe/extraction.hpp"
#include "ladderprobe/probe.hpp"
#include "ladderprobe/spectrum.hpp"
#include "ladderprobe/states.hpp"

#include <iosfwd>
#include <string>
#include <vector>

// ============================================================================
// File formats
//
// Two formats cover every artifact: CSV with a header row for sampled data
// (trajectories, time series, spectra) and JSON lines for structured records
// (correlator sets, steady states, measurement plans, extraction reports).
// Every JSON-lines file opens with a meta record carrying schema_version;
// numeric fields round-trip losslessly and writers are deterministic, so a
// repeated run produces byte-identical files.
// ============================================================================

namespace ladderprobe {

namespace io {

inline constexpr int schema_version = 1;

// --- CSV ---

void write_trajectory_csv(std::ostream& out, const PopulationTrajectory& trajectory);
void write_timeseries_csv(std::ostream& out, const TimeSeries& series);
void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum);

// --- JSON lines ---

void write_timeseries_jsonl(std::ostream& out, const TimeSeries& series);
void write_trajectory_jsonl(std::ostream& out, const PopulationTrajectory& trajectory);
void write_spectrum_jsonl(std::ostream& out, const Spectrum& spectrum);

void write_steady_state(std::ostream& out, const SteadyStateResult& result,
                        const RateModel& model);

/// Reads mode populations back from a steady-state record.
[[nodiscard]] Eigen::VectorXd read_populations(std::istream& in);

/// Correlator sets (Q, N, A) share one schema between the trial-state writer
/// and the extraction output, so recovered sets diff directly against truth.
void write_correlations(std::ostream& out, const CorrelationSet& corr);
[[nodiscard]] CorrelationSet read_correlations(std::istream& in);

void write_peaks(std::ostream& out, const std::vector<Peak>& peaks);

void write_plan(std::ostream& out, const MeasurementPlan& plan);
[[nodiscard]] MeasurementPlan read_plan(std::istream& in);

/// Per-plan-entry lists of measured output components.
void write_measurements(std::ostream& out,
                        const std::vector<std::vector<SpectralComponent>>& measured);
[[nodiscard]] std::vector<std::vector<SpectralComponent>>
read_measurements(std::istream& in);

/// Solver diagnostics: one record per degeneracy group plus a summary line.
void write_extraction_report(std::ostream& out, const ExtractionResult& result);

/// Formats a double with enough digits to round-trip exactly.
[[nodiscard]] std::string format_double(double value);

} // namespace io

} // namespace ladderprobe
