#pragma once

#include "ladderprobe/dynamics.hpp"
#include "ladderprobe/extraction.hpp"
#include "ladderprobe/spectrum.hpp"
#include "ladderprobe/states.hpp"
#include "ladderprobe/units.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

// ============================================================================
// Experiment configuration
//
// A single structured text file with [section] headers and key = value lines.
// Values are bare numbers/integers/booleans for dimensionless settings,
// quoted unit strings ("254 pH", "3 GHz h") for physical quantities, or
// [a, b, c] arrays. Every getter reports the file name and line number on
// error. Two presets reproduce the published parameter tables verbatim,
// inconsistencies flagged in comments.
// ============================================================================

namespace ladderprobe {

/// One parsed value occurrence.
struct ConfigValue {
    std::string text;               ///< scalar token, quotes stripped
    bool quoted = false;
    bool is_array = false;
    std::vector<std::string> items; ///< array elements, quotes stripped
    std::vector<bool> item_quoted;
    long line = 0;
};

class ConfigFile {
public:
    /// Parses config text; origin names the source in diagnostics.
    static ConfigFile parse_text(const std::string& text, std::string origin);
    static ConfigFile load(const std::filesystem::path& path);

    [[nodiscard]] bool has(const std::string& section, const std::string& key) const;

    [[nodiscard]] std::string get_string(const std::string& section,
                                         const std::string& key) const;
    [[nodiscard]] std::string get_string(const std::string& section,
                                         const std::string& key,
                                         const std::string& fallback) const;
    [[nodiscard]] double get_number(const std::string& section,
                                    const std::string& key, double fallback) const;
    [[nodiscard]] long get_integer(const std::string& section,
                                   const std::string& key) const;
    [[nodiscard]] long get_integer(const std::string& section,
                                   const std::string& key, long fallback) const;
    [[nodiscard]] bool get_bool(const std::string& section, const std::string& key,
                                bool fallback) const;

    /// Physical quantity: requires a quoted "<number> <unit>" string.
    [[nodiscard]] double get_quantity(const std::string& section,
                                      const std::string& key, Dimension dim) const;
    [[nodiscard]] double get_quantity(const std::string& section,
                                      const std::string& key, Dimension dim,
                                      double fallback) const;

    [[nodiscard]] std::vector<double> get_number_list(const std::string& section,
                                                      const std::string& key) const;
    [[nodiscard]] std::vector<long> get_integer_list(const std::string& section,
                                                     const std::string& key) const;
    [[nodiscard]] std::vector<double> get_quantity_list(const std::string& section,
                                                        const std::string& key,
                                                        Dimension dim) const;

    /// Rejects keys outside the allowed set (catches typos with line info).
    void require_known(const std::string& section,
                       const std::vector<std::string>& allowed) const;

    [[nodiscard]] const std::string& origin() const { return origin_; }

private:
    [[nodiscard]] const ConfigValue& at(const std::string& section,
                                        const std::string& key) const;
    [[noreturn]] void fail(const ConfigValue& value, const std::string& section,
                           const std::string& key, const std::string& why) const;

    std::string origin_;
    std::map<std::string, std::map<std::string, ConfigValue>> sections_;
};

/// Integration and steady-state controls for the dynamics stage.
struct DynamicsRun {
    double duration = 0.0;          ///< [s]
    double gamma_override = 0.0;    ///< [1/s], 0 = default cascade rate
    IntegratorOptions integrator{};
    SteadyStateOptions steady{};
};

/// Trial-state construction controls.
struct StateSpec {
    StateKind kind = StateKind::Squeezed;
    double t_star = 0.0;            ///< squeezing build-up time [s]
    int drive_sum = 0;              ///< pair-sum index, 0 = ladder drive mode
    std::vector<double> populations;   ///< inline mode populations, optional
    std::string populations_file;      ///< steady-state file, optional
    std::vector<long> occupations;     ///< Fock occupations, optional
};

/// Probe bench geometry and signal controls.
struct ProbeRun {
    int site_i = 0;
    int site_j = 0;                 ///< 0 = grounded second lead
    std::string input = "tones";   ///< "tones" or "correlations"
    std::vector<long> tone_harmonics;
    std::vector<double> tone_amplitudes; ///< [rad]
    long samples_per_period = 256;
    long periods = 32;
    Window window = Window::Rect;
    long max_peaks = 8;
    std::string correlations_file;
};

struct ExtractRun {
    std::string plan_file = "plan.jsonl";
    std::string measurements_file = "measurements.jsonl";
};

struct RunSpec {
    std::string out_dir = "out";
    std::string format = "csv";    ///< time-series format: "csv" or "jsonl"
    std::uint64_t seed = 0;
};

struct ExperimentConfig {
    LadderConfig ladder;
    DynamicsRun dynamics;
    ProbeConfig probe;
    StateSpec state;
    ProbeRun probe_run;
    ExtractRun extract;
    RunSpec run;
};

/// Builds the experiment description, validating keys and units.
[[nodiscard]] ExperimentConfig parse_experiment(const ConfigFile& file);

/// Built-in preset texts (also shipped under presets/), keyed by name.
[[nodiscard]] const std::map<std::string, std::string>& builtin_presets();

} // namespace ladderprobe
