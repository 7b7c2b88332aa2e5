#include "ladderprobe/config.hpp"
#include "ladderprobe/constants.hpp"
#include "ladderprobe/coupling.hpp"
#include "ladderprobe/dynamics.hpp"
#include "ladderprobe/extraction.hpp"
#include "ladderprobe/io.hpp"
#include "ladderprobe/kernels.hpp"
#include "ladderprobe/mode_basis.hpp"
#include "ladderprobe/probe.hpp"
#include "ladderprobe/spectrum.hpp"
#include "ladderprobe/states.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

// ============================================================================
// Command line front end
//
// Every subcommand reads one experiment config (a file via --config or a
// built-in table via --preset), writes its artifacts under [run].out_dir, and
// prints a short deterministic summary. Exit codes: 0 success, 1 usage or
// config error, 2 solver non-convergence or rank deficiency, 3 operating
// regime violation.
// ============================================================================

namespace {

using namespace ladderprobe;
namespace fs = std::filesystem;

struct CommonOptions {
    std::string config_path;
    std::string preset;
    std::string out_dir;
    std::string format;
    std::string kernels;
    long long seed = -1;
};

void add_common(CLI::App* sub, CommonOptions& options) {
    sub->add_option("--config", options.config_path, "experiment config file");
    sub->add_option("--preset", options.preset,
                    "built-in parameter set (table1_system, table2_probe)");
    sub->add_option("--seed", options.seed, "override [run].seed");
    sub->add_option("--out-dir", options.out_dir, "override [run].out_dir");
    sub->add_option("--format", options.format, "override [run].format")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    sub->add_option("--kernels", options.kernels, "force the sample kernel backend")
        ->check(CLI::IsMember({"scalar", "avx2"}));
}

ExperimentConfig load_experiment(const CommonOptions& options) {
    if (options.config_path.empty() == options.preset.empty())
        throw std::invalid_argument("provide exactly one of --config or --preset");

    ConfigFile file;
    if (!options.preset.empty()) {
        const auto& presets = builtin_presets();
        const auto found = presets.find(options.preset);
        if (found == presets.end()) {
            std::string known;
            for (const auto& [name, text] : presets) {
                (void)text;
                if (!known.empty()) known += ", ";
                known += name;
            }
            throw std::invalid_argument("unknown preset '" + options.preset +
                                        "' (available: " + known + ")");
        }
        file = ConfigFile::parse_text(found->second, "preset:" + options.preset);
    } else {
        file = ConfigFile::load(options.config_path);
    }

    auto config = parse_experiment(file);
    if (!options.out_dir.empty()) config.run.out_dir = options.out_dir;
    if (!options.format.empty()) config.run.format = options.format;
    if (options.seed >= 0) config.run.seed = static_cast<std::uint64_t>(options.seed);

    if (!options.kernels.empty()) {
        const auto backend = options.kernels == "avx2" ? kernels::Backend::Avx2
                                                       : kernels::Backend::Scalar;
        if (!kernels::backend_supported(backend))
            throw std::invalid_argument("kernel backend '" + options.kernels +
                                        "' is not supported on this host");
        kernels::force_backend(backend);
    }
    return config;
}

fs::path out_path(const ExperimentConfig& config, const std::string& name) {
    fs::create_directories(config.run.out_dir);
    return fs::path(config.run.out_dir) / name;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

void note(const fs::path& path) { std::cout << "wrote " << path.string() << '\n'; }

Eigen::VectorXd resolve_populations(const ExperimentConfig& config) {
    const int n_modes = config.ladder.n_modes;
    if (!config.state.populations.empty()) {
        if (static_cast<int>(config.state.populations.size()) != n_modes)
            throw std::invalid_argument(
                "[state].populations must list one value per mode");
        Eigen::VectorXd populations(n_modes);
        for (int n = 0; n < n_modes; ++n)
            populations(n) = config.state.populations[static_cast<std::size_t>(n)];
        return populations;
    }

    const fs::path path = config.state.populations_file.empty()
                              ? fs::path(config.run.out_dir) / "steady_state.jsonl"
                              : fs::path(config.state.populations_file);
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument(
            "no populations available: set [state].populations, "
            "[state].populations_file, or run the dynamics subcommand first "
            "(looked for '" + path.string() + "')");
    Eigen::VectorXd populations = io::read_populations(in);
    if (populations.size() != n_modes)
        throw std::invalid_argument("populations in '" + path.string() +
                                    "' do not match [ladder].n_modes");
    return populations;
}

std::vector<double> site_coefficients(const ModeBasis& basis, int n_modes, int site) {
    std::vector<double> coeffs(static_cast<std::size_t>(n_modes));
    for (int n = 1; n <= n_modes; ++n)
        coeffs[static_cast<std::size_t>(n - 1)] = basis.gamma(n, site);
    return coeffs;
}

int run_dynamics(const ExperimentConfig& config) {
    const auto basis = build_mode_basis(config.ladder);
    const auto model =
        build_rate_model(basis, build_coupling_tensor(basis), config.dynamics.gamma_override);

    bool wrote_any = false;
    if (config.dynamics.duration > 0.0) {
        const auto trajectory =
            evolve(model, Eigen::VectorXd::Zero(config.ladder.n_modes), 0.0,
                   config.dynamics.duration, config.dynamics.integrator);
        const bool csv = config.run.format == "csv";
        const auto path = out_path(config, csv ? "trajectory.csv" : "trajectory.jsonl");
        auto out = open_out(path);
        if (csv) io::write_trajectory_csv(out, trajectory);
        else io::write_trajectory_jsonl(out, trajectory);
        note(path);
        std::cout << "integrated " << trajectory.t.size() << " output points ("
                  << trajectory.accepted_steps << " accepted, "
                  << trajectory.rejected_steps << " rejected steps)\n";
        wrote_any = true;
    }

    if (config.ladder.kappa > 0.0) {
        const auto result = steady_state(model, config.dynamics.steady);
        const auto path = out_path(config, "steady_state.jsonl");
        auto out = open_out(path);
        io::write_steady_state(out, result, model);
        note(path);
        std::cout << "steady state " << (result.converged ? "converged" : "FAILED")
                  << " (residual " << io::format_double(result.residual) << ", "
                  << result.newton_iterations << " Newton iterations)\n";
        if (!result.converged) {
            std::cerr << "steady state did not converge\n";
            return 2;
        }
        wrote_any = true;
    }

    if (!wrote_any)
        throw std::invalid_argument(
            "nothing to do: set [dynamics].duration or [dynamics].kappa");
    return 0;
}

int run_correlations(const ExperimentConfig& config) {
    const auto basis = build_mode_basis(config.ladder);
    const int n_modes = config.ladder.n_modes;

    TrialState state = [&] {
        switch (config.state.kind) {
        case StateKind::Fock: {
            Eigen::VectorXi occupations(n_modes);
            if (!config.state.occupations.empty()) {
                if (static_cast<int>(config.state.occupations.size()) != n_modes)
                    throw std::invalid_argument(
                        "[state].occupations must list one value per mode");
                for (int n = 0; n < n_modes; ++n)
                    occupations(n) = static_cast<int>(
                        config.state.occupations[static_cast<std::size_t>(n)]);
            } else {
                const auto populations = resolve_populations(config);
                for (int n = 0; n < n_modes; ++n)
                    occupations(n) = static_cast<int>(std::llround(populations(n)));
            }
            return make_fock(occupations);
        }
        case StateKind::Coherent: {
            const auto alpha = alphas_from_populations(
                resolve_populations(config),
                random_phases(config.run.seed, n_modes));
            return make_coherent(alpha);
        }
        default: {
            const auto alpha = alphas_from_populations(
                resolve_populations(config),
                random_phases(config.run.seed, n_modes));
            const int drive_sum = config.state.drive_sum > 0
                                      ? config.state.drive_sum
                                      : config.ladder.drive_mode;
            if (drive_sum < 1 || drive_sum > n_modes)
                throw std::invalid_argument(
                    "squeezed state needs [state].drive_sum in [1, n_modes]");
            if (config.state.t_star <= 0.0)
                throw std::invalid_argument(
                    "squeezed state needs [state].t_star > 0");
            const auto pairing = auto_pairing(drive_sum, n_modes);
            const auto xi =
                derive_xi(alpha(drive_sum - 1), build_coupling_tensor(basis),
                          pairing, drive_sum, config.state.t_star);
            return make_squeezed(alpha, pairing, xi, drive_sum);
        }
        }
    }();

    const auto corr = correlations(state, basis);
    const auto path = out_path(config, "correlations.jsonl");
    auto out = open_out(path);
    io::write_correlations(out, corr);
    note(path);

    const auto measure = squeezing_measure(corr);
    double max_s = 0.0;
    for (int n = 1; n <= n_modes; ++n)
        for (int m = 1; m <= n_modes; ++m)
            max_s = std::max(max_s, measure.magnitude(n, m));
    std::cout << "max |S| = " << io::format_double(max_s) << '\n';
    return 0;
}

int run_plan(const ExperimentConfig& config) {
    const auto basis = build_mode_basis(config.ladder);
    config.probe.validate();
    const auto plan = plan_measurements(basis, config.ladder.n_modes, config.probe,
                                        config.run.seed);
    const auto path = out_path(config, config.extract.plan_file);
    auto out = open_out(path);
    io::write_plan(out, plan);
    note(path);
    std::cout << "planned " << plan.entries.size() << " measurement settings over "
              << plan.expected_frequencies.size() << " output frequencies\n";
    return 0;
}

int run_probe(const ExperimentConfig& config) {
    const auto basis = build_mode_basis(config.ladder);
    config.probe.validate();

    if (config.probe_run.samples_per_period < 2)
        throw std::invalid_argument("[probe].samples_per_period must be at least 2");
    if (config.probe_run.periods < 1)
        throw std::invalid_argument("[probe].periods must be at least 1");
    const double omega0 = basis.omega0();
    const double dt = (2.0 * constants::pi / omega0) /
                      static_cast<double>(config.probe_run.samples_per_period);
    const auto count = static_cast<std::size_t>(config.probe_run.samples_per_period *
                                                config.probe_run.periods);

    TimeSeries output;
    std::vector<std::string> warnings;

    if (config.probe_run.input == "tones") {
        if (config.probe_run.tone_harmonics.empty())
            throw std::invalid_argument("tones input needs [probe].tone_harmonics");
        if (config.probe_run.tone_amplitudes.size() !=
            config.probe_run.tone_harmonics.size())
            throw std::invalid_argument(
                "[probe].tone_amplitudes must match tone_harmonics in length");
        std::vector<kernels::Tone> tones;
        for (std::size_t k = 0; k < config.probe_run.tone_harmonics.size(); ++k) {
            const long harmonic = config.probe_run.tone_harmonics[k];
            if (harmonic < 1)
                throw std::invalid_argument("[probe].tone_harmonics must be >= 1");
            tones.push_back({static_cast<double>(harmonic) * omega0,
                             config.probe_run.tone_amplitudes[k], 0.0});
        }
        const auto phi_i = synthesize_tones(tones, 0.0, dt, count);
        TimeSeries phi_j;
        phi_j.t0 = 0.0;
        phi_j.dt = dt;
        phi_j.samples.assign(count, 0.0);
        output = simulate_readout(phi_i, phi_j, config.probe, &warnings);
    } else {
        const fs::path corr_path =
            config.probe_run.correlations_file.empty()
                ? fs::path(config.run.out_dir) / "correlations.jsonl"
                : fs::path(config.probe_run.correlations_file);
        std::ifstream corr_in(corr_path);
        if (!corr_in)
            throw std::invalid_argument(
                "no correlation input: run the correlations subcommand first "
                "(looked for '" + corr_path.string() + "')");
        const auto corr = io::read_correlations(corr_in);
        if (corr.n_modes() > config.ladder.n_modes)
            throw std::invalid_argument("correlation file has more modes than "
                                        "[ladder].n_modes");

        const int site_i = config.probe_run.site_i;
        const int site_j = config.probe_run.site_j;
        if (site_i < 1 || site_i > config.ladder.N || site_j < 0 ||
            site_j > config.ladder.N || site_i == site_j)
            throw std::invalid_argument("[probe].site_i/site_j out of range");
        const auto coeffs_i = site_coefficients(basis, corr.n_modes(), site_i);
        const auto coeffs_j = site_j == 0
                                  ? std::vector<double>{}
                                  : site_coefficients(basis, corr.n_modes(), site_j);
        const auto components =
            predicted_fourier_components(corr, coeffs_i, coeffs_j, config.probe, dt);
        std::vector<kernels::Tone> tones;
        for (const auto& component : components)
            tones.push_back({component.omega, component.amplitude.real(),
                             component.amplitude.imag()});
        output = synthesize_tones(tones, 0.0, dt, count);

        const fs::path plan_path =
            fs::path(config.run.out_dir) / config.extract.plan_file;
        if (fs::exists(plan_path)) {
            std::ifstream plan_in(plan_path);
            const auto plan = io::read_plan(plan_in);
            if (plan.n_modes != corr.n_modes())
                throw std::invalid_argument(
                    "plan and correlation file disagree on the mode count");
            std::vector<std::vector<SpectralComponent>> measured;
            for (const auto& entry : plan.entries) {
                ProbeConfig entry_probe = plan.probe;
                entry_probe.phi_ext = entry.phi_ext;
                const auto gi = site_coefficients(basis, plan.n_modes, entry.site_i);
                const auto gj = entry.site_j == 0
                                    ? std::vector<double>{}
                                    : site_coefficients(basis, plan.n_modes,
                                                        entry.site_j);
                measured.push_back(
                    predicted_fourier_components(corr, gi, gj, entry_probe));
            }
            const auto measured_path =
                out_path(config, config.extract.measurements_file);
            auto measured_out = open_out(measured_path);
            io::write_measurements(measured_out, measured);
            note(measured_path);
            std::cout << "measured " << measured.size() << " plan entries\n";
        }
    }

    const bool csv = config.run.format == "csv";
    const auto series_path =
        out_path(config, csv ? "timeseries.csv" : "timeseries.jsonl");
    auto series_out = open_out(series_path);
    if (csv) io::write_timeseries_csv(series_out, output);
    else io::write_timeseries_jsonl(series_out, output);
    note(series_path);

    const auto spectrum = power_spectrum(output, config.probe_run.window);
    const auto spectrum_path =
        out_path(config, csv ? "spectrum.csv" : "spectrum.jsonl");
    auto spectrum_out = open_out(spectrum_path);
    if (csv) io::write_spectrum_csv(spectrum_out, spectrum);
    else io::write_spectrum_jsonl(spectrum_out, spectrum);
    note(spectrum_path);

    const auto peaks =
        find_peaks(spectrum, static_cast<std::size_t>(config.probe_run.max_peaks));
    const auto peaks_path = out_path(config, "peaks.jsonl");
    auto peaks_out = open_out(peaks_path);
    io::write_peaks(peaks_out, peaks);
    note(peaks_path);

    for (const auto& warning : warnings)
        std::cout << "warning: " << warning << '\n';
    std::cout << "found " << peaks.size() << " spectral peaks\n";
    return 0;
}

int run_extract(const ExperimentConfig& config) {
    const auto basis = build_mode_basis(config.ladder);

    const fs::path plan_path = fs::path(config.run.out_dir) / config.extract.plan_file;
    std::ifstream plan_in(plan_path);
    if (!plan_in)
        throw std::invalid_argument("missing plan file '" + plan_path.string() +
                                    "' (run the plan subcommand first)");
    const auto plan = io::read_plan(plan_in);

    const fs::path measured_path =
        fs::path(config.run.out_dir) / config.extract.measurements_file;
    std::ifstream measured_in(measured_path);
    if (!measured_in)
        throw std::invalid_argument("missing measurements file '" +
                                    measured_path.string() + "'");
    const auto measured = io::read_measurements(measured_in);

    const auto result = assemble_and_solve(plan, measured, basis);

    const auto recovered_path = out_path(config, "recovered.jsonl");
    auto recovered_out = open_out(recovered_path);
    io::write_correlations(recovered_out, result.recovered);
    note(recovered_path);

    const auto report_path = out_path(config, "extraction_report.jsonl");
    auto report_out = open_out(report_path);
    io::write_extraction_report(report_out, result);
    note(report_path);

    for (const auto& report : result.reports) {
        std::cout << "group omega=" << io::format_double(report.omega) << ": rank "
                  << report.rank << "/" << report.unknowns;
        if (std::isfinite(report.condition))
            std::cout << ", condition " << io::format_double(report.condition);
        for (const auto& [i, j] : report.suggested_pairs)
            std::cout << ", suggest sites (" << i << "," << j << ")";
        std::cout << '\n';
    }
    if (!result.full_rank) {
        std::cerr << "extraction is rank-deficient; add the suggested "
                     "measurement settings\n";
        return 2;
    }
    return 0;
}

int run_report(const ExperimentConfig& config) {
    const auto basis = build_mode_basis(config.ladder);
    std::ostringstream text;

    const auto& ladder = config.ladder;
    text << "ladder: " << ladder.N << " nodes, " << ladder.n_modes
         << " retained modes\n";
    text << "  mode spacing omega0 = " << io::format_double(basis.omega0())
         << " rad/s (" << io::format_double(basis.omega0() / (2.0 * constants::pi))
         << " Hz)\n";
    text << "  charging energy E_C = " << io::format_double(basis.E_C())
         << " J, inductive energy E_L = " << io::format_double(basis.E_L()) << " J\n";
    if (ladder.omega0_nominal > 0.0)
        text << "  quoted mode spacing = "
             << io::format_double(ladder.omega0_nominal) << " rad/s (differs from "
             << "the circuit value by factor "
             << io::format_double(basis.omega0() / ladder.omega0_nominal) << ")\n";
    if (ladder.EJ_imp > 0.0) {
        const auto tensor = build_coupling_tensor(basis);
        text << "impurity: nodes (" << ladder.i0 << ", " << ladder.j0
             << "), EJ = " << io::format_double(ladder.EJ_imp) << " J\n";
        text << "  three-wave scale g = " << io::format_double(tensor.g())
             << " J (g/h = "
             << io::format_double(tensor.g() / constants::h_planck) << " Hz), "
             << tensor.entries().size() << " coupled triples\n";
    }

    if (config.probe.C_S > 0.0) {
        config.probe.validate();
        const double Z0 = std::sqrt(ladder.L / ladder.C);
        text << "probe: omega_P = " << io::format_double(config.probe.omega_P())
             << " rad/s, Z_P = " << io::format_double(config.probe.Z_P())
             << " ohm, output scale = "
             << io::format_double(config.probe.output_scale()) << " A\n";
        text << "  coupler beta(0) = " << io::format_double(beta(config.probe, 0.0))
             << '\n';
        for (const auto& line : probe_regime_report(config.probe, basis.omega0(), Z0))
            text << "  " << line << '\n';
    }

    const fs::path steady_path = fs::path(config.run.out_dir) / "steady_state.jsonl";
    if (std::ifstream in(steady_path); in) {
        const auto populations = io::read_populations(in);
        text << "steady state (" << steady_path.string() << "):\n";
        for (Eigen::Index n = 0; n < populations.size(); ++n)
            text << "  N_" << (n + 1) << " = " << io::format_double(populations(n))
                 << '\n';
        text << "  photon-weighted total = "
             << io::format_double(photon_weighted_total(populations)) << '\n';
    }

    const fs::path corr_path = fs::path(config.run.out_dir) / "correlations.jsonl";
    bool have_truth = false;
    CorrelationSet truth(1, 1.0);
    if (std::ifstream in(corr_path); in) {
        truth = io::read_correlations(in);
        have_truth = true;
        const auto measure = squeezing_measure(truth);
        double max_s = 0.0;
        for (int n = 1; n <= truth.n_modes(); ++n)
            for (int m = 1; m <= truth.n_modes(); ++m)
                max_s = std::max(max_s, measure.magnitude(n, m));
        text << "trial-state correlators (" << corr_path.string() << "): "
             << truth.n_modes() << " modes, max |S| = " << io::format_double(max_s)
             << '\n';
    }

    const fs::path recovered_path = fs::path(config.run.out_dir) / "recovered.jsonl";
    if (std::ifstream in(recovered_path); in) {
        const auto recovered = io::read_correlations(in);
        text << "recovered correlators (" << recovered_path.string() << "): "
             << recovered.n_modes() << " modes\n";
        if (have_truth && recovered.n_modes() == truth.n_modes()) {
            const double err_n =
                (recovered.Nmat() - truth.Nmat()).cwiseAbs().maxCoeff();
            const double err_a =
                (recovered.Amat() - truth.Amat()).cwiseAbs().maxCoeff();
            const double err_q = (recovered.Q() - truth.Q()).cwiseAbs().maxCoeff();
            text << "  max |error| vs trial state: Q " << io::format_double(err_q)
                 << ", N " << io::format_double(err_n) << ", A "
                 << io::format_double(err_a) << '\n';
        }
        const auto measure = squeezing_measure(recovered);
        text << "  squeezing channel magnitudes |S_nm|:\n";
        for (int n = 1; n <= recovered.n_modes(); ++n) {
            text << "   ";
            for (int m = 1; m <= recovered.n_modes(); ++m)
                text << ' ' << io::format_double(measure.magnitude(n, m));
            text << '\n';
        }
    }

    const auto path = out_path(config, "report.txt");
    auto out = open_out(path);
    out << text.str();
    std::cout << text.str();
    note(path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LC ladder three-wave mixing: dynamics, trial-state correlators, "
                 "and Josephson probe readout"};
    app.require_subcommand(1);
    CommonOptions options;

    struct Command {
        const char* name;
        const char* description;
        int (*run)(const ExperimentConfig&);
    };
    const std::vector<Command> commands{
        {"dynamics", "integrate mode populations and find the driven steady state",
         run_dynamics},
        {"correlations", "evaluate trial-state correlators on the mode basis",
         run_correlations},
        {"probe", "simulate the probe readout and its output spectrum", run_probe},
        {"plan", "choose measurement settings that close the extraction system",
         run_plan},
        {"extract", "solve measured components for correlators", run_extract},
        {"report", "summarize the configuration and existing artifacts", run_report},
    };
    for (const auto& command : commands)
        add_common(app.add_subcommand(command.name, command.description), options);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& error) {
        const int code = app.exit(error);
        return code == 0 ? 0 : 1;
    }

    const auto* sub = app.get_subcommands().front();
    try {
        const auto config = load_experiment(options);
        for (const auto& command : commands)
            if (sub->get_name() == command.name) return command.run(config);
        throw std::logic_error("unreachable subcommand");
    } catch (const StiffnessError& error) {
        std::cerr << "integration failed: " << error.what() << '\n';
        return 2;
    } catch (const std::domain_error& error) {
        std::cerr << "regime violation: " << error.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& error) {
        std::cerr << "config error: " << error.what() << '\n';
        return 1;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 1;
    }
}
