#include "ladderprobe/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace ladderprobe {

namespace io {

using json = nlohmann::ordered_json;

namespace {

json meta(const char* record) {
    json object;
    object["schema_version"] = schema_version;
    object["record"] = record;
    return object;
}

void emit(std::ostream& out, const json& object) { out << object.dump() << '\n'; }

json parse_line(const std::string& line, const char* context) {
    try {
        return json::parse(line);
    } catch (const json::parse_error& error) {
        throw std::invalid_argument(std::string(context) + ": bad JSON line: " +
                                    error.what());
    }
}

/// Streams records, checking the opening meta line.
class LineReader {
public:
    LineReader(std::istream& in, const char* expected_meta, const char* context)
        : in_(in), context_(context) {
        std::string line;
        if (!std::getline(in_, line))
            throw std::invalid_argument(std::string(context_) + ": empty input");
        meta_ = parse_line(line, context_);
        if (meta_.value("record", "") != expected_meta)
            throw std::invalid_argument(std::string(context_) +
                                        ": expected leading '" +
                                        expected_meta + "' record");
        if (meta_.value("schema_version", -1) != schema_version)
            throw std::invalid_argument(std::string(context_) +
                                        ": unsupported schema_version");
    }

    [[nodiscard]] const json& meta() const { return meta_; }

    bool next(json& record) {
        std::string line;
        while (std::getline(in_, line)) {
            if (line.empty()) continue;
            record = parse_line(line, context_);
            return true;
        }
        return false;
    }

private:
    std::istream& in_;
    const char* context_;
    json meta_;
};

json finite_or_null(double value) {
    if (std::isfinite(value)) return json(value);
    return json(nullptr);
}

const char* beta_mode_name(BetaMode mode) {
    return mode == BetaMode::PerComponent ? "per_component" : "quasi_static";
}

const char* channel_name(ChannelModel channel) {
    switch (channel) {
    case ChannelModel::OnePole: return "one_pole";
    case ChannelModel::TwoPole: return "two_pole";
    default: return "none";
    }
}

BetaMode beta_mode_from(const std::string& name) {
    if (name == "per_component") return BetaMode::PerComponent;
    if (name == "quasi_static") return BetaMode::QuasiStatic;
    throw std::invalid_argument("unknown beta_mode '" + name + "'");
}

ChannelModel channel_from(const std::string& name) {
    if (name == "one_pole") return ChannelModel::OnePole;
    if (name == "two_pole") return ChannelModel::TwoPole;
    if (name == "none") return ChannelModel::None;
    throw std::invalid_argument("unknown channel '" + name + "'");
}

json probe_to_json(const ProbeConfig& probe) {
    json object;
    object["C_S"] = probe.C_S;
    object["L_S"] = probe.L_S;
    object["C_X"] = probe.C_X;
    object["L_X"] = probe.L_X;
    object["EJ_P"] = probe.EJ_P;
    object["I_c"] = probe.I_c;
    object["M"] = probe.M;
    object["L_P"] = probe.L_P;
    object["C_P"] = probe.C_P;
    object["E_M"] = probe.E_M;
    object["phi_ext"] = probe.phi_ext;
    object["kappa_probe"] = probe.kappa_probe;
    object["beta_mode"] = beta_mode_name(probe.beta_mode);
    object["channel"] = channel_name(probe.channel);
    return object;
}

ProbeConfig probe_from_json(const json& object) {
    ProbeConfig probe;
    probe.C_S = object.at("C_S").get<double>();
    probe.L_S = object.at("L_S").get<double>();
    probe.C_X = object.at("C_X").get<double>();
    probe.L_X = object.at("L_X").get<double>();
    probe.EJ_P = object.at("EJ_P").get<double>();
    probe.I_c = object.at("I_c").get<double>();
    probe.M = object.at("M").get<double>();
    probe.L_P = object.at("L_P").get<double>();
    probe.C_P = object.at("C_P").get<double>();
    probe.E_M = object.at("E_M").get<double>();
    probe.phi_ext = object.at("phi_ext").get<double>();
    probe.kappa_probe = object.at("kappa_probe").get<double>();
    probe.beta_mode = beta_mode_from(object.at("beta_mode").get<std::string>());
    probe.channel = channel_from(object.at("channel").get<std::string>());
    return probe;
}

} // namespace

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void write_trajectory_csv(std::ostream& out, const PopulationTrajectory& trajectory) {
    out << "t";
    for (Eigen::Index n = 0; n < trajectory.N.cols(); ++n)
        out << ",N_" << (n + 1);
    out << '\n';
    for (std::size_t row = 0; row < trajectory.t.size(); ++row) {
        out << format_double(trajectory.t[row]);
        for (Eigen::Index n = 0; n < trajectory.N.cols(); ++n)
            out << ',' << format_double(trajectory.N(static_cast<Eigen::Index>(row), n));
        out << '\n';
    }
}

void write_timeseries_csv(std::ostream& out, const TimeSeries& series) {
    out << "t,value\n";
    for (std::size_t k = 0; k < series.samples.size(); ++k)
        out << format_double(series.t0 + static_cast<double>(k) * series.dt) << ','
            << format_double(series.samples[k]) << '\n';
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum) {
    out << "omega,psd\n";
    for (std::size_t k = 0; k < spectrum.frequencies.size(); ++k)
        out << format_double(spectrum.frequencies[k]) << ','
            << format_double(spectrum.psd[k]) << '\n';
}

void write_timeseries_jsonl(std::ostream& out, const TimeSeries& series) {
    json head = meta("timeseries_meta");
    head["t0"] = series.t0;
    head["dt"] = series.dt;
    head["count"] = series.samples.size();
    emit(out, head);
    json record;
    record["record"] = "samples";
    record["values"] = series.samples;
    emit(out, record);
}

void write_trajectory_jsonl(std::ostream& out, const PopulationTrajectory& trajectory) {
    json head = meta("trajectory_meta");
    head["n_modes"] = trajectory.N.cols();
    head["count"] = trajectory.t.size();
    head["accepted_steps"] = trajectory.accepted_steps;
    head["rejected_steps"] = trajectory.rejected_steps;
    emit(out, head);
    for (std::size_t row = 0; row < trajectory.t.size(); ++row) {
        json record;
        record["record"] = "sample";
        record["t"] = trajectory.t[row];
        std::vector<double> populations(trajectory.N.cols());
        for (Eigen::Index n = 0; n < trajectory.N.cols(); ++n)
            populations[static_cast<std::size_t>(n)] =
                trajectory.N(static_cast<Eigen::Index>(row), n);
        record["N"] = populations;
        emit(out, record);
    }
}

void write_spectrum_jsonl(std::ostream& out, const Spectrum& spectrum) {
    json head = meta("spectrum_meta");
    head["count"] = spectrum.frequencies.size();
    emit(out, head);
    json record;
    record["record"] = "spectrum";
    record["frequencies"] = spectrum.frequencies;
    record["psd"] = spectrum.psd;
    emit(out, record);
}

void write_steady_state(std::ostream& out, const SteadyStateResult& result,
                        const RateModel& model) {
    json record = meta("steady_state");
    record["n_modes"] = model.n_modes;
    record["populations"] = std::vector<double>(
        result.populations.data(), result.populations.data() + result.populations.size());
    record["residual"] = result.residual;
    record["converged"] = result.converged;
    record["t_relax"] = result.t_relax;
    record["newton_iterations"] = result.newton_iterations;
    record["Gamma"] = model.Gamma;
    record["kappa"] = model.kappa;
    record["Omega0"] = model.Omega0;
    record["drive_mode"] = model.drive_mode;
    emit(out, record);
}

Eigen::VectorXd read_populations(std::istream& in) {
    LineReader reader(in, "steady_state", "steady state file");
    const auto values = reader.meta().at("populations").get<std::vector<double>>();
    Eigen::VectorXd populations(static_cast<Eigen::Index>(values.size()));
    for (std::size_t k = 0; k < values.size(); ++k)
        populations(static_cast<Eigen::Index>(k)) = values[k];
    return populations;
}

void write_correlations(std::ostream& out, const CorrelationSet& corr) {
    json head = meta("correlation_meta");
    head["n_modes"] = corr.n_modes();
    head["omega0"] = corr.omega0();
    emit(out, head);
    for (int n = 1; n <= corr.n_modes(); ++n) {
        json record;
        record["record"] = "Q";
        record["n"] = n;
        record["omega"] = corr.freq_Q(n);
        record["re"] = corr.Q()(n - 1).real();
        record["im"] = corr.Q()(n - 1).imag();
        emit(out, record);
    }
    for (int n = 1; n <= corr.n_modes(); ++n)
        for (int m = n; m <= corr.n_modes(); ++m) {
            json record;
            record["record"] = "N";
            record["n"] = n;
            record["m"] = m;
            record["omega"] = corr.freq_N(n, m);
            record["re"] = corr.Nmat()(n - 1, m - 1).real();
            record["im"] = corr.Nmat()(n - 1, m - 1).imag();
            emit(out, record);
        }
    for (int n = 1; n <= corr.n_modes(); ++n)
        for (int m = n; m <= corr.n_modes(); ++m) {
            json record;
            record["record"] = "A";
            record["n"] = n;
            record["m"] = m;
            record["omega"] = corr.freq_A(n, m);
            record["re"] = corr.Amat()(n - 1, m - 1).real();
            record["im"] = corr.Amat()(n - 1, m - 1).imag();
            emit(out, record);
        }
}

CorrelationSet read_correlations(std::istream& in) {
    LineReader reader(in, "correlation_meta", "correlation file");
    const int n_modes = reader.meta().at("n_modes").get<int>();
    const double omega0 = reader.meta().at("omega0").get<double>();
    CorrelationSet corr(n_modes, omega0);

    json record;
    while (reader.next(record)) {
        const std::string kind = record.value("record", "");
        const std::complex<double> amplitude(record.at("re").get<double>(),
                                             record.at("im").get<double>());
        if (kind == "Q") {
            const int n = record.at("n").get<int>();
            corr.Q()(n - 1) = amplitude;
        } else if (kind == "N") {
            const int n = record.at("n").get<int>();
            const int m = record.at("m").get<int>();
            corr.Nmat()(n - 1, m - 1) = amplitude;
            if (m != n) corr.Nmat()(m - 1, n - 1) = std::conj(amplitude);
        } else if (kind == "A") {
            const int n = record.at("n").get<int>();
            const int m = record.at("m").get<int>();
            corr.Amat()(n - 1, m - 1) = amplitude;
            if (m != n) corr.Amat()(m - 1, n - 1) = amplitude;
        } else {
            throw std::invalid_argument("correlation file: unknown record '" +
                                        kind + "'");
        }
    }
    return corr;
}

void write_peaks(std::ostream& out, const std::vector<Peak>& peaks) {
    json head = meta("peaks_meta");
    head["count"] = peaks.size();
    emit(out, head);
    for (const auto& peak : peaks) {
        json record;
        record["record"] = "peak";
        record["omega"] = peak.omega;
        record["power"] = peak.power;
        record["bin"] = peak.bin;
        emit(out, record);
    }
}

void write_plan(std::ostream& out, const MeasurementPlan& plan) {
    json head = meta("plan_meta");
    head["n_modes"] = plan.n_modes;
    head["entries"] = plan.entries.size();
    head["expected_frequencies"] = plan.expected_frequencies;
    head["probe"] = probe_to_json(plan.probe);
    emit(out, head);
    for (const auto& entry : plan.entries) {
        json record;
        record["record"] = "entry";
        record["site_i"] = entry.site_i;
        record["site_j"] = entry.site_j;
        record["phi_ext"] = entry.phi_ext;
        emit(out, record);
    }
}

MeasurementPlan read_plan(std::istream& in) {
    LineReader reader(in, "plan_meta", "plan file");
    MeasurementPlan plan;
    plan.n_modes = reader.meta().at("n_modes").get<int>();
    plan.expected_frequencies =
        reader.meta().at("expected_frequencies").get<std::vector<double>>();
    plan.probe = probe_from_json(reader.meta().at("probe"));

    json record;
    while (reader.next(record)) {
        if (record.value("record", "") != "entry")
            throw std::invalid_argument("plan file: unknown record '" +
                                        record.value("record", "") + "'");
        MeasurementEntry entry;
        entry.site_i = record.at("site_i").get<int>();
        entry.site_j = record.at("site_j").get<int>();
        entry.phi_ext = record.at("phi_ext").get<double>();
        plan.entries.push_back(entry);
    }
    if (plan.entries.size() != reader.meta().at("entries").get<std::size_t>())
        throw std::invalid_argument("plan file: entry count mismatch");
    return plan;
}

void write_measurements(std::ostream& out,
                        const std::vector<std::vector<SpectralComponent>>& measured) {
    json head = meta("measurements_meta");
    head["count"] = measured.size();
    emit(out, head);
    for (std::size_t k = 0; k < measured.size(); ++k) {
        json record;
        record["record"] = "measurement";
        record["entry"] = k;
        json components = json::array();
        for (const auto& component : measured[k]) {
            json item;
            item["omega"] = component.omega;
            item["re"] = component.amplitude.real();
            item["im"] = component.amplitude.imag();
            components.push_back(item);
        }
        record["components"] = components;
        emit(out, record);
    }
}

std::vector<std::vector<SpectralComponent>> read_measurements(std::istream& in) {
    LineReader reader(in, "measurements_meta", "measurements file");
    std::vector<std::vector<SpectralComponent>> measured(
        reader.meta().at("count").get<std::size_t>());

    json record;
    while (reader.next(record)) {
        if (record.value("record", "") != "measurement")
            throw std::invalid_argument("measurements file: unknown record '" +
                                        record.value("record", "") + "'");
        const auto index = record.at("entry").get<std::size_t>();
        if (index >= measured.size())
            throw std::invalid_argument("measurements file: entry index out of range");
        for (const auto& item : record.at("components")) {
            SpectralComponent component;
            component.omega = item.at("omega").get<double>();
            component.amplitude = {item.at("re").get<double>(),
                                   item.at("im").get<double>()};
            measured[index].push_back(component);
        }
    }
    return measured;
}

void write_extraction_report(std::ostream& out, const ExtractionResult& result) {
    json head = meta("extraction_meta");
    head["full_rank"] = result.full_rank;
    head["groups"] = result.reports.size();
    emit(out, head);
    for (const auto& report : result.reports) {
        json record;
        record["record"] = "group";
        record["bin"] = report.bin;
        record["omega"] = report.omega;
        record["unknowns"] = report.unknowns;
        record["rank"] = report.rank;
        record["condition"] = finite_or_null(report.condition);
        json pairs = json::array();
        for (const auto& [i, j] : report.suggested_pairs)
            pairs.push_back(json::array({i, j}));
        record["suggested_pairs"] = pairs;
        emit(out, record);
    }
}

} // namespace io

} // namespace ladderprobe
