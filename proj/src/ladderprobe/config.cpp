#include "ladderprobe/config.hpp"

#include "ladderprobe/constants.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ladderprobe {

namespace {

std::string trim_copy(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return std::string(s);
}

bool valid_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

[[noreturn]] void parse_fail(const std::string& origin, long line,
                             const std::string& message) {
    throw std::invalid_argument("config " + origin + " line " +
                                std::to_string(line) + ": " + message);
}

std::string strip_comment(const std::string& line) {
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_quotes = !in_quotes;
        else if (line[i] == '#' && !in_quotes) return line.substr(0, i);
    }
    return line;
}

void parse_scalar_into(const std::string& token, ConfigValue& value,
                       const std::string& origin, long line) {
    if (token.empty()) parse_fail(origin, line, "empty value");
    if (token.front() == '"') {
        if (token.size() < 2 || token.back() != '"')
            parse_fail(origin, line, "unterminated string");
        const std::string inner = token.substr(1, token.size() - 2);
        if (inner.find('"') != std::string::npos)
            parse_fail(origin, line, "stray quote inside string");
        value.text = inner;
        value.quoted = true;
    } else {
        if (token.find('"') != std::string::npos)
            parse_fail(origin, line, "stray quote in value");
        value.text = token;
        value.quoted = false;
    }
}

ConfigValue parse_value(const std::string& raw, const std::string& origin,
                        long line) {
    ConfigValue value;
    value.line = line;
    const std::string s = trim_copy(raw);
    if (s.empty()) parse_fail(origin, line, "empty value");

    if (s.front() == '[') {
        if (s.back() != ']') parse_fail(origin, line, "unterminated array");
        value.is_array = true;
        const std::string inner = s.substr(1, s.size() - 2);
        std::string item;
        bool in_quotes = false;
        auto push = [&](const std::string& token) {
            const std::string t = trim_copy(token);
            if (t.empty()) parse_fail(origin, line, "empty array element");
            ConfigValue element;
            parse_scalar_into(t, element, origin, line);
            value.items.push_back(element.text);
            value.item_quoted.push_back(element.quoted);
        };
        for (char c : inner) {
            if (c == '"') in_quotes = !in_quotes;
            if (c == ',' && !in_quotes) {
                push(item);
                item.clear();
            } else {
                item += c;
            }
        }
        if (!trim_copy(item).empty()) push(item);
        else if (!value.items.empty())
            parse_fail(origin, line, "trailing comma in array");
        return value;
    }
    parse_scalar_into(s, value, origin, line);
    return value;
}

} // namespace

ConfigFile ConfigFile::parse_text(const std::string& text, std::string origin) {
    ConfigFile file;
    file.origin_ = std::move(origin);

    std::istringstream stream(text);
    std::string raw_line;
    std::string section;
    long line = 0;
    while (std::getline(stream, raw_line)) {
        ++line;
        const std::string content = trim_copy(strip_comment(raw_line));
        if (content.empty()) continue;

        if (content.front() == '[') {
            if (content.back() != ']')
                parse_fail(file.origin_, line, "unterminated section header");
            section = trim_copy(content.substr(1, content.size() - 2));
            if (!valid_name(section))
                parse_fail(file.origin_, line, "bad section name '" + section + "'");
            file.sections_[section]; // register even if empty
            continue;
        }

        const auto eq = content.find('=');
        if (eq == std::string::npos)
            parse_fail(file.origin_, line, "expected key = value");
        const std::string key = trim_copy(content.substr(0, eq));
        if (!valid_name(key))
            parse_fail(file.origin_, line, "bad key name '" + key + "'");
        if (section.empty())
            parse_fail(file.origin_, line, "key '" + key + "' outside any section");

        auto& keys = file.sections_[section];
        if (const auto it = keys.find(key); it != keys.end())
            parse_fail(file.origin_, line,
                       "duplicate key '" + key + "' (first on line " +
                           std::to_string(it->second.line) + ")");
        keys.emplace(key, parse_value(content.substr(eq + 1), file.origin_, line));
    }
    return file;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config: cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str(), path.string());
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

const ConfigValue& ConfigFile::at(const std::string& section,
                                  const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end() || s->second.count(key) == 0)
        throw std::invalid_argument("config " + origin_ + ": missing key '" + key +
                                    "' in section [" + section + "]");
    return s->second.at(key);
}

void ConfigFile::fail(const ConfigValue& value, const std::string& section,
                      const std::string& key, const std::string& why) const {
    parse_fail(origin_, value.line, "[" + section + "]." + key + ": " + why);
}

std::string ConfigFile::get_string(const std::string& section,
                                   const std::string& key) const {
    const auto& value = at(section, key);
    if (value.is_array || !value.quoted)
        fail(value, section, key, "expected a quoted string");
    return value.text;
}

std::string ConfigFile::get_string(const std::string& section,
                                   const std::string& key,
                                   const std::string& fallback) const {
    return has(section, key) ? get_string(section, key) : fallback;
}

double ConfigFile::get_number(const std::string& section, const std::string& key,
                              double fallback) const {
    if (!has(section, key)) return fallback;
    const auto& value = at(section, key);
    if (value.is_array || value.quoted)
        fail(value, section, key, "expected a bare number");
    double parsed = 0.0;
    const char* begin = value.text.data();
    const char* end = begin + value.text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, parsed);
    if (ec != std::errc{} || ptr != end)
        fail(value, section, key, "malformed number '" + value.text + "'");
    return parsed;
}

long ConfigFile::get_integer(const std::string& section,
                             const std::string& key) const {
    const auto& value = at(section, key);
    if (value.is_array || value.quoted)
        fail(value, section, key, "expected a bare integer");
    long parsed = 0;
    const char* begin = value.text.data();
    const char* end = begin + value.text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, parsed);
    if (ec != std::errc{} || ptr != end)
        fail(value, section, key, "malformed integer '" + value.text + "'");
    return parsed;
}

long ConfigFile::get_integer(const std::string& section, const std::string& key,
                             long fallback) const {
    return has(section, key) ? get_integer(section, key) : fallback;
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
    if (!has(section, key)) return fallback;
    const auto& value = at(section, key);
    if (value.is_array || value.quoted)
        fail(value, section, key, "expected true or false");
    if (value.text == "true") return true;
    if (value.text == "false") return false;
    fail(value, section, key, "expected true or false, got '" + value.text + "'");
}

double ConfigFile::get_quantity(const std::string& section, const std::string& key,
                                Dimension dim) const {
    const auto& value = at(section, key);
    if (value.is_array || !value.quoted)
        fail(value, section, key,
             "physical quantities need a quoted unit string, e.g. \"254 pH\"");
    try {
        return parse_quantity(value.text, dim);
    } catch (const std::invalid_argument& error) {
        fail(value, section, key, error.what());
    }
}

double ConfigFile::get_quantity(const std::string& section, const std::string& key,
                                Dimension dim, double fallback) const {
    return has(section, key) ? get_quantity(section, key, dim) : fallback;
}

std::vector<double> ConfigFile::get_number_list(const std::string& section,
                                                const std::string& key) const {
    const auto& value = at(section, key);
    if (!value.is_array) fail(value, section, key, "expected an array");
    std::vector<double> numbers;
    for (std::size_t k = 0; k < value.items.size(); ++k) {
        if (value.item_quoted[k])
            fail(value, section, key, "expected bare numbers in the array");
        double parsed = 0.0;
        const char* begin = value.items[k].data();
        const char* end = begin + value.items[k].size();
        const auto [ptr, ec] = std::from_chars(begin, end, parsed);
        if (ec != std::errc{} || ptr != end)
            fail(value, section, key, "malformed number '" + value.items[k] + "'");
        numbers.push_back(parsed);
    }
    return numbers;
}

std::vector<long> ConfigFile::get_integer_list(const std::string& section,
                                               const std::string& key) const {
    const auto& value = at(section, key);
    if (!value.is_array) fail(value, section, key, "expected an array");
    std::vector<long> numbers;
    for (std::size_t k = 0; k < value.items.size(); ++k) {
        if (value.item_quoted[k])
            fail(value, section, key, "expected bare integers in the array");
        long parsed = 0;
        const char* begin = value.items[k].data();
        const char* end = begin + value.items[k].size();
        const auto [ptr, ec] = std::from_chars(begin, end, parsed);
        if (ec != std::errc{} || ptr != end)
            fail(value, section, key, "malformed integer '" + value.items[k] + "'");
        numbers.push_back(parsed);
    }
    return numbers;
}

std::vector<double> ConfigFile::get_quantity_list(const std::string& section,
                                                  const std::string& key,
                                                  Dimension dim) const {
    const auto& value = at(section, key);
    if (!value.is_array) fail(value, section, key, "expected an array");
    std::vector<double> quantities;
    for (std::size_t k = 0; k < value.items.size(); ++k) {
        if (!value.item_quoted[k])
            fail(value, section, key, "expected quoted unit strings in the array");
        try {
            quantities.push_back(parse_quantity(value.items[k], dim));
        } catch (const std::invalid_argument& error) {
            fail(value, section, key, error.what());
        }
    }
    return quantities;
}

void ConfigFile::require_known(const std::string& section,
                               const std::vector<std::string>& allowed) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return;
    for (const auto& [key, value] : s->second) {
        bool known = false;
        for (const auto& candidate : allowed)
            if (candidate == key) known = true;
        if (!known) fail(value, section, key, "unknown key");
    }
}

namespace {

template <typename T>
T pick(const ConfigFile& file, const std::string& section, const std::string& key,
       const std::string& text, const std::map<std::string, T>& options) {
    const auto it = options.find(text);
    if (it != options.end()) return it->second;
    std::string valid;
    for (const auto& [name, unused] : options) {
        (void)unused;
        if (!valid.empty()) valid += ", ";
        valid += name;
    }
    throw std::invalid_argument("config " + file.origin() + ": [" + section +
                                "]." + key + ": unknown setting '" + text +
                                "' (expected one of: " + valid + ")");
}

} // namespace

ExperimentConfig parse_experiment(const ConfigFile& file) {
    ExperimentConfig config;

    file.require_known("ladder",
                       {"nodes", "inductance", "capacitance", "impurity_energy",
                        "impurity_i", "impurity_j", "impurity_flux", "n_modes",
                        "fn_denominator", "quoted_mode_spacing"});
    config.ladder.N = static_cast<int>(file.get_integer("ladder", "nodes"));
    config.ladder.L = file.get_quantity("ladder", "inductance", Dimension::Inductance);
    config.ladder.C = file.get_quantity("ladder", "capacitance", Dimension::Capacitance);
    config.ladder.EJ_imp =
        file.get_quantity("ladder", "impurity_energy", Dimension::Energy, 0.0);
    config.ladder.i0 = static_cast<int>(file.get_integer("ladder", "impurity_i", 0));
    config.ladder.j0 = static_cast<int>(file.get_integer("ladder", "impurity_j", 0));
    config.ladder.phi_imp = file.get_quantity("ladder", "impurity_flux",
                                              Dimension::Angle, constants::pi / 2);
    config.ladder.n_modes = static_cast<int>(file.get_integer("ladder", "n_modes"));
    config.ladder.fn_denominator =
        pick(file, "ladder", "fn_denominator",
             file.get_string("ladder", "fn_denominator", "derived"),
             std::map<std::string, FnDenominator>{
                 {"derived", FnDenominator::Derived},
                 {"paper", FnDenominator::Paper}});
    config.ladder.omega0_nominal =
        2.0 * constants::pi *
        file.get_quantity("ladder", "quoted_mode_spacing", Dimension::Frequency, 0.0);

    file.require_known("dynamics",
                       {"kappa", "drive_mode", "drive_rate", "duration",
                        "gamma_override", "rel_tol", "abs_tol", "fixed_step",
                        "steady_tol", "horizon_factor", "max_newton"});
    config.ladder.kappa = file.get_quantity("dynamics", "kappa", Dimension::Rate, 0.0);
    config.ladder.drive_mode =
        static_cast<int>(file.get_integer("dynamics", "drive_mode", 0));
    config.ladder.Omega0 =
        file.get_quantity("dynamics", "drive_rate", Dimension::Rate, 0.0);
    config.dynamics.duration =
        file.get_quantity("dynamics", "duration", Dimension::Time, 0.0);
    config.dynamics.gamma_override =
        file.get_quantity("dynamics", "gamma_override", Dimension::Rate, 0.0);
    config.dynamics.integrator.rtol = file.get_number("dynamics", "rel_tol", 1e-8);
    config.dynamics.integrator.atol = file.get_number("dynamics", "abs_tol", 1e-12);
    config.dynamics.integrator.fixed_dt =
        file.get_quantity("dynamics", "fixed_step", Dimension::Time, 0.0);
    config.dynamics.steady.tol = file.get_number("dynamics", "steady_tol", 1e-8);
    config.dynamics.steady.horizon_factor =
        file.get_number("dynamics", "horizon_factor", 20.0);
    config.dynamics.steady.max_newton_iterations =
        static_cast<int>(file.get_integer("dynamics", "max_newton", 50));
    config.dynamics.steady.integrator.rtol = config.dynamics.integrator.rtol;
    config.dynamics.steady.integrator.atol = config.dynamics.integrator.atol;

    file.require_known(
        "probe", {"C_S", "L_S", "C_X", "L_X", "EJ_P", "I_c", "M", "L_P", "C_P",
                  "E_M", "phi_ext", "kappa_probe", "beta_mode", "channel",
                  "site_i", "site_j", "input", "tone_harmonics",
                  "tone_amplitudes", "samples_per_period", "periods", "window",
                  "max_peaks", "correlations"});
    if (file.has("probe", "C_S")) {
        config.probe.C_S = file.get_quantity("probe", "C_S", Dimension::Capacitance);
        config.probe.L_S = file.get_quantity("probe", "L_S", Dimension::Inductance);
        config.probe.C_X = file.get_quantity("probe", "C_X", Dimension::Capacitance);
        config.probe.L_X = file.get_quantity("probe", "L_X", Dimension::Inductance);
        config.probe.EJ_P = file.get_quantity("probe", "EJ_P", Dimension::Energy);
        config.probe.I_c = file.get_quantity("probe", "I_c", Dimension::Current);
        config.probe.M = file.get_quantity("probe", "M", Dimension::Inductance);
        config.probe.L_P = file.get_quantity("probe", "L_P", Dimension::Inductance);
        config.probe.C_P = file.get_quantity("probe", "C_P", Dimension::Capacitance);
        config.probe.E_M = file.get_quantity("probe", "E_M", Dimension::Energy);
        config.probe.phi_ext =
            file.get_quantity("probe", "phi_ext", Dimension::Angle, 0.0);
        config.probe.kappa_probe =
            file.get_quantity("probe", "kappa_probe", Dimension::Rate, 0.0);
        config.probe.beta_mode =
            pick(file, "probe", "beta_mode",
                 file.get_string("probe", "beta_mode", "per_component"),
                 std::map<std::string, BetaMode>{
                     {"per_component", BetaMode::PerComponent},
                     {"quasi_static", BetaMode::QuasiStatic}});
        config.probe.channel =
            pick(file, "probe", "channel",
                 file.get_string("probe", "channel", "one_pole"),
                 std::map<std::string, ChannelModel>{
                     {"one_pole", ChannelModel::OnePole},
                     {"two_pole", ChannelModel::TwoPole},
                     {"none", ChannelModel::None}});
    }
    config.probe_run.site_i = static_cast<int>(file.get_integer("probe", "site_i", 0));
    config.probe_run.site_j = static_cast<int>(file.get_integer("probe", "site_j", 0));
    config.probe_run.input = file.get_string("probe", "input", "tones");
    if (config.probe_run.input != "tones" && config.probe_run.input != "correlations")
        throw std::invalid_argument(
            "config " + file.origin() +
            ": [probe].input must be \"tones\" or \"correlations\"");
    if (file.has("probe", "tone_harmonics"))
        config.probe_run.tone_harmonics = file.get_integer_list("probe", "tone_harmonics");
    if (file.has("probe", "tone_amplitudes"))
        config.probe_run.tone_amplitudes =
            file.get_quantity_list("probe", "tone_amplitudes", Dimension::Angle);
    config.probe_run.samples_per_period =
        file.get_integer("probe", "samples_per_period", 256);
    config.probe_run.periods = file.get_integer("probe", "periods", 32);
    config.probe_run.window = pick(file, "probe", "window",
                                   file.get_string("probe", "window", "rect"),
                                   std::map<std::string, Window>{
                                       {"rect", Window::Rect}, {"hann", Window::Hann}});
    config.probe_run.max_peaks = file.get_integer("probe", "max_peaks", 8);
    config.probe_run.correlations_file = file.get_string("probe", "correlations", "");

    file.require_known("state", {"kind", "t_star", "drive_sum", "populations",
                                 "populations_file", "occupations"});
    config.state.kind = pick(file, "state", "kind",
                             file.get_string("state", "kind", "squeezed"),
                             std::map<std::string, StateKind>{
                                 {"coherent", StateKind::Coherent},
                                 {"fock", StateKind::Fock},
                                 {"squeezed", StateKind::Squeezed}});
    config.state.t_star = file.get_quantity("state", "t_star", Dimension::Time, 0.0);
    config.state.drive_sum =
        static_cast<int>(file.get_integer("state", "drive_sum", 0));
    if (file.has("state", "populations"))
        config.state.populations = file.get_number_list("state", "populations");
    config.state.populations_file = file.get_string("state", "populations_file", "");
    if (file.has("state", "occupations"))
        config.state.occupations = file.get_integer_list("state", "occupations");

    file.require_known("extract", {"plan", "measurements"});
    config.extract.plan_file = file.get_string("extract", "plan", "plan.jsonl");
    config.extract.measurements_file =
        file.get_string("extract", "measurements", "measurements.jsonl");

    file.require_known("run", {"out_dir", "format", "seed"});
    config.run.out_dir = file.get_string("run", "out_dir", "out");
    config.run.format = file.get_string("run", "format", "csv");
    if (config.run.format != "csv" && config.run.format != "jsonl")
        throw std::invalid_argument("config " + file.origin() +
                                    ": [run].format must be \"csv\" or \"jsonl\"");
    config.run.seed = static_cast<std::uint64_t>(file.get_integer("run", "seed", 0));

    config.ladder.validate();
    return config;
}

const std::map<std::string, std::string>& builtin_presets() {
    static const std::map<std::string, std::string> presets{
        {"table1_system", R"preset(# Ladder and drive values from the published system parameter table.
# Flagged inconsistencies, carried as metadata only:
#   - quoted mode spacing 16 MHz: the circuit values give
#     omega0 = pi/((N+1) sqrt(LC)) ~ 2 pi x 1.9 GHz
#   - quoted g/h = 5 MHz: g = EJ (E_C/E_L)^(3/4) evaluates to ~ 32.6 MHz

[ladder]
nodes = 51
inductance = "254 pH"
capacitance = "100 fF"
impurity_energy = "3 GHz h"
impurity_i = 4
impurity_j = 5
impurity_flux = "0.5 pi"
n_modes = 10
fn_denominator = "derived"
quoted_mode_spacing = "16 MHz"

[dynamics]
kappa = "1.2 kHz"
drive_mode = 10
drive_rate = "18 kHz"
duration = "10 ms"
rel_tol = 1e-8
abs_tol = 1e-12

[state]
kind = "squeezed"
t_star = "1 us"
drive_sum = 10

[run]
out_dir = "out"
format = "csv"
seed = 1
)preset"},
        {"table2_probe", R"preset(# Probe values from the published probe parameter table, plus the two-tone
# bench configuration. Flagged issues, carried as comments only:
#   - the table lists "C_P 10 nH" (unit typo); C_P = 10 pF with L_P = 1 uH
#     puts the readout resonance at 2 pi x 50.3 MHz, but then
#     Z_P = sqrt(L_P/C_P) = 316 ohm, not the quoted 126 ohm (the pair
#     omega_P = 2 pi x 50 MHz, Z_P = 126 ohm is not simultaneously realizable
#     with round component values)
#   - E_M has no published derivation; the value below makes the readout
#     current prefactor Phi0 EJ_P/(2 pi L_P E_M) equal the quoted 20 pA
# The symmetric coupler values give beta = 1/3 at every frequency,
# matching the quoted beta = 0.3 at one significant figure.

[ladder]
nodes = 51
inductance = "254 pH"
capacitance = "100 fF"
n_modes = 10

[probe]
C_S = "10 fF"
L_S = "100 uH"
C_X = "10 fF"
L_X = "100 uH"
EJ_P = "3 GHz h"
I_c = "1 nA"
M = "10 nH"
L_P = "1 uH"
C_P = "10 pF"
E_M = "3.2710189495134086e-23 J"
phi_ext = "0.5 pi"
kappa_probe = "0 Hz"
beta_mode = "per_component"
channel = "none"
site_i = 4
site_j = 5
input = "tones"
tone_harmonics = [4, 3]
tone_amplitudes = ["0.45 rad", "0.45 rad"]
samples_per_period = 256
periods = 24
window = "rect"
max_peaks = 8

[run]
out_dir = "out"
format = "csv"
seed = 1
)preset"}};
    return presets;
}

} // namespace ladderprobe
