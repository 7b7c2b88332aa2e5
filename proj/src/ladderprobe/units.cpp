#include "ladderprobe/units.hpp"

#include "ladderprobe/constants.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <stdexcept>

namespace ladderprobe {

namespace {

const std::map<std::string, double, std::less<>>& unit_table(Dimension dim) {
    static const std::map<std::string, double, std::less<>> inductance{
        {"pH", 1e-12}, {"nH", 1e-9}, {"uH", 1e-6}, {"mH", 1e-3}, {"H", 1.0}};
    static const std::map<std::string, double, std::less<>> capacitance{
        {"fF", 1e-15}, {"pF", 1e-12}, {"nF", 1e-9}, {"uF", 1e-6}, {"F", 1.0}};
    static const std::map<std::string, double, std::less<>> hz{
        {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
    static const std::map<std::string, double, std::less<>> rad_s{
        {"rad/s", 1.0}, {"krad/s", 1e3}, {"Mrad/s", 1e6}, {"Grad/s", 1e9}};
    static const std::map<std::string, double, std::less<>> current{
        {"pA", 1e-12}, {"nA", 1e-9}, {"uA", 1e-6}, {"mA", 1e-3}, {"A", 1.0}};
    static const std::map<std::string, double, std::less<>> time{
        {"ns", 1e-9}, {"us", 1e-6}, {"ms", 1e-3}, {"s", 1.0}};
    static const std::map<std::string, double, std::less<>> angle{
        {"rad", 1.0}, {"pi", constants::pi}};
    static const std::map<std::string, double, std::less<>> energy{{"J", 1.0}};

    switch (dim) {
    case Dimension::Inductance: return inductance;
    case Dimension::Capacitance: return capacitance;
    case Dimension::Rate:
    case Dimension::Frequency: return hz;
    case Dimension::AngularFrequency: return rad_s;
    case Dimension::Current: return current;
    case Dimension::Time: return time;
    case Dimension::Angle: return angle;
    case Dimension::Energy: return energy;
    }
    throw std::logic_error("unit_table: bad dimension");
}

[[noreturn]] void fail(std::string_view text, Dimension dim, const char* why) {
    throw std::invalid_argument("quantity '" + std::string(text) + "' (" +
                                std::string(dimension_name(dim)) + "): " + why);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

} // namespace

std::string_view dimension_name(Dimension dim) {
    switch (dim) {
    case Dimension::Inductance: return "inductance";
    case Dimension::Capacitance: return "capacitance";
    case Dimension::Rate: return "rate";
    case Dimension::Frequency: return "frequency";
    case Dimension::AngularFrequency: return "angular frequency";
    case Dimension::Energy: return "energy";
    case Dimension::Current: return "current";
    case Dimension::Time: return "time";
    case Dimension::Angle: return "angle";
    }
    return "?";
}

double parse_quantity(std::string_view text, Dimension dim) {
    const std::string_view s = trim(text);
    if (s.empty()) fail(text, dim, "empty value");

    double value = 0.0;
    const auto [num_end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || num_end == s.data()) fail(text, dim, "malformed number");

    std::string_view unit = trim(std::string_view(num_end, s.data() + s.size() - num_end));
    if (unit.empty()) fail(text, dim, "missing unit suffix");

    // Energies may be written as a frequency times h, e.g. "3 GHz h".
    if (dim == Dimension::Energy && unit.size() > 1 && unit.back() == 'h') {
        const std::string_view freq_unit = trim(unit.substr(0, unit.size() - 1));
        const auto& hz = unit_table(Dimension::Frequency);
        if (const auto it = hz.find(freq_unit); it != hz.end())
            return value * it->second * constants::h_planck;
        fail(text, dim, "unknown unit suffix");
    }

    const auto& table = unit_table(dim);
    if (const auto it = table.find(unit); it != table.end()) return value * it->second;
    fail(text, dim, "unknown unit suffix");
}

} // namespace ladderprobe
