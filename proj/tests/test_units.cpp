#include <doctest.h>

#include <stdexcept>

#include "ladderprobe/constants.hpp"
#include "ladderprobe/units.hpp"

using ladderprobe::Dimension;
using ladderprobe::parse_quantity;
namespace lc = ladderprobe::constants;

TEST_CASE("quantities parse with their unit suffix") {
    CHECK(parse_quantity("254 pH", Dimension::Inductance) == doctest::Approx(254e-12).epsilon(1e-15));
    CHECK(parse_quantity("100 fF", Dimension::Capacitance) == doctest::Approx(100e-15).epsilon(1e-15));
    CHECK(parse_quantity("10 uH", Dimension::Inductance) == doctest::Approx(10e-6).epsilon(1e-15));
    CHECK(parse_quantity("1.2 kHz", Dimension::Rate) == doctest::Approx(1200.0).epsilon(1e-15));
    CHECK(parse_quantity("18 kHz", Dimension::Rate) == doctest::Approx(18000.0).epsilon(1e-15));
    CHECK(parse_quantity("16 MHz", Dimension::Frequency) == doctest::Approx(16e6).epsilon(1e-15));
    CHECK(parse_quantity("1 nA", Dimension::Current) == doctest::Approx(1e-9).epsilon(1e-15));
    CHECK(parse_quantity("20 pA", Dimension::Current) == doctest::Approx(20e-12).epsilon(1e-15));
    CHECK(parse_quantity("2.5 us", Dimension::Time) == doctest::Approx(2.5e-6).epsilon(1e-15));
    CHECK(parse_quantity("0.5 rad", Dimension::Angle) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(parse_quantity("1e9 rad/s", Dimension::AngularFrequency) == doctest::Approx(1e9).epsilon(1e-15));
}

TEST_CASE("energies accept joules and frequency-times-h forms") {
    CHECK(parse_quantity("1e-24 J", Dimension::Energy) == doctest::Approx(1e-24).epsilon(1e-15));
    CHECK(parse_quantity("3 GHz h", Dimension::Energy) ==
          doctest::Approx(3e9 * lc::h_planck).epsilon(1e-15));
    CHECK(parse_quantity("5 MHz h", Dimension::Energy) ==
          doctest::Approx(5e6 * lc::h_planck).epsilon(1e-15));
}

TEST_CASE("bare numbers are rejected for physical quantities") {
    CHECK_THROWS_AS((void)parse_quantity("254", Dimension::Inductance), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_quantity("1.2", Dimension::Rate), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_quantity("3e9", Dimension::Energy), std::invalid_argument);
}

TEST_CASE("mismatched or unknown units are rejected") {
    CHECK_THROWS_AS((void)parse_quantity("254 pF", Dimension::Inductance), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_quantity("10 nH", Dimension::Capacitance), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_quantity("5 qH", Dimension::Inductance), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_quantity("", Dimension::Inductance), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_quantity("pH", Dimension::Inductance), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_quantity("abc pH", Dimension::Inductance), std::invalid_argument);
}

TEST_CASE("whitespace between value and unit is flexible") {
    CHECK(parse_quantity("254pH", Dimension::Inductance) == doctest::Approx(254e-12).epsilon(1e-15));
    CHECK(parse_quantity("  254  pH  ", Dimension::Inductance) ==
          doctest::Approx(254e-12).epsilon(1e-15));
}
