#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ladderprobe/mode_basis.hpp"

using namespace ladderprobe;

namespace {

LadderConfig table_config(int N, int n_modes) {
    LadderConfig cfg;
    cfg.N = N;
    cfg.L = 254e-12;
    cfg.C = 100e-15;
    cfg.EJ_imp = 3e9 * 6.62607015e-34;
    cfg.i0 = 4;
    cfg.j0 = 5;
    cfg.phi_imp = M_PI / 2;
    cfg.kappa = 1.2e3;
    cfg.drive_mode = n_modes;
    cfg.Omega0 = 18e3;
    cfg.n_modes = n_modes;
    return cfg;
}

} // namespace

TEST_CASE("single-node ladder has the bare LC resonance scaled by sqrt(2)") {
    auto cfg = table_config(1, 1);
    cfg.EJ_imp = 0.0; // a single node cannot host the two-lead impurity
    cfg.i0 = cfg.j0 = 0;
    auto basis = build_mode_basis(cfg);
    // sin(pi/4) = 1/sqrt(2), so omega_1 = sqrt(2/(LC)).
    CHECK(basis.omega(1) ==
          doctest::Approx(std::sqrt(2.0 / (254e-12 * 100e-15))).epsilon(1e-14));
}

TEST_CASE("frequencies, spacing, and energies match frozen values for the 51-node ladder") {
    auto basis = build_mode_basis(table_config(51, 10));
    CHECK(basis.omega0() == doctest::Approx(11987528998.136913).epsilon(1e-13));
    CHECK(basis.omega(1) == doctest::Approx(11985705977.13284).epsilon(1e-13));
    CHECK(basis.omega(10) / basis.omega(1) == doctest::Approx(9.850106943465045).epsilon(1e-13));
    CHECK(basis.E_C() == doctest::Approx(5.133939933071139e-25).epsilon(1e-13));
    CHECK(basis.E_L() == doctest::Approx(2.132101280871762e-22).epsilon(1e-13));
}

TEST_CASE("low-lying spectrum is harmonic to within two percent") {
    auto basis = build_mode_basis(table_config(51, 10));
    double max_dev = 0.0;
    for (int n = 1; n <= 10; ++n) {
        const double dev = std::abs(basis.omega(n) / basis.omega(1) - n) / n;
        max_dev = std::max(max_dev, dev);
    }
    CHECK(max_dev < 0.02);
    CHECK(max_dev == doctest::Approx(0.014989305653495499).epsilon(1e-10));
}

TEST_CASE("dispersion deviation falls off as the square of the mode count") {
    auto err = [](int N) {
        auto basis = build_mode_basis(table_config(N, 3));
        return std::abs(basis.omega(3) / (3.0 * basis.omega0()) - 1.0);
    };
    CHECK(err(25) / err(51) == doctest::Approx(3.995).epsilon(0.05));
}

TEST_CASE("mode profiles are orthonormal") {
    for (int N : {7, 23, 51, 200}) {
        auto basis = build_mode_basis(table_config(N, N));
        double max_dev = 0.0;
        for (int n = 1; n <= N; ++n) {
            for (int m = n; m <= N; ++m) {
                double dot = 0.0;
                for (int i = 1; i <= N; ++i) dot += basis.X(n, i) * basis.X(m, i);
                max_dev = std::max(max_dev, std::abs(dot - (n == m ? 1.0 : 0.0)));
            }
        }
        CHECK(max_dev < 1e-10);
    }
}

TEST_CASE("profiles vanish at the hard-wall boundaries") {
    for (int n : {1, 2, 5, 10}) {
        CHECK(mode_shape(51, n, 0) == 0.0);
        CHECK(std::abs(mode_shape(51, n, 52)) < 1e-12);
    }
}

TEST_CASE("even modes have a node at the chain midpoint") {
    auto basis = build_mode_basis(table_config(51, 10));
    for (int n : {2, 4, 6, 8, 10}) CHECK(std::abs(basis.X(n, 26)) < 1e-13);
    for (int n : {1, 3, 5}) CHECK(std::abs(basis.X(n, 26)) > 0.01);
}

TEST_CASE("zero-point amplitudes obey the scaling and uncertainty relations") {
    auto basis = build_mode_basis(table_config(51, 10));
    CHECK(basis.phi_zpf(1) == doctest::Approx(1.0717536528875622).epsilon(1e-13));
    CHECK(basis.n_zpf(1) == doctest::Approx(0.46652511857821033).epsilon(1e-13));
    CHECK(basis.phi_zpf(1) / basis.phi_zpf(4) == doctest::Approx(2.0).epsilon(1e-13));
    for (int n = 1; n <= 10; ++n)
        CHECK(basis.phi_zpf(n) * basis.n_zpf(n) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(basis.gamma(3, 7) == doctest::Approx(basis.phi_zpf(3) * basis.X(3, 7)).epsilon(1e-15));
}

TEST_CASE("phase observable coefficients difference the mode expansion") {
    auto basis = build_mode_basis(table_config(51, 10));
    auto c = phase_observable_coefficients(basis, 4, 5);
    REQUIRE(c.size() == 10);
    for (int n = 1; n <= 10; ++n)
        CHECK(c[n - 1] == doctest::Approx(basis.gamma(n, 4) - basis.gamma(n, 5)).epsilon(1e-15));
    auto cg = phase_observable_coefficients(basis, 26);
    for (int n : {2, 4, 6, 8, 10}) CHECK(std::abs(cg[n - 1]) < 1e-12);
    CHECK_THROWS_AS((void)phase_observable_coefficients(basis, 4, 4), std::invalid_argument);
    CHECK_THROWS_AS((void)phase_observable_coefficients(basis, 0, 5), std::invalid_argument);
}

TEST_CASE("invalid ladder configurations are rejected") {
    auto cfg = table_config(51, 10);
    cfg.n_modes = 52;
    CHECK_THROWS_AS((void)build_mode_basis(cfg), std::invalid_argument);
    cfg = table_config(51, 10);
    cfg.i0 = cfg.j0;
    CHECK_THROWS_AS((void)build_mode_basis(cfg), std::invalid_argument);
    cfg = table_config(51, 10);
    cfg.L = 0.0;
    CHECK_THROWS_AS((void)build_mode_basis(cfg), std::invalid_argument);
    cfg = table_config(51, 10);
    cfg.drive_mode = 11;
    CHECK_THROWS_AS((void)build_mode_basis(cfg), std::invalid_argument);
}
