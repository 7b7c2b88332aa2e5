#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "ladderprobe/coupling.hpp"
#include "ladderprobe/fock_oracle.hpp"
#include "ladderprobe/states.hpp"

using namespace ladderprobe;
using namespace std::complex_literals;

namespace {

LadderConfig base_config() {
    LadderConfig cfg;
    cfg.N = 51;
    cfg.L = 254e-12;
    cfg.C = 100e-15;
    cfg.EJ_imp = 3e9 * 6.62607015e-34;
    cfg.i0 = 4;
    cfg.j0 = 5;
    cfg.phi_imp = M_PI / 2;
    cfg.kappa = 1.2e3;
    cfg.drive_mode = 10;
    cfg.Omega0 = 18e3;
    cfg.n_modes = 10;
    return cfg;
}

const ModeBasis& table_basis() {
    static const ModeBasis basis = build_mode_basis(base_config());
    return basis;
}

void check_close(const CorrelationSet& a, const CorrelationSet& b, double tol) {
    REQUIRE(a.n_modes() == b.n_modes());
    for (int n = 1; n <= a.n_modes(); ++n) {
        CHECK(std::abs(a.Q()(n - 1) - b.Q()(n - 1)) < tol);
        for (int m = 1; m <= a.n_modes(); ++m) {
            CHECK(std::abs(a.Nmat()(n - 1, m - 1) - b.Nmat()(n - 1, m - 1)) < tol);
            CHECK(std::abs(a.Amat()(n - 1, m - 1) - b.Amat()(n - 1, m - 1)) < tol);
        }
    }
}

} // namespace

TEST_CASE("the empty coherent state has vanishing correlators") {
    auto corr = correlations(make_coherent(Eigen::VectorXcd::Zero(10)), table_basis());
    CHECK(corr.Q().norm() == 0.0);
    CHECK(corr.Nmat().norm() == 0.0);
    CHECK(corr.Amat().norm() == 0.0);
}

TEST_CASE("coherent correlators factorize and cluster exactly") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> amp(0.2, 2.0);
    std::uniform_real_distribution<double> ph(0.0, 2 * M_PI);
    Eigen::VectorXcd alpha(10);
    for (int k = 0; k < 10; ++k) alpha(k) = std::polar(amp(rng), ph(rng));

    auto corr = correlations(make_coherent(alpha), table_basis());
    for (int n = 1; n <= 10; ++n) {
        CHECK(std::abs(corr.Q()(n - 1) - alpha(n - 1)) < 1e-15);
        for (int m = 1; m <= 10; ++m) {
            CHECK(std::abs(corr.Nmat()(n - 1, m - 1) -
                           std::conj(alpha(n - 1)) * alpha(m - 1)) < 1e-14);
            CHECK(std::abs(corr.Amat()(n - 1, m - 1) - alpha(n - 1) * alpha(m - 1)) < 1e-14);
        }
    }

    auto s = squeezing_measure(corr);
    std::uniform_real_distribution<double> td(0.0, 1e-9);
    for (int n = 1; n <= 10; ++n)
        for (int m = 1; m <= 10; ++m) {
            CHECK(s.magnitude(n, m) < 1e-12);
            CHECK(std::abs(squeezing_value(corr, s, n, m, td(rng))) < 1e-12);
        }
}

TEST_CASE("time-domain values follow the rotating amplitudes") {
    Eigen::VectorXcd alpha = Eigen::VectorXcd::Zero(10);
    alpha(2) = 1.5 + 0.5i; // mode 3
    alpha(4) = 0.8i;       // mode 5
    auto corr = correlations(make_coherent(alpha), table_basis());
    const double w0 = table_basis().omega0();
    const double t = 0.37 / w0;
    CHECK(corr.Q_value(3, t) ==
          doctest::Approx(std::real(alpha(2) * std::exp(-3i * w0 * t))).epsilon(1e-12));
    CHECK(corr.N_value(3, 5, t) ==
          doctest::Approx(std::real(std::conj(alpha(2)) * alpha(4) *
                                    std::exp(-2i * w0 * t))).epsilon(1e-12));
    CHECK(corr.A_value(3, 5, t) ==
          doctest::Approx(std::real(alpha(2) * alpha(4) * std::exp(-8i * w0 * t)))
              .epsilon(1e-12));
    CHECK(corr.freq_N(3, 5) == doctest::Approx(2 * w0).epsilon(1e-15));
    CHECK(corr.freq_A(3, 5) == doctest::Approx(8 * w0).epsilon(1e-15));
}

TEST_CASE("number states populate only the diagonal") {
    Eigen::VectorXi occ = Eigen::VectorXi::Zero(10);
    occ(1) = 3;
    occ(6) = 1;
    auto corr = correlations(make_fock(occ), table_basis());
    CHECK(corr.Q().norm() == 0.0);
    CHECK(corr.Amat().norm() == 0.0);
    for (int n = 1; n <= 10; ++n)
        for (int m = 1; m <= 10; ++m)
            CHECK(corr.Nmat()(n - 1, m - 1) ==
                  (n == m ? std::complex<double>(occ(n - 1), 0) : 0.0));

    auto s = squeezing_measure(corr);
    CHECK(std::abs(s.diff(1, 1) - 3.0) < 1e-15);
    CHECK(s.sum.norm() == 0.0);
}

TEST_CASE("two-mode squeezing adds the frozen pair correlations") {
    XiMap xi{{{1, 9}, std::complex<double>(0.3, 0.0)}};
    auto state = make_squeezed(Eigen::VectorXcd::Zero(10), {{1, 9}}, xi, 10);
    auto corr = correlations(state, table_basis());

    CHECK(std::real(corr.Nmat()(0, 0)) == doctest::Approx(0.09273260912113383).epsilon(1e-12));
    CHECK(std::real(corr.Nmat()(8, 8)) == doctest::Approx(0.09273260912113383).epsilon(1e-12));
    CHECK(std::real(corr.Amat()(0, 8)) == doctest::Approx(-0.3183267910741206).epsilon(1e-12));
    CHECK(corr.Amat()(0, 8) == corr.Amat()(8, 0));
    CHECK(std::abs(corr.Nmat()(0, 8)) == 0.0);
    CHECK(corr.Q().norm() == 0.0);

    auto s = squeezing_measure(corr);
    CHECK(s.magnitude(1, 9) == doctest::Approx(0.3183267910741206).epsilon(1e-12));
    CHECK(s.magnitude(1, 1) == doctest::Approx(0.09273260912113383).epsilon(1e-12));
    CHECK(s.magnitude(2, 8) == 0.0);
}

TEST_CASE("squeezing a state leaves its mean field unchanged") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ph(0.0, 2 * M_PI);
    Eigen::VectorXcd alpha(10);
    for (int k = 0; k < 10; ++k) alpha(k) = std::polar(0.9, ph(rng));
    auto pairing = auto_pairing(10, 10);
    XiMap xi;
    for (const auto& [p, q] : pairing) xi[{p, q}] = std::polar(0.1, ph(rng));

    auto cs = correlations(make_squeezed(alpha, pairing, xi, 10), table_basis());
    auto cc = correlations(make_coherent(alpha), table_basis());
    CHECK((cs.Q() - cc.Q()).norm() == 0.0);
}

TEST_CASE("pairings enumerate the energy-matched decompositions") {
    auto p10 = auto_pairing(10, 10);
    REQUIRE(p10.size() == 5);
    for (int k = 0; k < 5; ++k) {
        CHECK(p10[k].first == k + 1);
        CHECK(p10[k].second == 9 - k);
    }
    auto p7 = auto_pairing(7, 10);
    REQUIRE(p7.size() == 3);
    CHECK(p7[2] == ModePair{3, 4});
}

TEST_CASE("derived squeezing parameters follow the drive amplitude and coupling") {
    auto basis = table_basis();
    auto tensor = build_coupling_tensor(basis);
    const std::complex<double> alpha_d = std::polar(3.0, 0.4);
    const double T_star = 2.0e-3;
    auto xi = derive_xi(alpha_d, tensor, auto_pairing(10, 10), 10, T_star);
    REQUIRE(xi.size() == 5);
    const double hbar = 1.054571817e-34;
    for (const auto& [pair, val] : xi) {
        const std::complex<double> want = 1i * alpha_d * tensor.g() *
                                          tensor.A(pair.first, pair.second, 10) *
                                          T_star / hbar;
        CHECK(std::abs(val - want) < 1e-9 * std::abs(want));
    }
}

TEST_CASE("inconsistent trial states are rejected") {
    const int n = 10;
    const Eigen::VectorXcd ok_alpha = Eigen::VectorXcd::Zero(n);
    XiMap xi19{{{1, 9}, 0.1 + 0.0i}};

    CHECK_THROWS_AS(make_coherent(Eigen::VectorXcd::Zero(3)).validate(n),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_squeezed(ok_alpha, {{3, 4}}, {{{3, 4}, 0.1 + 0.0i}}, 10).validate(n),
                    std::invalid_argument); // 3 + 4 != 10
    CHECK_THROWS_AS(make_squeezed(ok_alpha, {{9, 1}}, xi19, 10).validate(n),
                    std::invalid_argument); // not canonical
    CHECK_THROWS_AS(
        make_squeezed(ok_alpha, {{1, 9}, {1, 9}},
                      XiMap{{{1, 9}, 0.1 + 0.0i}}, 10).validate(n),
        std::invalid_argument); // mode reuse
    CHECK_THROWS_AS(make_squeezed(ok_alpha, {{1, 9}}, XiMap{}, 10).validate(n),
                    std::invalid_argument); // missing xi
    CHECK_NOTHROW(make_squeezed(ok_alpha, {{1, 9}, {5, 5}},
                                XiMap{{{1, 9}, 0.1 + 0.0i}, {{5, 5}, 0.2 + 0.0i}}, 10)
                      .validate(n));
}

TEST_CASE("amplitude reconstruction from populations is deterministic") {
    Eigen::VectorXd N(3);
    N << 1.0, 4.0, 0.25;
    auto phases = random_phases(99, 3);
    auto a1 = alphas_from_populations(N, phases);
    auto a2 = alphas_from_populations(N, random_phases(99, 3));
    CHECK((a1 - a2).norm() == 0.0);
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(a1(k)) == doctest::Approx(std::sqrt(N(k))).epsilon(1e-14));
        CHECK(phases[k] >= 0.0);
        CHECK(phases[k] < 2 * M_PI);
    }
    Eigen::VectorXd bad(1);
    bad << -0.5;
    CHECK_THROWS_AS((void)alphas_from_populations(bad, random_phases(1, 1)),
                    std::invalid_argument);
}

TEST_CASE("oracle reproduces a displaced single mode") {
    Eigen::VectorXcd alpha = Eigen::VectorXcd::Zero(10);
    alpha(2) = 1.2 + 0.3i;
    auto state = make_coherent(alpha);
    auto closed = correlations(state, table_basis());
    auto oracle = fock_space_oracle(state, table_basis(), 40);
    check_close(closed, oracle, 1e-8);
}

TEST_CASE("oracle reproduces a number state exactly") {
    Eigen::VectorXi occ = Eigen::VectorXi::Zero(10);
    occ(1) = 3;
    auto oracle = fock_space_oracle(make_fock(occ), table_basis(), 8);
    CHECK(std::abs(oracle.Nmat()(1, 1) - 3.0) < 1e-14);
    CHECK(oracle.Q().norm() < 1e-14);
    CHECK(oracle.Amat().norm() < 1e-14);
}

TEST_CASE("oracle confirms the two-mode squeezed closed forms") {
    XiMap xi{{{1, 9}, std::polar(0.3, 0.9)}};
    auto state = make_squeezed(Eigen::VectorXcd::Zero(10), {{1, 9}}, xi, 10);
    check_close(correlations(state, table_basis()),
                fock_space_oracle(state, table_basis(), 40), 1e-8);
}

TEST_CASE("oracle confirms the degenerate self-pair closed forms") {
    Eigen::VectorXcd alpha = Eigen::VectorXcd::Zero(10);
    alpha(4) = 0.7; // mode 5
    XiMap xi{{{5, 5}, 0.2i}};
    auto state = make_squeezed(alpha, {{5, 5}}, xi, 10);
    auto closed = correlations(state, table_basis());
    CHECK(std::real(closed.Nmat()(4, 4)) ==
          doctest::Approx(0.49 + 0.04053618591922742).epsilon(1e-12));
    CHECK(std::real(closed.Amat()(4, 4)) == doctest::Approx(0.49).epsilon(1e-12));
    CHECK(std::imag(closed.Amat()(4, 4)) ==
          doctest::Approx(-0.20537616290140775).epsilon(1e-12));
    check_close(closed, fock_space_oracle(state, table_basis(), 60), 1e-8);
}

TEST_CASE("oracle confirms a displaced squeezed pair with phases") {
    Eigen::VectorXcd alpha = Eigen::VectorXcd::Zero(10);
    alpha(1) = std::polar(0.9, 1.1); // mode 2
    alpha(7) = std::polar(1.1, -0.6); // mode 8
    XiMap xi{{{2, 8}, std::polar(0.25, 2.0)}};
    auto state = make_squeezed(alpha, {{2, 8}}, xi, 10);
    check_close(correlations(state, table_basis()),
                fock_space_oracle(state, table_basis(), 40), 1e-8);
}

TEST_CASE("oracle rejects states that overflow the truncation") {
    Eigen::VectorXcd alpha = Eigen::VectorXcd::Zero(10);
    alpha(0) = 5.5;
    CHECK_THROWS_AS((void)fock_space_oracle(make_coherent(alpha), table_basis(), 40),
                    TruncationError);
}

TEST_CASE("oracle refuses more than three active modes") {
    Eigen::VectorXcd alpha = Eigen::VectorXcd::Zero(10);
    alpha(0) = alpha(1) = alpha(2) = alpha(3) = 0.5;
    CHECK_THROWS_AS((void)fock_space_oracle(make_coherent(alpha), table_basis(), 10),
                    std::invalid_argument);
}
