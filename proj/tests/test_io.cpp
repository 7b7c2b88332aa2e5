#include "ladderprobe/extraction.hpp"
#include "ladderprobe/io.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <sstream>

using namespace ladderprobe;

namespace {

CorrelationSet random_correlations(int n_modes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(-2.0, 2.0);
    CorrelationSet corr(n_modes, 1.1e10);
    for (int n = 0; n < n_modes; ++n)
        corr.Q()(n) = {uniform(rng), uniform(rng)};
    for (int n = 0; n < n_modes; ++n)
        for (int m = n; m < n_modes; ++m) {
            const std::complex<double> nv{uniform(rng), uniform(rng)};
            corr.Nmat()(n, m) = nv;
            corr.Nmat()(m, n) = std::conj(nv);
            const std::complex<double> av{uniform(rng), uniform(rng)};
            corr.Amat()(n, m) = av;
            corr.Amat()(m, n) = av;
        }
    // hermiticity of the number block pins the diagonal to be real
    for (int n = 0; n < n_modes; ++n)
        corr.Nmat()(n, n) = std::abs(corr.Nmat()(n, n));
    return corr;
}

} // namespace

TEST_CASE("doubles format with round-trip precision") {
    for (const double value : {1.0 / 3.0, 1.1e10, -0.0, 2.2250738585072014e-308,
                               3.141592653589793, 1e300}) {
        const std::string text = io::format_double(value);
        CHECK(std::stod(text) == value);
    }
}

TEST_CASE("correlation files round-trip losslessly") {
    const auto corr = random_correlations(7, 99);
    std::ostringstream first;
    io::write_correlations(first, corr);

    std::istringstream in(first.str());
    const auto reread = io::read_correlations(in);
    CHECK(reread.n_modes() == corr.n_modes());
    CHECK(reread.omega0() == corr.omega0());
    CHECK((reread.Q() - corr.Q()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((reread.Nmat() - corr.Nmat()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((reread.Amat() - corr.Amat()).cwiseAbs().maxCoeff() == 0.0);

    std::ostringstream second;
    io::write_correlations(second, reread);
    CHECK(first.str() == second.str());
}

TEST_CASE("correlation files start with a schema meta line") {
    const auto corr = random_correlations(2, 5);
    std::ostringstream out;
    io::write_correlations(out, corr);
    CHECK(out.str().find("\"schema_version\":1") != std::string::npos);
    CHECK(out.str().substr(0, 1) == "{");

    std::istringstream missing_meta("{\"record\":\"Q\",\"n\":1}\n");
    CHECK_THROWS_AS((void)io::read_correlations(missing_meta), std::invalid_argument);
}

TEST_CASE("steady state records expose populations") {
    SteadyStateResult result;
    result.populations = Eigen::VectorXd::LinSpaced(5, 0.5, 4.5);
    result.residual = 1e-12;
    result.converged = true;
    result.t_relax = 3.25e-3;
    result.newton_iterations = 4;

    LadderConfig ladder;
    ladder.N = 11;
    ladder.L = 1e-9;
    ladder.C = 1e-13;
    ladder.n_modes = 5;
    ladder.kappa = 1.2e3;
    ladder.Omega0 = 1.8e4;
    ladder.drive_mode = 5;
    const auto basis = build_mode_basis(ladder);
    auto model = build_rate_model(basis, build_coupling_tensor(basis, 4, 5));
    model.Gamma = 2.5e8;

    std::ostringstream out;
    io::write_steady_state(out, result, model);
    std::istringstream in(out.str());
    const auto populations = io::read_populations(in);
    REQUIRE(populations.size() == 5);
    CHECK((populations - result.populations).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("plans round-trip including the probe settings") {
    MeasurementPlan plan;
    plan.n_modes = 4;
    plan.expected_frequencies = {1.1e10, 2.2e10, 3.3e10};
    plan.probe.C_S = 1e-14;
    plan.probe.L_S = 1e-4;
    plan.probe.C_X = 1e-14;
    plan.probe.L_X = 1e-4;
    plan.probe.EJ_P = 2e-24;
    plan.probe.I_c = 1e-9;
    plan.probe.M = 1e-8;
    plan.probe.L_P = 1e-6;
    plan.probe.C_P = 1e-11;
    plan.probe.E_M = 3.3e-23;
    plan.probe.phi_ext = 1.5707963267948966;
    plan.probe.beta_mode = BetaMode::PerComponent;
    plan.probe.channel = ChannelModel::TwoPole;
    plan.entries = {{7, 0, 0.0}, {3, 9, 1.5707963267948966}};

    std::ostringstream first;
    io::write_plan(first, plan);
    std::istringstream in(first.str());
    const auto reread = io::read_plan(in);

    CHECK(reread.n_modes == plan.n_modes);
    CHECK(reread.expected_frequencies == plan.expected_frequencies);
    CHECK(reread.probe.channel == ChannelModel::TwoPole);
    CHECK(reread.probe.E_M == plan.probe.E_M);
    REQUIRE(reread.entries.size() == 2);
    CHECK(reread.entries[1].site_i == 3);
    CHECK(reread.entries[1].site_j == 9);
    CHECK(reread.entries[1].phi_ext == plan.entries[1].phi_ext);

    std::ostringstream second;
    io::write_plan(second, reread);
    CHECK(first.str() == second.str());
}

TEST_CASE("measurement lists round-trip") {
    std::vector<std::vector<SpectralComponent>> measured(2);
    measured[0].push_back({0.0, {1.25e-11, 0.0}});
    measured[0].push_back({1.1e10, {-3e-12, 4e-12}});
    measured[1].push_back({2.2e10, {5e-13, -6e-13}});

    std::ostringstream first;
    io::write_measurements(first, measured);
    std::istringstream in(first.str());
    const auto reread = io::read_measurements(in);

    REQUIRE(reread.size() == 2);
    REQUIRE(reread[0].size() == 2);
    CHECK(reread[0][1].omega == measured[0][1].omega);
    CHECK(reread[0][1].amplitude == measured[0][1].amplitude);
    CHECK(reread[1][0].amplitude == measured[1][0].amplitude);

    std::ostringstream second;
    io::write_measurements(second, reread);
    CHECK(first.str() == second.str());
}

TEST_CASE("csv writers emit headers and full-precision rows") {
    PopulationTrajectory trajectory;
    trajectory.t = {0.0, 0.5};
    trajectory.N.resize(2, 3);
    trajectory.N << 1.0 / 3.0, 2.0, 3.0, 4.0, 5.0, 6.0;

    std::ostringstream out;
    io::write_trajectory_csv(out, trajectory);
    const std::string text = out.str();
    CHECK(text.rfind("t,N_1,N_2,N_3\n", 0) == 0);
    CHECK(text.find("0.33333333333333331") != std::string::npos);

    TimeSeries series;
    series.t0 = 0.0;
    series.dt = 0.25;
    series.samples = {1.5, -2.5};
    std::ostringstream series_out;
    io::write_timeseries_csv(series_out, series);
    CHECK(series_out.str() == "t,value\n0,1.5\n0.25,-2.5\n");

    Spectrum spectrum;
    spectrum.frequencies = {0.0, 6.5};
    spectrum.psd = {0.125, 0.5};
    std::ostringstream spectrum_out;
    io::write_spectrum_csv(spectrum_out, spectrum);
    CHECK(spectrum_out.str() == "omega,psd\n0,0.125\n6.5,0.5\n");
}

TEST_CASE("extraction reports serialize infinite condition numbers as null") {
    ExtractionResult result{CorrelationSet(2, 1.0), {}, false};
    GroupReport good;
    good.bin = 100;
    good.omega = 1.0;
    good.unknowns = 3;
    good.rank = 3;
    good.condition = 12.5;
    GroupReport bad;
    bad.bin = 0;
    bad.unknowns = 2;
    bad.rank = 1;
    bad.condition = std::numeric_limits<double>::infinity();
    bad.suggested_pairs = {{4, 7}};
    result.reports = {good, bad};

    std::ostringstream out;
    io::write_extraction_report(out, result);
    const std::string text = out.str();
    CHECK(text.find("\"condition\":12.5") != std::string::npos);
    CHECK(text.find("\"condition\":null") != std::string::npos);
    CHECK(text.find("[4,7]") != std::string::npos);
    CHECK(text.find("\"full_rank\":false") != std::string::npos);
}

TEST_CASE("peaks and jsonl time series are deterministic") {
    std::vector<Peak> peaks;
    peaks.push_back({1.1e10, 2.5e-22, 24});
    peaks.push_back({3.3e10, 1.5e-22, 72});

    std::ostringstream first;
    std::ostringstream second;
    io::write_peaks(first, peaks);
    io::write_peaks(second, peaks);
    CHECK(first.str() == second.str());
    CHECK(first.str().find("\"bin\":24") != std::string::npos);

    TimeSeries series;
    series.t0 = 1.0;
    series.dt = 0.5;
    series.samples = {0.25, -0.75};
    std::ostringstream out;
    io::write_timeseries_jsonl(out, series);
    CHECK(out.str().find("\"count\":2") != std::string::npos);
    CHECK(out.str().find("-0.75") != std::string::npos);
}

TEST_CASE("extraction recovery writes the shared correlation schema") {
    MeasurementPlan plan;
    plan.n_modes = 0;
    (void)plan;

    const auto truth = random_correlations(3, 123);
    std::ostringstream out;
    io::write_correlations(out, truth);
    std::istringstream in(out.str());
    const auto reread = io::read_correlations(in);
    CHECK(reread.Nmat().isApprox(reread.Nmat().adjoint()));
    CHECK(reread.Amat().isApprox(reread.Amat().transpose()));
}
