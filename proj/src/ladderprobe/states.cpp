#include "ladderprobe/states.hpp"

#include "ladderprobe/constants.hpp"

#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace ladderprobe {

using namespace std::complex_literals;
using constants::pi;

// ============================================================================
// TrialState
// ============================================================================

void TrialState::validate(int n_modes) const {
    const auto bad = [](const std::string& what) {
        throw std::invalid_argument("trial state: " + what);
    };

    switch (kind) {
    case StateKind::Coherent:
        if (alpha.size() != n_modes) bad("alpha size mismatch");
        break;
    case StateKind::Fock:
        if (occupations.size() != n_modes) bad("occupations size mismatch");
        if ((occupations.array() < 0).any()) bad("negative occupation");
        break;
    case StateKind::Squeezed: {
        if (alpha.size() != n_modes) bad("alpha size mismatch");
        if (drive_sum < 2) bad("drive_sum must be >= 2");
        std::set<int> used;
        for (const auto& [p, q] : pairing) {
            if (p < 1 || q < 1 || p > n_modes || q > n_modes) bad("pair mode out of range");
            if (p > q) bad("pair must be ordered p <= q");
            if (p + q != drive_sum) bad("pair sum does not match drive_sum");
            if (!used.insert(p).second || (p != q && !used.insert(q).second))
                bad("mode appears in more than one pair");
            if (!xi.count({p, q})) bad("missing xi for a pair");
        }
        break;
    }
    }
}

TrialState make_coherent(Eigen::VectorXcd alpha) {
    TrialState state;
    state.kind = StateKind::Coherent;
    state.alpha = std::move(alpha);
    return state;
}

TrialState make_fock(Eigen::VectorXi occupations) {
    TrialState state;
    state.kind = StateKind::Fock;
    state.occupations = std::move(occupations);
    return state;
}

TrialState make_squeezed(Eigen::VectorXcd alpha, std::vector<ModePair> pairing,
                         XiMap xi, int drive_sum) {
    TrialState state;
    state.kind = StateKind::Squeezed;
    state.alpha = std::move(alpha);
    state.pairing = std::move(pairing);
    state.xi = std::move(xi);
    state.drive_sum = drive_sum;
    return state;
}

std::vector<ModePair> auto_pairing(int drive_sum, int n_modes) {
    std::vector<ModePair> pairs;
    for (int p = 1; p <= drive_sum / 2; ++p) {
        const int q = drive_sum - p;
        if (q <= n_modes) pairs.emplace_back(p, q);
    }
    return pairs;
}

XiMap derive_xi(std::complex<double> alpha_drive, const CouplingTensor& tensor,
                const std::vector<ModePair>& pairing, int drive_sum,
                double T_star) {
    XiMap xi;
    for (const auto& [p, q] : pairing) {
        const double A = tensor.A(p, q, drive_sum);
        xi[{p, q}] =
            1i * alpha_drive * tensor.g() * A * T_star / constants::hbar;
    }
    return xi;
}

Eigen::VectorXcd alphas_from_populations(const Eigen::VectorXd& populations,
                                         const std::vector<double>& phases) {
    if (static_cast<std::size_t>(populations.size()) != phases.size())
        throw std::invalid_argument("alphas_from_populations: size mismatch");
    Eigen::VectorXcd alpha(populations.size());
    for (Eigen::Index n = 0; n < populations.size(); ++n) {
        if (populations(n) < 0.0)
            throw std::invalid_argument("alphas_from_populations: negative population");
        alpha(n) = std::sqrt(populations(n)) *
                   std::exp(1i * phases[static_cast<std::size_t>(n)]);
    }
    return alpha;
}

std::vector<double> random_phases(std::uint64_t seed, int count) {
    std::mt19937_64 gen(seed);
    std::vector<double> phases(static_cast<std::size_t>(count));
    for (double& phase : phases)
        phase = 2.0 * pi * static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return phases;
}

// ============================================================================
// CorrelationSet
// ============================================================================

CorrelationSet::CorrelationSet(int n_modes, double omega0)
    : n_modes_(n_modes), omega0_(omega0),
      Q_(Eigen::VectorXcd::Zero(n_modes)),
      N_(Eigen::MatrixXcd::Zero(n_modes, n_modes)),
      A_(Eigen::MatrixXcd::Zero(n_modes, n_modes)) {}

namespace {

inline double re_rotate(std::complex<double> amp, double omega, double t) {
    return (amp * std::exp(-1i * omega * t)).real();
}

} // namespace

double CorrelationSet::Q_value(int n, double t) const {
    return re_rotate(Q_(n - 1), freq_Q(n), t);
}

double CorrelationSet::N_value(int n, int m, double t) const {
    return re_rotate(N_(n - 1, m - 1), freq_N(n, m), t);
}

double CorrelationSet::A_value(int n, int m, double t) const {
    return re_rotate(A_(n - 1, m - 1), freq_A(n, m), t);
}

// ============================================================================
// Closed-form correlators
// ============================================================================

CorrelationSet correlations(const TrialState& state, const ModeBasis& basis) {
    const int n_modes = basis.n_modes();
    state.validate(n_modes);
    CorrelationSet corr(n_modes, basis.omega0());

    switch (state.kind) {
    case StateKind::Fock:
        for (int n = 0; n < n_modes; ++n)
            corr.Nmat()(n, n) = static_cast<double>(state.occupations(n));
        return corr;

    case StateKind::Coherent:
    case StateKind::Squeezed:
        corr.Q() = state.alpha;
        for (int n = 0; n < n_modes; ++n)
            for (int m = 0; m < n_modes; ++m) {
                corr.Nmat()(n, m) = std::conj(state.alpha(n)) * state.alpha(m);
                corr.Amat()(n, m) = state.alpha(n) * state.alpha(m);
            }
        break;
    }

    if (state.kind == StateKind::Squeezed) {
        for (const auto& [p, q] : state.pairing) {
            const std::complex<double> xi = state.xi.at({p, q});
            const double r = std::abs(xi);
            if (r == 0.0) continue;
            const std::complex<double> phase = xi / r;
            const std::complex<double> anom =
                -0.5 * std::sinh(2.0 * r) * phase;
            corr.Nmat()(p - 1, p - 1) += std::sinh(r) * std::sinh(r);
            if (p != q) corr.Nmat()(q - 1, q - 1) += std::sinh(r) * std::sinh(r);
            corr.Amat()(p - 1, q - 1) += anom;
            if (p != q) corr.Amat()(q - 1, p - 1) += anom;
        }
    }
    return corr;
}

// ============================================================================
// Squeezing measure
// ============================================================================

SqueezingMeasure squeezing_measure(const CorrelationSet& corr) {
    const int n_modes = corr.n_modes();
    SqueezingMeasure s;
    s.diff.resize(n_modes, n_modes);
    s.sum.resize(n_modes, n_modes);
    for (int n = 0; n < n_modes; ++n)
        for (int m = 0; m < n_modes; ++m) {
            s.diff(n, m) = corr.Nmat()(n, m) - std::conj(corr.Q()(n)) * corr.Q()(m);
            s.sum(n, m) = corr.Amat()(n, m) - corr.Q()(n) * corr.Q()(m);
        }
    return s;
}

double squeezing_value(const CorrelationSet& corr, const SqueezingMeasure& s,
                       int n, int m, double t) {
    return re_rotate(s.diff(n - 1, m - 1), corr.freq_N(n, m), t) +
           re_rotate(s.sum(n - 1, m - 1), corr.freq_A(n, m), t);
}

} // namespace ladderprobe
