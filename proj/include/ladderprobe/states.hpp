#pragma once

#include "ladderprobe/coupling.hpp"
#include "ladderprobe/mode_basis.hpp"

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <utility>
#include <vector>

// ============================================================================
// Trial states and closed-form correlators
//
// Correlators are tracked as single-frequency complex amplitudes with the
// convention value(t) = Re[amp * exp(-i omega t)]:
//   Q_n  = <a_n^dag + a_n>/2            at omega_n
//   N_nm = <a_n^dag a_m + a_m^dag a_n>/2 at omega_m - omega_n
//   A_nm = <a_n^dag a_m^dag + a_m a_n>/2 at omega_n + omega_m
// The pipeline runs on the linearized spectrum omega_n = n*omega0, under
// which every sum/difference channel is exactly single-frequency. The
// squeezed closed forms are the exact Gaussian results for displacements
// applied after squeezers, including the sinh^2|xi| population each pair
// member's diagonal N entry acquires.
// ============================================================================

namespace ladderprobe {

enum class StateKind { Coherent, Fock, Squeezed };

using ModePair = std::pair<int, int>; // canonical p <= q
using XiMap = std::map<ModePair, std::complex<double>>;

/// Ansatz state over the retained modes.
struct TrialState {
    StateKind kind = StateKind::Coherent;
    Eigen::VectorXcd alpha;            ///< coherent amplitudes (Coherent/Squeezed)
    Eigen::VectorXi occupations;       ///< Fock occupation numbers
    std::vector<ModePair> pairing;     ///< squeezed pairs, p + q = drive_sum
    XiMap xi;                          ///< squeezing parameters at t = 0
    int drive_sum = 0;                 ///< common pair-sum index

    /// Throws std::invalid_argument on inconsistent contents.
    void validate(int n_modes) const;
};

[[nodiscard]] TrialState make_coherent(Eigen::VectorXcd alpha);
[[nodiscard]] TrialState make_fock(Eigen::VectorXi occupations);
[[nodiscard]] TrialState make_squeezed(Eigen::VectorXcd alpha,
                                       std::vector<ModePair> pairing, XiMap xi,
                                       int drive_sum);

/// All pairs {n, drive_sum - n} that fit inside n_modes, including the
/// self-pair when drive_sum is even.
[[nodiscard]] std::vector<ModePair> auto_pairing(int drive_sum, int n_modes);

/// Steady-drive squeezing parameters xi_pq(0) = i alpha_drive g A_pq,drive T"/hbar.
[[nodiscard]] XiMap derive_xi(std::complex<double> alpha_drive,
                              const CouplingTensor& tensor,
                              const std::vector<ModePair>& pairing,
                              int drive_sum, double T_star);

/// Coherent amplitudes sqrt(N_n) e^{i phase_n} from a population vector.
[[nodiscard]] Eigen::VectorXcd alphas_from_populations(const Eigen::VectorXd& populations,
                                                       const std::vector<double>& phases);

/// Deterministic uniform [0, 2pi) phases from a seed.
[[nodiscard]] std::vector<double> random_phases(std::uint64_t seed, int count);

/// Single-frequency amplitudes of Q, N, A for one state.
class CorrelationSet {
public:
    CorrelationSet(int n_modes, double omega0);

    [[nodiscard]] int n_modes() const { return n_modes_; }
    [[nodiscard]] double omega0() const { return omega0_; }

    /// Per-mode frequency of the linearized spectrum.
    [[nodiscard]] double mode_omega(int n) const { return n * omega0_; }
    [[nodiscard]] double freq_Q(int n) const { return mode_omega(n); }
    [[nodiscard]] double freq_N(int n, int m) const {
        return mode_omega(m) - mode_omega(n);
    }
    [[nodiscard]] double freq_A(int n, int m) const {
        return mode_omega(n) + mode_omega(m);
    }

    Eigen::VectorXcd& Q() { return Q_; }
    Eigen::MatrixXcd& Nmat() { return N_; }
    Eigen::MatrixXcd& Amat() { return A_; }
    [[nodiscard]] const Eigen::VectorXcd& Q() const { return Q_; }
    [[nodiscard]] const Eigen::MatrixXcd& Nmat() const { return N_; }
    [[nodiscard]] const Eigen::MatrixXcd& Amat() const { return A_; }

    /// Time-domain values Re[amp e^{-i omega t}].
    [[nodiscard]] double Q_value(int n, double t) const;
    [[nodiscard]] double N_value(int n, int m, double t) const;
    [[nodiscard]] double A_value(int n, int m, double t) const;

private:
    int n_modes_;
    double omega0_;
    Eigen::VectorXcd Q_;
    Eigen::MatrixXcd N_;
    Eigen::MatrixXcd A_;
};

/// Closed-form correlators of a trial state on the basis' linearized spectrum.
[[nodiscard]] CorrelationSet correlations(const TrialState& state,
                                          const ModeBasis& basis);

/// Connected remainder S_nm = N_nm + A_nm - 2 Q_n Q_m, organized per frequency
/// channel (difference and sum). Zero iff mean-field clustering holds.
struct SqueezingMeasure {
    Eigen::MatrixXcd diff; ///< N_nm - conj(q_n) q_m at omega_m - omega_n
    Eigen::MatrixXcd sum;  ///< A_nm - q_n q_m at omega_n + omega_m

    [[nodiscard]] double magnitude(int n, int m) const {
        return std::abs(diff(n - 1, m - 1)) + std::abs(sum(n - 1, m - 1));
    }
};

[[nodiscard]] SqueezingMeasure squeezing_measure(const CorrelationSet& corr);

/// S_nm evaluated at time t.
[[nodiscard]] double squeezing_value(const CorrelationSet& corr,
                                     const SqueezingMeasure& s, int n, int m,
                                     double t);

} // namespace ladderprobe
