#pragma once

#include <Eigen/Dense>

#include <vector>

// ============================================================================
// LC-ladder normal modes
//
// An N-node ladder of inductors L and ground capacitors C diagonalizes into
// standing-wave modes with sine-band dispersion. This module builds the mode
// frequencies, spatial profiles, and zero-point amplitudes that every other
// layer consumes.
// ============================================================================

namespace ladderprobe {

enum class FnDenominator { Derived, Paper };

/// Ladder circuit parameters plus the impurity placement. SI units.
struct LadderConfig {
    int N = 0;              ///< number of ladder nodes
    double L = 0.0;         ///< per-cell inductance [H]
    double C = 0.0;         ///< per-node ground capacitance [F]
    double EJ_imp = 0.0;    ///< impurity Josephson energy [J]
    int i0 = 0;             ///< impurity left node (1-based)
    int j0 = 0;             ///< impurity right node (1-based)
    double phi_imp = 0.0;   ///< impurity flux bias [rad]
    double kappa = 0.0;     ///< uniform mode loss rate [1/s]
    int drive_mode = 0;     ///< driven mode index (1-based)
    double Omega0 = 0.0;    ///< drive photon feed rate [1/s]
    int n_modes = 0;        ///< retained low-lying modes
    FnDenominator fn_denominator = FnDenominator::Derived;
    double omega0_nominal = 0.0; ///< optional quoted mode spacing [rad/s], 0 = unset

    /// Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

/// Mode frequencies, profiles, and zero-point amplitudes for one ladder.
class ModeBasis {
public:
    ModeBasis(const LadderConfig& config, Eigen::VectorXd omega, double omega0,
              Eigen::MatrixXd X, Eigen::VectorXd phi_zpf, Eigen::VectorXd n_zpf,
              double E_C, double E_L);

    [[nodiscard]] int N() const { return N_; }
    [[nodiscard]] int n_modes() const { return n_modes_; }

    /// Exact dispersion omega_n = (2/sqrt(LC)) sin(n pi / (2N+2)) [rad/s].
    [[nodiscard]] double omega(int n) const { return omega_(n - 1); }

    /// Low-n mode spacing omega0 = pi / ((N+1) sqrt(LC)) [rad/s].
    [[nodiscard]] double omega0() const { return omega0_; }

    /// Linearized spectrum n * omega0, used by the correlation pipeline.
    [[nodiscard]] double harmonic_omega(int n) const { return n * omega0_; }

    /// Spatial profile X_n(i) = sqrt(2/(N+1)) sin(n pi i / (N+1)).
    [[nodiscard]] double X(int n, int i) const { return X_(n - 1, i - 1); }

    /// Zero-point phase amplitude of mode n.
    [[nodiscard]] double phi_zpf(int n) const { return phi_zpf_(n - 1); }

    /// Zero-point charge amplitude of mode n.
    [[nodiscard]] double n_zpf(int n) const { return n_zpf_(n - 1); }

    /// Node-phase expansion coefficient gamma_n(i) = phi_zpf(n) X_n(i).
    [[nodiscard]] double gamma(int n, int i) const {
        return phi_zpf_(n - 1) * X_(n - 1, i - 1);
    }

    [[nodiscard]] double E_C() const { return E_C_; }
    [[nodiscard]] double E_L() const { return E_L_; }
    [[nodiscard]] const LadderConfig& config() const { return config_; }

private:
    LadderConfig config_;
    int N_;
    int n_modes_;
    Eigen::VectorXd omega_;
    double omega0_;
    Eigen::MatrixXd X_; // n_modes x N
    Eigen::VectorXd phi_zpf_;
    Eigen::VectorXd n_zpf_;
    double E_C_;
    double E_L_;
};

/// Builds the retained-mode basis. Throws std::invalid_argument on bad config
/// (including n_modes > N).
[[nodiscard]] ModeBasis build_mode_basis(const LadderConfig& config);

/// Profile formula at arbitrary (possibly virtual) node index; exposes the
/// hard-wall boundary behavior at i = 0 and i = N+1.
[[nodiscard]] double mode_shape(int N, int n, int i);

/// Charging and inductive energies 4e^2/(2C) and (Phi0/2pi)^2/(2L) [J].
[[nodiscard]] double charging_energy(double C);
[[nodiscard]] double inductive_energy(double L);

/// Coefficients c_n of the probed phase observable phi_i - phi_j (j = 0 means
/// the second lead is grounded): c_n = gamma_n(i) - gamma_n(j).
[[nodiscard]] std::vector<double> phase_observable_coefficients(const ModeBasis& basis,
                                                                int i, int j = 0);

} // namespace ladderprobe
