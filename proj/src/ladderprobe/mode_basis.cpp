#include "ladderprobe/mode_basis.hpp"

#include "ladderprobe/constants.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ladderprobe {

using constants::pi;

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("ladder config: " + what);
}

} // namespace

void LadderConfig::validate() const {
    require(N >= 1, "N must be >= 1");
    require(L > 0.0, "L must be positive");
    require(C > 0.0, "C must be positive");
    require(EJ_imp >= 0.0, "EJ_imp must be non-negative");
    if (EJ_imp > 0.0) {
        require(i0 >= 1 && i0 <= N, "i0 out of range [1, N]");
        require(j0 >= 1 && j0 <= N, "j0 out of range [1, N]");
        require(i0 != j0, "impurity nodes i0 and j0 must differ");
    }
    require(kappa >= 0.0, "kappa must be non-negative");
    require(n_modes >= 1, "n_modes must be >= 1");
    require(n_modes <= N, "n_modes must not exceed N");
    require(Omega0 >= 0.0, "Omega0 must be non-negative");
    if (Omega0 > 0.0)
        require(drive_mode >= 1 && drive_mode <= n_modes,
                "drive_mode out of range [1, n_modes]");
    else
        require(drive_mode >= 0 && drive_mode <= n_modes,
                "drive_mode out of range [0, n_modes]");
}

ModeBasis::ModeBasis(const LadderConfig& config, Eigen::VectorXd omega,
                     double omega0, Eigen::MatrixXd X, Eigen::VectorXd phi_zpf,
                     Eigen::VectorXd n_zpf, double E_C, double E_L)
    : config_(config), N_(config.N), n_modes_(config.n_modes),
      omega_(std::move(omega)), omega0_(omega0), X_(std::move(X)),
      phi_zpf_(std::move(phi_zpf)), n_zpf_(std::move(n_zpf)), E_C_(E_C), E_L_(E_L) {}

double mode_shape(int N, int n, int i) {
    return std::sqrt(2.0 / (N + 1)) * std::sin(n * pi * i / (N + 1));
}

double charging_energy(double C) {
    return 4.0 * constants::e_charge * constants::e_charge / (2.0 * C);
}

double inductive_energy(double L) {
    return constants::phi0_red * constants::phi0_red / (2.0 * L);
}

ModeBasis build_mode_basis(const LadderConfig& config) {
    config.validate();

    const int N = config.N;
    const int n_modes = config.n_modes;
    const double lc_root = std::sqrt(config.L * config.C);
    const double E_C = charging_energy(config.C);
    const double E_L = inductive_energy(config.L);

    Eigen::VectorXd omega(n_modes);
    Eigen::MatrixXd X(n_modes, N);
    Eigen::VectorXd phi_zpf(n_modes);
    Eigen::VectorXd n_zpf(n_modes);

    const double phi_scale = std::pow(2.0 * E_C / E_L, 0.25);
    const double n_scale = std::pow(E_L / (32.0 * E_C), 0.25);

    for (int n = 1; n <= n_modes; ++n) {
        omega(n - 1) = (2.0 / lc_root) * std::sin(n * pi / (2.0 * (N + 1)));
        phi_zpf(n - 1) = std::sqrt((N + 1) / (n * pi)) * phi_scale;
        n_zpf(n - 1) = std::sqrt(n * pi / (N + 1)) * n_scale;
        for (int i = 1; i <= N; ++i) X(n - 1, i - 1) = mode_shape(N, n, i);
    }

    const double omega0 = pi / ((N + 1) * lc_root);
    return ModeBasis(config, std::move(omega), omega0, std::move(X),
                     std::move(phi_zpf), std::move(n_zpf), E_C, E_L);
}

std::vector<double> phase_observable_coefficients(const ModeBasis& basis, int i,
                                                  int j) {
    if (i < 1 || i > basis.N())
        throw std::invalid_argument("phase observable: node i out of range");
    if (j < 0 || j > basis.N())
        throw std::invalid_argument("phase observable: node j out of range");
    if (j == i)
        throw std::invalid_argument("phase observable: nodes must differ");

    std::vector<double> coeffs(static_cast<std::size_t>(basis.n_modes()));
    for (int n = 1; n <= basis.n_modes(); ++n) {
        const double gj = (j == 0) ? 0.0 : basis.gamma(n, j);
        coeffs[static_cast<std::size_t>(n - 1)] = basis.gamma(n, i) - gj;
    }
    return coeffs;
}

} // namespace ladderprobe
