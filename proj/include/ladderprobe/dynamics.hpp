#pragma once

#include "ladderprobe/coupling.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

// ============================================================================
// Golden-rule population dynamics
//
// Each retained triple (n, m, l), l = n + m, carries the elementary net rate
//   r = Gamma A_nml^2 [ (N_n+1)(N_m+1) N_l - N_n N_m (N_l+1) ],
// which moves one l-photon into one n- and one m-photon (so a diagonal
// triple adds two photons to mode n). A constant feed Omega0 drives one mode
// and every mode decays at kappa. The weighted total sum_n n*N_n is an exact
// invariant of the loss-free cascade.
// ============================================================================

namespace ladderprobe {

/// Rate-equation model over the retained modes.
struct RateModel {
    CouplingTensor tensor;
    double Gamma = 0.0;     ///< cascade rate scale [1/s]
    double kappa = 0.0;     ///< uniform loss rate [1/s]
    double Omega0 = 0.0;    ///< drive feed rate [1/s]
    int drive_mode = 0;     ///< driven mode (1-based)
    int n_modes = 0;
};

/// Builds the model; Gamma_override <= 0 selects the default g^2/(hbar^2 omega0).
[[nodiscard]] RateModel build_rate_model(const ModeBasis& basis,
                                         const CouplingTensor& tensor,
                                         double Gamma_override = 0.0);

/// Cascade-only contribution dN/dt (no drive, no loss). Populations are
/// clamped at zero for rate evaluation.
[[nodiscard]] Eigen::VectorXd downconversion_rhs(const RateModel& model,
                                                 const Eigen::VectorXd& populations);

/// Full right-hand side: cascade + drive - kappa N.
[[nodiscard]] Eigen::VectorXd rate_rhs(const RateModel& model,
                                       const Eigen::VectorXd& populations);

/// Analytic Jacobian of rate_rhs.
[[nodiscard]] Eigen::MatrixXd rate_jacobian(const RateModel& model,
                                            const Eigen::VectorXd& populations);

/// Conserved weighting of the loss-free cascade: sum_n n * N_n.
[[nodiscard]] double photon_weighted_total(const Eigen::VectorXd& populations);

/// Thrown when adaptive stepping underflows; carries the offending time.
class StiffnessError : public std::runtime_error {
public:
    StiffnessError(double t, double dt);
    [[nodiscard]] double time() const { return time_; }

private:
    double time_;
};

struct IntegratorOptions {
    double rtol = 1e-8;
    double atol = 1e-12;
    double fixed_dt = 0.0;      ///< > 0 selects fixed-step RK4
    double initial_dt = 0.0;    ///< 0 = automatic
    std::size_t max_steps = 50'000'000;
};

/// Accepted-step time grid and populations (rows = times, cols = modes).
struct PopulationTrajectory {
    std::vector<double> t;
    Eigen::MatrixXd N;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
};

/// Integrates the rate equation over [t0, t1]. Adaptive embedded RK (5th/4th
/// order) by default; fixed-step classical RK4 when options.fixed_dt > 0.
/// Accepted states are clamped to non-negative populations.
[[nodiscard]] PopulationTrajectory evolve(const RateModel& model,
                                          const Eigen::VectorXd& initial,
                                          double t0, double t1,
                                          const IntegratorOptions& options = {});

struct SteadyStateOptions {
    double tol = 1e-8;          ///< residual threshold factor
    double horizon_factor = 20.0; ///< pre-integration span in units of 1/kappa
    int max_newton_iterations = 50;
    IntegratorOptions integrator{};
};

struct SteadyStateResult {
    Eigen::VectorXd populations;
    double residual = 0.0;      ///< final ||rhs||_inf
    bool converged = false;
    double t_relax = 0.0;       ///< time the pre-integration first met tolerance
    int newton_iterations = 0;
};

/// Integrates from vacuum over horizon_factor/kappa, then Newton-refines.
/// Converged when ||rhs||_inf < tol * max(kappa * max N, Omega0).
/// Requires kappa > 0.
[[nodiscard]] SteadyStateResult steady_state(const RateModel& model,
                                             const SteadyStateOptions& options = {});

} // namespace ladderprobe
