#include "ladderprobe/dynamics.hpp"

#include "ladderprobe/constants.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ladderprobe {

RateModel build_rate_model(const ModeBasis& basis, const CouplingTensor& tensor,
                           double Gamma_override) {
    const LadderConfig& config = basis.config();
    double Gamma = Gamma_override;
    if (Gamma <= 0.0) {
        const double g_over_hbar = tensor.g() / constants::hbar;
        Gamma = g_over_hbar * g_over_hbar / basis.omega0();
    }
    return RateModel{tensor, Gamma, config.kappa, config.Omega0,
                     config.drive_mode, basis.n_modes()};
}

namespace {

// Elementary rate of triple e at (clamped) populations p.
inline double triple_rate(const RateModel& model, const CouplingEntry& e,
                          const Eigen::VectorXd& p) {
    const double Nn = p(e.n - 1);
    const double Nm = p(e.m - 1);
    const double Nl = p(e.l - 1);
    const double bracket = (Nn + 1.0) * (Nm + 1.0) * Nl - Nn * Nm * (Nl + 1.0);
    return model.Gamma * e.A * e.A * bracket;
}

inline Eigen::VectorXd clamped(const Eigen::VectorXd& populations) {
    return populations.cwiseMax(0.0);
}

} // namespace

Eigen::VectorXd downconversion_rhs(const RateModel& model,
                                   const Eigen::VectorXd& populations) {
    const Eigen::VectorXd p = clamped(populations);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(model.n_modes);
    for (const CouplingEntry& e : model.tensor.entries()) {
        const double r = triple_rate(model, e, p);
        rhs(e.n - 1) += r;
        rhs(e.m - 1) += r;
        rhs(e.l - 1) -= r;
    }
    return rhs;
}

Eigen::VectorXd rate_rhs(const RateModel& model,
                         const Eigen::VectorXd& populations) {
    Eigen::VectorXd rhs = downconversion_rhs(model, populations);
    if (model.Omega0 > 0.0) rhs(model.drive_mode - 1) += model.Omega0;
    rhs -= model.kappa * populations;
    return rhs;
}

Eigen::MatrixXd rate_jacobian(const RateModel& model,
                              const Eigen::VectorXd& populations) {
    const Eigen::VectorXd p = clamped(populations);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(model.n_modes, model.n_modes);
    for (const CouplingEntry& e : model.tensor.entries()) {
        const int n = e.n - 1, m = e.m - 1, l = e.l - 1;
        const double Nn = p(n), Nm = p(m), Nl = p(l);
        const double scale = model.Gamma * e.A * e.A;
        // d(bracket)/dN for bracket = (Nn+1)(Nm+1)Nl - Nn Nm (Nl+1); for a
        // diagonal triple the two row increments below combine to the full
        // derivative of (Nn+1)^2 Nl - Nn^2 (Nl+1).
        const double dn = scale * ((Nm + 1.0) * Nl - Nm * (Nl + 1.0));
        const double dm = scale * ((Nn + 1.0) * Nl - Nn * (Nl + 1.0));
        const double dl = scale * ((Nn + 1.0) * (Nm + 1.0) - Nn * Nm);
        for (const auto [row, sign] :
             {std::pair{n, 1.0}, std::pair{m, 1.0}, std::pair{l, -1.0}}) {
            J(row, n) += sign * dn;
            J(row, m) += sign * dm;
            J(row, l) += sign * dl;
        }
    }
    J.diagonal().array() -= model.kappa;
    return J;
}

double photon_weighted_total(const Eigen::VectorXd& populations) {
    double total = 0.0;
    for (Eigen::Index n = 0; n < populations.size(); ++n)
        total += static_cast<double>(n + 1) * populations(n);
    return total;
}

StiffnessError::StiffnessError(double t, double dt)
    : std::runtime_error("integrator step size underflow (dt = " +
                         std::to_string(dt) + ") at t = " + std::to_string(t) +
                         "; system too stiff for explicit stepping"),
      time_(t) {}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5.0;
constexpr double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0;
constexpr double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0;
constexpr double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0,
                 A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0;
constexpr double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0,
                 A63 = 46732.0 / 5247.0, A64 = 49.0 / 176.0,
                 A65 = -5103.0 / 18656.0;
constexpr double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0,
                 B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0;
constexpr double E1 = B1 - 5179.0 / 57600.0, E3 = B3 - 7571.0 / 16695.0,
                 E4 = B4 - 393.0 / 640.0, E5 = B5 + 92097.0 / 339200.0,
                 E6 = B6 - 187.0 / 2100.0, E7 = -1.0 / 40.0;

PopulationTrajectory evolve_fixed_rk4(const RateModel& model,
                                      const Eigen::VectorXd& initial, double t0,
                                      double t1, const IntegratorOptions& options) {
    const double dt = options.fixed_dt;
    const auto n_steps = static_cast<std::size_t>(std::ceil((t1 - t0) / dt - 1e-12));

    PopulationTrajectory traj;
    traj.t.reserve(n_steps + 1);
    traj.N.resize(static_cast<Eigen::Index>(n_steps) + 1, model.n_modes);

    Eigen::VectorXd y = initial;
    traj.t.push_back(t0);
    traj.N.row(0) = y.transpose();

    for (std::size_t step = 0; step < n_steps; ++step) {
        const double t = t0 + static_cast<double>(step) * dt;
        const double h = std::min(dt, t1 - t);
        const Eigen::VectorXd k1 = rate_rhs(model, y);
        const Eigen::VectorXd k2 = rate_rhs(model, y + 0.5 * h * k1);
        const Eigen::VectorXd k3 = rate_rhs(model, y + 0.5 * h * k2);
        const Eigen::VectorXd k4 = rate_rhs(model, y + h * k3);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        y = y.cwiseMax(0.0);
        traj.t.push_back(t + h);
        traj.N.row(static_cast<Eigen::Index>(step) + 1) = y.transpose();
    }
    traj.accepted_steps = n_steps;
    return traj;
}

} // namespace

PopulationTrajectory evolve(const RateModel& model, const Eigen::VectorXd& initial,
                            double t0, double t1, const IntegratorOptions& options) {
    if (initial.size() != model.n_modes)
        throw std::invalid_argument("evolve: initial state size mismatch");
    if (t1 < t0) throw std::invalid_argument("evolve: t1 < t0");

    if (options.fixed_dt > 0.0)
        return evolve_fixed_rk4(model, initial, t0, t1, options);

    const double span = t1 - t0;
    PopulationTrajectory traj;
    Eigen::VectorXd y = initial.cwiseMax(0.0);
    std::vector<Eigen::VectorXd> states;
    traj.t.push_back(t0);
    states.push_back(y);

    if (span == 0.0) {
        traj.N.resize(1, model.n_modes);
        traj.N.row(0) = y.transpose();
        return traj;
    }

    Eigen::VectorXd k1 = rate_rhs(model, y);
    double dt = options.initial_dt;
    if (dt <= 0.0) {
        const double scale = (y.cwiseAbs().maxCoeff() + 1.0);
        const double rate = k1.cwiseAbs().maxCoeff() / scale;
        dt = (rate > 0.0) ? std::min(span, 0.01 / rate) : span / 100.0;
    }
    const double dt_min = span * 1e-15;

    double t = t0;
    Eigen::VectorXd k2(model.n_modes), k3(model.n_modes), k4(model.n_modes),
        k5(model.n_modes), k6(model.n_modes), k7(model.n_modes);

    while (t < t1) {
        if (traj.accepted_steps + traj.rejected_steps >= options.max_steps)
            throw std::runtime_error("evolve: step budget exhausted");
        dt = std::min(dt, t1 - t);
        if (dt < dt_min) throw StiffnessError(t, dt);

        k2 = rate_rhs(model, y + dt * (A21 * k1));
        k3 = rate_rhs(model, y + dt * (A31 * k1 + A32 * k2));
        k4 = rate_rhs(model, y + dt * (A41 * k1 + A42 * k2 + A43 * k3));
        k5 = rate_rhs(model, y + dt * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        k6 = rate_rhs(model,
                      y + dt * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        const Eigen::VectorXd y_new =
            y + dt * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        k7 = rate_rhs(model, y_new);
        const Eigen::VectorXd err_vec =
            dt * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);

        double err = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double tol = options.atol +
                               options.rtol * std::max(std::abs(y(i)), std::abs(y_new(i)));
            const double e = err_vec(i) / tol;
            err += e * e;
        }
        err = std::sqrt(err / static_cast<double>(y.size()));

        if (err <= 1.0) {
            t += dt;
            y = y_new.cwiseMax(0.0);
            k1 = (y_new.array() < 0.0).any() ? rate_rhs(model, y) : k7;
            traj.t.push_back(t);
            states.push_back(y);
            ++traj.accepted_steps;
        } else {
            ++traj.rejected_steps;
        }
        const double factor =
            std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
        dt *= factor;
    }

    traj.N.resize(static_cast<Eigen::Index>(states.size()), model.n_modes);
    for (std::size_t i = 0; i < states.size(); ++i)
        traj.N.row(static_cast<Eigen::Index>(i)) = states[i].transpose();
    return traj;
}

SteadyStateResult steady_state(const RateModel& model,
                               const SteadyStateOptions& options) {
    if (model.kappa <= 0.0)
        throw std::invalid_argument("steady_state: requires kappa > 0");

    const double horizon = options.horizon_factor / model.kappa;
    const Eigen::VectorXd vacuum = Eigen::VectorXd::Zero(model.n_modes);
    const PopulationTrajectory traj =
        evolve(model, vacuum, 0.0, horizon, options.integrator);

    SteadyStateResult result;
    result.populations = traj.N.row(traj.N.rows() - 1).transpose();

    const auto residual_threshold = [&](const Eigen::VectorXd& y) {
        return options.tol * std::max(model.kappa * y.maxCoeff(), model.Omega0);
    };

    // Relaxation time: first trajectory point meeting the tolerance.
    result.t_relax = horizon;
    for (Eigen::Index i = 0; i < traj.N.rows(); ++i) {
        const Eigen::VectorXd yi = traj.N.row(i).transpose();
        if (rate_rhs(model, yi).cwiseAbs().maxCoeff() <= residual_threshold(yi)) {
            result.t_relax = traj.t[static_cast<std::size_t>(i)];
            break;
        }
    }

    Eigen::VectorXd y = result.populations;
    Eigen::VectorXd rhs = rate_rhs(model, y);
    double rhs_norm = rhs.cwiseAbs().maxCoeff();

    for (int iter = 0; iter < options.max_newton_iterations; ++iter) {
        if (rhs_norm <= residual_threshold(y)) break;
        const Eigen::MatrixXd J = rate_jacobian(model, y);
        const Eigen::VectorXd delta = J.fullPivLu().solve(-rhs);

        double damping = 1.0;
        bool improved = false;
        for (int half = 0; half < 30; ++half) {
            const Eigen::VectorXd y_try = (y + damping * delta).cwiseMax(0.0);
            const Eigen::VectorXd rhs_try = rate_rhs(model, y_try);
            const double norm_try = rhs_try.cwiseAbs().maxCoeff();
            if (norm_try < rhs_norm) {
                y = y_try;
                rhs = rhs_try;
                rhs_norm = norm_try;
                improved = true;
                break;
            }
            damping *= 0.5;
        }
        ++result.newton_iterations;
        if (!improved) break;
    }

    result.populations = y;
    result.residual = rhs_norm;
    result.converged = rhs_norm <= residual_threshold(y);
    return result;
}

} // namespace ladderprobe
