#include "ladderprobe/fock_oracle.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

namespace ladderprobe {

TruncationError::TruncationError(int mode, double mass)
    : std::runtime_error("fock oracle: top-level mass " + std::to_string(mass) +
                         " in mode " + std::to_string(mode) +
                         " exceeds truncation threshold"),
      mode_(mode), mass_(mass) {}

namespace {

using SparseOp = Eigen::SparseMatrix<std::complex<double>>;
using StateVec = Eigen::VectorXcd;

// exp(G) v by scaling (repeated application) and Taylor summation.
StateVec expm_multiply(const SparseOp& G, StateVec v) {
    double norm1 = 0.0;
    for (int col = 0; col < G.outerSize(); ++col) {
        double sum = 0.0;
        for (SparseOp::InnerIterator it(G, col); it; ++it) sum += std::abs(it.value());
        norm1 = std::max(norm1, sum);
    }
    int s = 0;
    while ((norm1 / static_cast<double>(1ULL << s)) > 0.5 && s < 30) ++s;
    const double inv_scale = 1.0 / static_cast<double>(1ULL << s);

    for (std::uint64_t rep = 0; rep < (1ULL << s); ++rep) {
        StateVec term = v;
        StateVec acc = v;
        for (int k = 1; k <= 200; ++k) {
            term = (G * term) * (inv_scale / static_cast<double>(k));
            acc += term;
            if (term.norm() <= 1e-18 * acc.norm()) break;
        }
        v = std::move(acc);
    }
    return v;
}

} // namespace

CorrelationSet fock_space_oracle(const TrialState& state, const ModeBasis& basis,
                                 int truncation, double overflow_threshold) {
    const int n_modes = basis.n_modes();
    state.validate(n_modes);
    if (truncation < 2)
        throw std::invalid_argument("fock oracle: truncation must be >= 2");

    // Active modes: anything displaced, occupied, or squeezed.
    std::set<int> active_set;
    if (state.kind == StateKind::Fock) {
        for (int n = 1; n <= n_modes; ++n)
            if (state.occupations(n - 1) != 0) active_set.insert(n);
    } else {
        for (int n = 1; n <= n_modes; ++n)
            if (state.alpha(n - 1) != 0.0) active_set.insert(n);
        for (const auto& [p, q] : state.pairing) {
            if (std::abs(state.xi.at({p, q})) == 0.0) continue;
            active_set.insert(p);
            active_set.insert(q);
        }
    }

    CorrelationSet corr(n_modes, basis.omega0());
    if (active_set.empty()) {
        if (state.kind == StateKind::Fock) return corr; // vacuum
        return corr;
    }
    if (active_set.size() > 3)
        throw std::invalid_argument(
            "fock oracle: more than 3 simultaneously active modes");

    const std::vector<int> active(active_set.begin(), active_set.end());
    const int k = static_cast<int>(active.size());
    Eigen::Index dim = 1;
    std::vector<Eigen::Index> stride(static_cast<std::size_t>(k));
    for (int j = k - 1; j >= 0; --j) {
        stride[static_cast<std::size_t>(j)] = dim;
        dim *= truncation;
    }

    const auto level = [&](Eigen::Index s, int j) {
        return static_cast<int>((s / stride[static_cast<std::size_t>(j)]) % truncation);
    };

    // Annihilation operator of active slot j on the product space.
    const auto make_a = [&](int j) {
        SparseOp a(dim, dim);
        std::vector<Eigen::Triplet<std::complex<double>>> trip;
        trip.reserve(static_cast<std::size_t>(dim));
        for (Eigen::Index s = 0; s < dim; ++s) {
            const int n = level(s, j);
            if (n >= 1)
                trip.emplace_back(s - stride[static_cast<std::size_t>(j)], s,
                                  std::sqrt(static_cast<double>(n)));
        }
        a.setFromTriplets(trip.begin(), trip.end());
        return a;
    };

    std::vector<SparseOp> a_ops;
    a_ops.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) a_ops.push_back(make_a(j));

    const auto slot_of = [&](int mode) {
        return static_cast<int>(std::find(active.begin(), active.end(), mode) -
                                active.begin());
    };

    // --- state preparation ---------------------------------------------------
    StateVec v = StateVec::Zero(dim);
    if (state.kind == StateKind::Fock) {
        Eigen::Index idx = 0;
        for (int j = 0; j < k; ++j) {
            const int occ = state.occupations(active[static_cast<std::size_t>(j)] - 1);
            if (occ >= truncation)
                throw std::invalid_argument("fock oracle: occupation exceeds truncation");
            idx += occ * stride[static_cast<std::size_t>(j)];
        }
        v(idx) = 1.0;
    } else {
        v(0) = 1.0;
        if (state.kind == StateKind::Squeezed) {
            for (const auto& [p, q] : state.pairing) {
                const std::complex<double> xi = state.xi.at({p, q});
                if (std::abs(xi) == 0.0) continue;
                const SparseOp& ap = a_ops[static_cast<std::size_t>(slot_of(p))];
                const SparseOp& aq = a_ops[static_cast<std::size_t>(slot_of(q))];
                SparseOp G;
                if (p == q) {
                    const SparseOp a2 = ap * ap;
                    G = 0.5 * (std::conj(xi) * a2 -
                               xi * SparseOp(a2.adjoint()));
                } else {
                    const SparseOp apq = ap * aq;
                    G = std::conj(xi) * apq - xi * SparseOp(apq.adjoint());
                }
                v = expm_multiply(G, v);
            }
        }
        for (int j = 0; j < k; ++j) {
            const std::complex<double> alpha =
                state.alpha(active[static_cast<std::size_t>(j)] - 1);
            if (alpha == 0.0) continue;
            const SparseOp& a = a_ops[static_cast<std::size_t>(j)];
            const SparseOp G =
                alpha * SparseOp(a.adjoint()) - std::conj(alpha) * a;
            v = expm_multiply(G, v);
        }
    }

    // --- truncation overflow check ------------------------------------------
    for (int j = 0; j < k; ++j) {
        double mass = 0.0;
        for (Eigen::Index s = 0; s < dim; ++s)
            if (level(s, j) == truncation - 1) mass += std::norm(v(s));
        if (mass > overflow_threshold)
            throw TruncationError(active[static_cast<std::size_t>(j)], mass);
    }

    // --- expectation values --------------------------------------------------
    std::vector<StateVec> av(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) av[static_cast<std::size_t>(j)] = a_ops[static_cast<std::size_t>(j)] * v;

    for (int jn = 0; jn < k; ++jn) {
        const int n = active[static_cast<std::size_t>(jn)];
        corr.Q()(n - 1) = v.dot(av[static_cast<std::size_t>(jn)]);
        for (int jm = 0; jm < k; ++jm) {
            const int m = active[static_cast<std::size_t>(jm)];
            corr.Nmat()(n - 1, m - 1) =
                av[static_cast<std::size_t>(jn)].dot(av[static_cast<std::size_t>(jm)]);
            corr.Amat()(n - 1, m - 1) =
                v.dot(a_ops[static_cast<std::size_t>(jn)] * av[static_cast<std::size_t>(jm)]);
        }
    }
    return corr;
}

} // namespace ladderprobe
