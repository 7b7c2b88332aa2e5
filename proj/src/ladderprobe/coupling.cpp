#include "ladderprobe/coupling.hpp"

#include "ladderprobe/constants.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ladderprobe {

using constants::pi;

CouplingTensor::CouplingTensor(std::vector<CouplingEntry> entries, double g,
                               int n_modes)
    : entries_(std::move(entries)), g_(g), n_modes_(n_modes) {
    std::sort(entries_.begin(), entries_.end(),
              [](const CouplingEntry& a, const CouplingEntry& b) {
                  return std::tie(a.l, a.n) < std::tie(b.l, b.n);
              });
}

double CouplingTensor::A(int n, int m, int l) const {
    const int lo = std::min(n, m);
    const int hi = std::max(n, m);
    for (const CouplingEntry& e : entries_)
        if (e.n == lo && e.m == hi && e.l == l) return e.A;
    return 0.0;
}

std::vector<double> coupling_overlaps(int N, int i0, int j0, int n_modes,
                                      FnDenominator denominator) {
    const double D = (denominator == FnDenominator::Derived)
                         ? 2.0 * (N + 1)
                         : 2.0 * N + 1.0;
    std::vector<double> f(static_cast<std::size_t>(n_modes));
    for (int n = 1; n <= n_modes; ++n) {
        f[static_cast<std::size_t>(n - 1)] =
            (1.0 / std::sqrt(static_cast<double>(n))) *
            std::sin(n * pi * (i0 - j0) / D) * std::cos(n * pi * (i0 + j0) / D);
    }
    return f;
}

CouplingTensor build_coupling_tensor(const ModeBasis& basis, int i0, int j0) {
    if (i0 < 1 || i0 > basis.N() || j0 < 1 || j0 > basis.N())
        throw std::invalid_argument("coupling tensor: impurity node out of range");

    const LadderConfig& config = basis.config();
    const int n_modes = basis.n_modes();
    const std::vector<double> f =
        coupling_overlaps(basis.N(), i0, j0, n_modes, config.fn_denominator);

    // (sqrt(2/pi))^3 * 2^3 * 2^(3/4)
    const double prefactor =
        std::pow(2.0 / pi, 1.5) * 8.0 * std::pow(2.0, 0.75);

    std::vector<CouplingEntry> entries;
    for (int l = 2; l <= n_modes; ++l) {
        for (int n = 1; n <= l / 2; ++n) {
            const int m = l - n;
            if (m > n_modes) continue;
            const double A = prefactor * f[static_cast<std::size_t>(n - 1)] *
                             f[static_cast<std::size_t>(m - 1)] *
                             f[static_cast<std::size_t>(l - 1)];
            if (A != 0.0) entries.push_back({n, m, l, A});
        }
    }

    const double g =
        config.EJ_imp * std::pow(basis.E_C() / basis.E_L(), 0.75);
    return CouplingTensor(std::move(entries), g, n_modes);
}

CouplingTensor build_coupling_tensor(const ModeBasis& basis) {
    return build_coupling_tensor(basis, basis.config().i0, basis.config().j0);
}

} // namespace ladderprobe
