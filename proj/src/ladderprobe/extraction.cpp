#include "ladderprobe/extraction.hpp"

#include "ladderprobe/constants.hpp"
#include "ladderprobe/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

namespace ladderprobe {

using constants::pi;

namespace {

constexpr double kSvdThreshold = 1e-10;
constexpr double kDivisorThreshold = 1e-6;

/// Grid sums sum_k cos(omega t_k), sum_k sin(omega t_k) over t_k = t0 + k dt,
/// via the closed geometric-series form.
std::pair<double, double> grid_sums(double omega, double t0, double dt,
                                    std::size_t count) {
    if (std::abs(omega * dt) < 1e-14)
        return {static_cast<double>(count) * std::cos(omega * t0),
                static_cast<double>(count) * std::sin(omega * t0)};
    const std::complex<double> step(std::cos(omega * dt), std::sin(omega * dt));
    const std::complex<double> first(std::cos(omega * t0), std::sin(omega * t0));
    const std::complex<double> num =
        1.0 - std::pow(step, static_cast<double>(count));
    const std::complex<double> total = first * num / (1.0 - step);
    return {total.real(), total.imag()};
}

/// Phase-difference coefficients gamma_n(i) - gamma_n(j), j = 0 grounded.
std::vector<double> entry_coeffs(const ModeBasis& basis, int n_modes,
                                 const MeasurementEntry& entry) {
    std::vector<double> c(static_cast<std::size_t>(n_modes));
    for (int n = 1; n <= n_modes; ++n) {
        const double gi = basis.gamma(n, entry.site_i);
        const double gj = entry.site_j == 0 ? 0.0 : basis.gamma(n, entry.site_j);
        c[static_cast<std::size_t>(n - 1)] = gi - gj;
    }
    return c;
}

std::vector<double> dressed_coeffs(const ModeBasis& basis, int n_modes,
                                   const MeasurementEntry& entry,
                                   const ProbeConfig& probe) {
    auto c = entry_coeffs(basis, n_modes, entry);
    for (int n = 1; n <= n_modes; ++n)
        c[static_cast<std::size_t>(n - 1)] *= beta(probe, n * basis.omega0());
    return c;
}

bool is_linear(double phi_ext) { return std::abs(phi_ext) < 1e-9; }

/// Row of group coefficients for one pi/2 entry: the amplitude at the group
/// frequency is -K H(w) sum_labels coef(label) x_label with these coefs.
Eigen::RowVectorXd group_row(const DegeneracyGroup& group,
                             const std::vector<double>& d) {
    Eigen::RowVectorXd row(static_cast<Eigen::Index>(group.labels.size()));
    for (std::size_t c = 0; c < group.labels.size(); ++c) {
        const auto& label = group.labels[c];
        const double dn = d[static_cast<std::size_t>(label.n - 1)];
        const double dm = d[static_cast<std::size_t>(label.m - 1)];
        // Off-diagonal unknowns appear twice in the double mode sum.
        row(static_cast<Eigen::Index>(c)) =
            (label.n == label.m ? 1.0 : 2.0) * dn * dm;
    }
    return row;
}

struct GroupSvd {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd;
    int rank = 0;
    double condition = std::numeric_limits<double>::infinity();
};

GroupSvd analyze(const Eigen::MatrixXd& rows) {
    GroupSvd out;
    out.svd.compute(rows, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = out.svd.singularValues();
    if (sigma.size() == 0) return out;
    const double cut = kSvdThreshold * sigma(0);
    for (Eigen::Index k = 0; k < sigma.size(); ++k)
        if (sigma(k) > cut) ++out.rank;
    if (out.rank == static_cast<int>(rows.cols()) && out.rank > 0)
        out.condition = sigma(0) / sigma(out.rank - 1);
    return out;
}

/// Smallest singular value of the row space (sigma_min(rows) for wide
/// matrices measures row independence; for tall ones the usual sigma_min).
struct RowSpace {
    double min_sigma = 0.0;
    int rank = 0;
};

RowSpace row_space(const Eigen::MatrixXd& rows) {
    RowSpace out;
    if (rows.rows() == 0) return out;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows);
    const auto& sigma = svd.singularValues();
    out.min_sigma = sigma.minCoeff();
    const double cut = kSvdThreshold * sigma(0);
    for (Eigen::Index k = 0; k < sigma.size(); ++k)
        if (sigma(k) > cut) ++out.rank;
    return out;
}

Eigen::VectorXcd solve_group(const GroupSvd& g, const Eigen::VectorXcd& rhs) {
    const auto& sigma = g.svd.singularValues();
    const double cut = sigma.size() ? kSvdThreshold * sigma(0) : 0.0;
    const Eigen::VectorXcd projected = g.svd.matrixU().adjoint() * rhs;
    Eigen::VectorXcd scaled = Eigen::VectorXcd::Zero(sigma.size());
    for (Eigen::Index k = 0; k < sigma.size(); ++k)
        if (sigma(k) > cut) scaled(k) = projected(k) / sigma(k);
    return g.svd.matrixV() * scaled;
}

std::map<long, std::complex<double>> bin_components(
    const std::vector<SpectralComponent>& components, double bin_width) {
    std::map<long, std::complex<double>> binned;
    for (const auto& comp : components)
        binned[std::lround(comp.omega / bin_width)] += comp.amplitude;
    return binned;
}

} // namespace

DegeneracyTable degeneracy_groups(const ModeBasis& basis, int n_modes) {
    if (n_modes < 1) throw std::invalid_argument("degeneracy table: n_modes < 1");
    DegeneracyTable table;
    table.bin_width = basis.omega0() / 100.0;

    std::map<long, DegeneracyGroup> groups;
    auto add = [&](double omega, CorrLabel label) {
        const long bin = std::lround(omega / table.bin_width);
        auto& group = groups[bin];
        group.bin = bin;
        group.omega = std::abs(omega);
        group.labels.push_back(label);
    };
    for (int n = 1; n <= n_modes; ++n) {
        for (int m = n; m <= n_modes; ++m) {
            add(basis.harmonic_omega(m) - basis.harmonic_omega(n),
                {CorrChannel::Normal, n, m});
            add(basis.harmonic_omega(n) + basis.harmonic_omega(m),
                {CorrChannel::Anomalous, n, m});
        }
    }
    table.groups.reserve(groups.size());
    for (auto& [bin, group] : groups) {
        table.max_group_size =
            std::max(table.max_group_size, static_cast<int>(group.labels.size()));
        table.groups.push_back(std::move(group));
    }
    return table;
}

QuadratureExtraction extract_quadratures(
    const TimeSeries& record, const ModeBasis& basis, int site,
    const std::vector<std::complex<double>>& per_mode_scale) {
    const int M = basis.n_modes();
    const std::size_t n = record.samples.size();
    if (site < 1 || site > basis.N())
        throw std::invalid_argument("quadrature fit: site out of range");
    if (!per_mode_scale.empty() && static_cast<int>(per_mode_scale.size()) != M)
        throw std::invalid_argument("quadrature fit: per-mode scale size mismatch");
    const double span = static_cast<double>(n) * record.dt;
    if (n < 2 || span < 10.0 * 2.0 * pi / basis.omega0() * (1.0 - 1e-12))
        throw std::invalid_argument(
            "quadrature fit: record must span 10 fundamental periods");

    // Normal equations of the tone-stack fit, assembled from closed-form
    // grid sums; the data projections go through the sample kernels.
    Eigen::MatrixXd G(2 * M, 2 * M);
    Eigen::VectorXd b(2 * M);
    std::vector<double> omegas(static_cast<std::size_t>(M));
    for (int k = 0; k < M; ++k) omegas[static_cast<std::size_t>(k)] = (k + 1) * basis.omega0();

    for (int a = 0; a < M; ++a) {
        const auto proj = kernels::project_tone(record.samples, record.t0, record.dt,
                                               omegas[static_cast<std::size_t>(a)]);
        b(a) = proj.cos_sum;
        b(M + a) = proj.sin_sum;
        for (int c = 0; c < M; ++c) {
            const double wa = omegas[static_cast<std::size_t>(a)];
            const double wc = omegas[static_cast<std::size_t>(c)];
            const auto [cd, sd] = grid_sums(wa - wc, record.t0, record.dt, n);
            const auto [cs, ss] = grid_sums(wa + wc, record.t0, record.dt, n);
            G(a, c) = 0.5 * (cd + cs);         // cos_a cos_c
            G(a, M + c) = 0.5 * (ss - sd);     // cos_a sin_c
            G(M + a, c) = 0.5 * (ss + sd);     // sin_a cos_c
            G(M + a, M + c) = 0.5 * (cd - cs); // sin_a sin_c
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(G);
    const auto& lambda = eigen.eigenvalues();
    const double lmax = lambda.maxCoeff();
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(lambda.size());
    for (Eigen::Index k = 0; k < lambda.size(); ++k)
        if (lambda(k) > kSvdThreshold * lmax) inv(k) = 1.0 / lambda(k);
    const Eigen::VectorXd x =
        eigen.eigenvectors() * inv.asDiagonal() * eigen.eigenvectors().transpose() * b;

    QuadratureExtraction result;
    result.Q = Eigen::VectorXcd::Zero(M);
    result.recoverable.assign(static_cast<std::size_t>(M), 1);
    result.condition = lambda.minCoeff() > 0.0
                           ? lmax / lambda.minCoeff()
                           : std::numeric_limits<double>::infinity();

    std::vector<std::complex<double>> divisor(static_cast<std::size_t>(M));
    double max_abs = 0.0;
    for (int k = 0; k < M; ++k) {
        const std::complex<double> scale =
            per_mode_scale.empty() ? 1.0 : per_mode_scale[static_cast<std::size_t>(k)];
        divisor[static_cast<std::size_t>(k)] = 2.0 * basis.gamma(k + 1, site) * scale;
        max_abs = std::max(max_abs, std::abs(divisor[static_cast<std::size_t>(k)]));
    }
    for (int k = 0; k < M; ++k) {
        if (std::abs(divisor[static_cast<std::size_t>(k)]) < kDivisorThreshold * max_abs) {
            result.recoverable[static_cast<std::size_t>(k)] = 0;
            continue;
        }
        result.Q(k) = std::complex<double>(x(k), x(M + k)) /
                      divisor[static_cast<std::size_t>(k)];
    }
    return result;
}

ExtractionResult assemble_and_solve(
    const MeasurementPlan& plan,
    const std::vector<std::vector<SpectralComponent>>& measured,
    const ModeBasis& basis) {
    if (measured.size() != plan.entries.size())
        throw std::invalid_argument("solve: one component list per plan entry required");
    const int M = plan.n_modes;
    if (M < 1 || M > basis.n_modes())
        throw std::invalid_argument("solve: plan n_modes outside the basis");

    const double K = plan.probe.output_scale();
    const auto table = degeneracy_groups(basis, M);
    ExtractionResult result{CorrelationSet(M, basis.omega0()), {}, true};

    std::vector<std::size_t> linear_entries, quad_entries;
    for (std::size_t k = 0; k < plan.entries.size(); ++k)
        (is_linear(plan.entries[k].phi_ext) ? linear_entries : quad_entries).push_back(k);

    std::vector<std::vector<double>> dressed(plan.entries.size());
    std::vector<std::map<long, std::complex<double>>> binned(plan.entries.size());
    for (std::size_t k = 0; k < plan.entries.size(); ++k) {
        dressed[k] = dressed_coeffs(basis, M, plan.entries[k], plan.probe);
        binned[k] = bin_components(measured[k], table.bin_width);
    }

    // Q channel: per mode, least squares over the linear-regime entries.
    for (int n = 1; n <= M; ++n) {
        const std::complex<double> H =
            channel_response(plan.probe, n * basis.omega0());
        std::complex<double> num = 0.0;
        double den = 0.0;
        for (std::size_t k : linear_entries) {
            const std::complex<double> w = 2.0 * K * dressed[k][static_cast<std::size_t>(n - 1)] * H;
            const auto it = binned[k].find(100L * n);
            const std::complex<double> amp = it == binned[k].end() ? 0.0 : it->second;
            num += std::conj(w) * amp;
            den += std::norm(w);
        }
        if (den > 0.0) result.recovered.Q()(n - 1) = num / den;
    }

    // Two-body channels: one small least-squares system per frequency group.
    for (const auto& group : table.groups) {
        GroupReport report;
        report.bin = group.bin;
        report.omega = group.omega;
        report.unknowns = group.labels.size();

        Eigen::MatrixXd rows(static_cast<Eigen::Index>(quad_entries.size()),
                             static_cast<Eigen::Index>(group.labels.size()));
        Eigen::VectorXcd rhs(static_cast<Eigen::Index>(quad_entries.size()));
        for (std::size_t r = 0; r < quad_entries.size(); ++r) {
            const std::size_t k = quad_entries[r];
            rows.row(static_cast<Eigen::Index>(r)) = group_row(group, dressed[k]);
            const auto it = binned[k].find(group.bin);
            std::complex<double> amp = it == binned[k].end() ? 0.0 : it->second;
            if (group.bin == 0) {
                // Remove the constant offset and zero-point part analytically.
                double zp = 0.0;
                for (double dn : dressed[k]) zp += dn * dn;
                const std::complex<double> vacuum = K * (1.0 - 0.5 * zp);
                rhs(static_cast<Eigen::Index>(r)) = (vacuum - amp) / K;
            } else {
                const std::complex<double> H =
                    channel_response(plan.probe, group.omega);
                rhs(static_cast<Eigen::Index>(r)) = amp / (-K * H);
            }
        }

        const GroupSvd svd = analyze(rows);
        report.rank = svd.rank;
        report.condition = svd.condition;
        if (svd.rank < static_cast<int>(group.labels.size())) {
            result.full_rank = false;
            // Suggest site pairs that raise the rank of this group.
            for (int i = 1; i <= basis.N() && report.suggested_pairs.size() < 3; ++i) {
                for (int j = 0; j < i && report.suggested_pairs.size() < 3; ++j) {
                    MeasurementEntry candidate{i, j, pi / 2};
                    Eigen::MatrixXd augmented(rows.rows() + 1, rows.cols());
                    augmented.topRows(rows.rows()) = rows;
                    augmented.bottomRows(1) =
                        group_row(group, dressed_coeffs(basis, M, candidate, plan.probe));
                    if (analyze(augmented).rank > svd.rank)
                        report.suggested_pairs.emplace_back(i, j);
                }
            }
        } else {
            const Eigen::VectorXcd x = solve_group(svd, rhs);
            for (std::size_t c = 0; c < group.labels.size(); ++c) {
                const auto& label = group.labels[c];
                const auto value = x(static_cast<Eigen::Index>(c));
                if (label.channel == CorrChannel::Normal) {
                    result.recovered.Nmat()(label.n - 1, label.m - 1) = value;
                    result.recovered.Nmat()(label.m - 1, label.n - 1) = std::conj(value);
                } else {
                    result.recovered.Amat()(label.n - 1, label.m - 1) = value;
                    result.recovered.Amat()(label.m - 1, label.n - 1) = value;
                }
            }
        }
        result.reports.push_back(std::move(report));
    }
    return result;
}

MeasurementPlan plan_measurements(const ModeBasis& basis, int n_modes,
                                  const ProbeConfig& probe, std::uint64_t seed) {
    if (n_modes < 1 || n_modes > basis.n_modes())
        throw std::invalid_argument("plan: n_modes outside the basis");

    MeasurementPlan plan;
    plan.probe = probe;
    plan.n_modes = n_modes;
    const auto table = degeneracy_groups(basis, n_modes);
    for (const auto& group : table.groups)
        plan.expected_frequencies.push_back(group.omega);

    // Linear-regime entry for the Q channel: the site where the weakest mode
    // coefficient is largest.
    int best_site = 1;
    double best_floor = -1.0;
    for (int i = 1; i <= basis.N(); ++i) {
        double floor = std::numeric_limits<double>::infinity();
        for (int n = 1; n <= n_modes; ++n)
            floor = std::min(floor, std::abs(basis.gamma(n, i)));
        if (floor > best_floor) {
            best_floor = floor;
            best_site = i;
        }
    }
    plan.entries.push_back({best_site, 0, 0.0});

    // Candidate pool: all grounded singles plus a seeded sample of pairs.
    std::vector<MeasurementEntry> candidates;
    for (int i = 1; i <= basis.N(); ++i) candidates.push_back({i, 0, pi / 2});
    std::vector<MeasurementEntry> pairs;
    for (int i = 1; i <= basis.N(); ++i)
        for (int j = i + 1; j <= basis.N(); ++j) pairs.push_back({i, j, pi / 2});
    std::mt19937_64 rng(seed);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    const std::size_t pair_budget = 189;
    for (std::size_t k = 0; k < std::min(pair_budget, pairs.size()); ++k)
        candidates.push_back(pairs[k]);

    std::vector<std::vector<double>> cand_dressed(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c)
        cand_dressed[c] = dressed_coeffs(basis, n_modes, candidates[c], probe);

    // Greedy growth, lexicographic objective: first the total rank across
    // groups, then the worst group's minimum row-space singular value.
    std::vector<Eigen::MatrixXd> rows(table.groups.size());
    for (std::size_t g = 0; g < table.groups.size(); ++g)
        rows[g].resize(0, static_cast<Eigen::Index>(table.groups[g].labels.size()));

    auto augment = [](const Eigen::MatrixXd& base, const Eigen::RowVectorXd& row) {
        Eigen::MatrixXd grown(base.rows() + 1, base.cols());
        grown.topRows(base.rows()) = base;
        grown.bottomRows(1) = row;
        return grown;
    };

    const int budget = table.max_group_size + 2;
    std::vector<char> used(candidates.size(), 0);
    for (int step = 0; step < budget; ++step) {
        long best_rank = -1;
        double best_floor = -1.0;
        std::size_t best_candidate = candidates.size();
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (used[c]) continue;
            long total_rank = 0;
            double floor = std::numeric_limits<double>::infinity();
            for (std::size_t g = 0; g < table.groups.size(); ++g) {
                const RowSpace rs = row_space(
                    augment(rows[g], group_row(table.groups[g], cand_dressed[c])));
                total_rank += rs.rank;
                floor = std::min(floor, rs.min_sigma);
            }
            if (total_rank > best_rank ||
                (total_rank == best_rank && floor > best_floor)) {
                best_rank = total_rank;
                best_floor = floor;
                best_candidate = c;
            }
        }
        if (best_candidate == candidates.size()) break;
        used[best_candidate] = 1;
        plan.entries.push_back(candidates[best_candidate]);
        bool all_full = true;
        for (std::size_t g = 0; g < table.groups.size(); ++g) {
            rows[g] = augment(rows[g], group_row(table.groups[g],
                                                 cand_dressed[best_candidate]));
            if (row_space(rows[g]).rank < rows[g].cols()) all_full = false;
        }
        if (all_full) break;
    }
    return plan;
}

} // namespace ladderprobe
