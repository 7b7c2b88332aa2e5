#include "table.hpp"

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <string>

// ============================================================================
// Runtime backend selection: AVX2 when the CPU supports it, scalar otherwise.
// LADDERPROBE_KERNELS=scalar|avx2 overrides at startup; force_backend()
// overrides programmatically (used by tests and the CLI --kernels flag).
// ============================================================================

namespace ladderprobe::kernels {

namespace detail {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

} // namespace detail

namespace {

std::atomic<const detail::KernelTable*> g_table{nullptr};
std::atomic<Backend> g_backend{Backend::Scalar};
std::once_flag g_init_flag;

void select(Backend backend) {
    if (backend == Backend::Avx2) {
        const detail::KernelTable* table =
            detail::cpu_has_avx2() ? detail::avx2_table() : nullptr;
        if (table == nullptr)
            throw std::runtime_error("kernels: AVX2 backend not supported on this machine");
        g_table.store(table);
    } else {
        g_table.store(&detail::scalar_table());
    }
    g_backend.store(backend);
}

void init_once() {
    std::call_once(g_init_flag, [] {
        Backend choice =
            (detail::cpu_has_avx2() && detail::avx2_table() != nullptr)
                ? Backend::Avx2
                : Backend::Scalar;
        if (const char* env = std::getenv("LADDERPROBE_KERNELS")) {
            const std::string value(env);
            if (value == "scalar")
                choice = Backend::Scalar;
            else if (value == "avx2")
                choice = Backend::Avx2;
            else
                throw std::runtime_error(
                    "LADDERPROBE_KERNELS must be 'scalar' or 'avx2', got '" + value + "'");
        }
        select(choice);
    });
}

const detail::KernelTable& table() {
    init_once();
    return *g_table.load();
}

} // namespace

Backend active_backend() {
    init_once();
    return g_backend.load();
}

std::string_view backend_name() {
    return active_backend() == Backend::Avx2 ? "avx2" : "scalar";
}

bool backend_supported(Backend backend) {
    if (backend == Backend::Scalar) return true;
    return detail::cpu_has_avx2() && detail::avx2_table() != nullptr;
}

void force_backend(Backend backend) {
    init_once();
    select(backend);
}

void accumulate_tones(std::span<double> out, double t0, double dt,
                      std::span<const Tone> tones) {
    table().accumulate_tones(out.data(), out.size(), t0, dt, tones.data(),
                             tones.size());
}

void sin_bias(std::span<const double> x, double amp, double bias,
              std::span<double> y) {
    table().sin_bias(x.data(), x.size(), amp, bias, y.data());
}

void multiply(std::span<const double> x, std::span<const double> w,
              std::span<double> y) {
    table().multiply(x.data(), w.data(), x.size(), y.data());
}

void scaled_diff(std::span<const double> a, std::span<const double> b,
                 double scale, std::span<double> out) {
    table().scaled_diff(a.data(), b.data(), a.size(), scale, out.data());
}

double sum_squares(std::span<const double> x) {
    return table().sum_squares(x.data(), x.size());
}

Projection project_tone(std::span<const double> x, double t0, double dt,
                        double omega) {
    return table().project_tone(x.data(), x.size(), t0, dt, omega);
}

} // namespace ladderprobe::kernels
