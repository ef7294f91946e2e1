// Times the OpenMP kernels against their serial reference implementations.

#include "spde/kernels.hpp"
#include "spde/law.hpp"
#include "spde/mc.hpp"
#include "spde/noise.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using clock_type = std::chrono::steady_clock;

template <typename F>
double time_ms(F&& f, int reps = 3) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = clock_type::now();
        f();
        const auto t1 = clock_type::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void row(const char* name, double serial_ms, double omp_ms) {
    std::printf("%-28s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms, omp_ms, serial_ms / omp_ms);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run serial code\n");
#endif
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.1, 0.9);

    {
        const std::size_t n = 768;
        std::vector<double> f(n), g(n), qh(n * n), cov_s(n * n), cov_p(n * n);
        for (auto& v : f) v = unif(rng);
        for (auto& v : g) v = unif(rng);
        for (auto& v : qh) v = unif(rng);
        const double s = time_ms([&] { spde::kernels::geometric_covariance_serial(f, g, qh, 1e-3, 4096, cov_s); });
        const double p = time_ms([&] { spde::kernels::geometric_covariance_omp(f, g, qh, 1e-3, 4096, cov_p); });
        row("geometric_covariance", s, p);
    }
    {
        const std::size_t dim = 127, k = 512;
        std::vector<double> gamma(dim * k), d(dim), diag(k), out_s(k * k), out_p(k * k);
        for (auto& v : gamma) v = unif(rng);
        for (auto& v : d) v = unif(rng);
        for (auto& v : diag) v = unif(rng);
        const double s = time_ms([&] { spde::kernels::congruence_minus_diag_serial(gamma, d, diag, dim, k, out_s); });
        const double p = time_ms([&] { spde::kernels::congruence_minus_diag_omp(gamma, d, diag, dim, k, out_p); });
        row("congruence_minus_diag", s, p);
    }
    {
        std::vector<double> grid(1 << 18);
        for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 1e-6 + 1e-3 * static_cast<double>(i);
        auto fn = [](double z) { return std::abs(std::exp(-32 * z) - std::pow(1.0 / (1.0 + z), 32)); };
        const double s = time_ms([&] { (void)spde::kernels::argmax_on_grid_serial(grid, fn); });
        const double p = time_ms([&] { (void)spde::kernels::argmax_on_grid_omp(grid, fn); });
        row("argmax_on_grid", s, p);
    }
    {
        const auto model = spde::build_dirichlet_laplacian_1d(16);
        const auto space = spde::build_spectral_space(16, model);
        const auto q = spde::white_covariance(16);
        const spde::ThetaScheme scheme(1.0, 1.0, 64);
        const spde::SchemeSampler sampler(space, q, scheme, {});
        const spde::NoiseStream stream(42);
        const std::uint64_t paths = 20000;
        std::vector<double> out_s(paths), out_p(paths);
        auto fn = [&](std::uint64_t pid) { return sampler.sample_path(stream, pid).squaredNorm(); };
        const double s = time_ms([&] { spde::kernels::per_path_map_serial(paths, fn, out_s); });
        const double p = time_ms([&] { spde::kernels::per_path_map_omp(paths, fn, out_p); });
        row("scheme_paths", s, p);
    }
    return 0;
}
