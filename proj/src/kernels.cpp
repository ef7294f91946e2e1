#include "spde/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spde::kernels {

namespace {

// sum_{k=0}^{N-1} r^k
double geometric_sum(double r, long n) {
    if (std::abs(r) >= 1.0 && r != 1.0) {
        double s = 0.0, p = 1.0;
        for (long k = 0; k < n; ++k) { s += p; p *= r; }
        return s;
    }
    if (std::abs(1.0 - r) < 1e-8) return static_cast<double>(n);
    if (r <= 0.5) return (1.0 - std::pow(r, static_cast<double>(n))) / (1.0 - r);
    // r in (0.5, 1): 1 - r^n through expm1/log1p to avoid cancellation.
    return -std::expm1(static_cast<double>(n) * std::log1p(r - 1.0)) / (1.0 - r);
}

}  // namespace

void geometric_covariance_serial(std::span<const double> f, std::span<const double> g,
                                 std::span<const double> qh, double dt, long nsteps,
                                 std::span<double> cov) {
    const std::size_t n = f.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cov[i * n + j] = dt * g[i] * g[j] * qh[i * n + j] * geometric_sum(f[i] * f[j], nsteps);
}

void geometric_covariance_omp(std::span<const double> f, std::span<const double> g,
                              std::span<const double> qh, double dt, long nsteps,
                              std::span<double> cov) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        for (std::ptrdiff_t j = 0; j < n; ++j)
            cov[i * n + j] = dt * g[i] * g[j] * qh[i * n + j] * geometric_sum(f[i] * f[j], nsteps);
}

void congruence_minus_diag_serial(std::span<const double> gamma, std::span<const double> d,
                                  std::span<const double> diag, std::size_t dim_i,
                                  std::size_t dim_k, std::span<double> out) {
    for (std::size_t k = 0; k < dim_k; ++k) {
        for (std::size_t l = 0; l < dim_k; ++l) {
            double s = 0.0;
            for (std::size_t i = 0; i < dim_i; ++i) s += gamma[i * dim_k + k] * d[i] * gamma[i * dim_k + l];
            out[k * dim_k + l] = (k == l) ? s - diag[k] : s;
        }
    }
}

void congruence_minus_diag_omp(std::span<const double> gamma, std::span<const double> d,
                               std::span<const double> diag, std::size_t dim_i,
                               std::size_t dim_k, std::span<double> out) {
    const std::ptrdiff_t nk = static_cast<std::ptrdiff_t>(dim_k);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < nk; ++k) {
        for (std::ptrdiff_t l = 0; l < nk; ++l) {
            double s = 0.0;
            for (std::size_t i = 0; i < dim_i; ++i) s += gamma[i * dim_k + k] * d[i] * gamma[i * dim_k + l];
            out[k * dim_k + l] = (k == l) ? s - diag[k] : s;
        }
    }
}

std::size_t argmax_on_grid_serial(std::span<const double> grid,
                                  const std::function<double(double)>& fn,
                                  std::vector<double>* values) {
    if (grid.empty()) throw std::invalid_argument("argmax_on_grid: empty grid");
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = fn(grid[i]);
    double best = -std::numeric_limits<double>::infinity();
    for (double v : vals) best = std::max(best, v);
    std::size_t idx = 0;
    while (vals[idx] != best) ++idx;
    if (values) *values = std::move(vals);
    return idx;
}

std::size_t argmax_on_grid_omp(std::span<const double> grid,
                               const std::function<double(double)>& fn,
                               std::vector<double>* values) {
    if (grid.empty()) throw std::invalid_argument("argmax_on_grid: empty grid");
    std::vector<double> vals(grid.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) vals[i] = fn(grid[i]);
    double best = -std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(max : best)
    for (std::ptrdiff_t i = 0; i < n; ++i) best = std::max(best, vals[i]);
    std::size_t idx = 0;
    while (vals[idx] != best) ++idx;
    if (values) *values = std::move(vals);
    return idx;
}

void per_path_map_serial(std::uint64_t n, const std::function<double(std::uint64_t)>& fn,
                         std::span<double> out) {
    for (std::uint64_t p = 0; p < n; ++p) out[p] = fn(p);
}

void per_path_map_omp(std::uint64_t n, const std::function<double(std::uint64_t)>& fn,
                      std::span<double> out) {
    const std::int64_t m = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t p = 0; p < m; ++p) out[p] = fn(static_cast<std::uint64_t>(p));
}

void per_path_rows_serial(std::uint64_t rows, const std::function<void(std::uint64_t, std::span<double>)>& fn,
                          std::size_t cols, std::span<double> out) {
    for (std::uint64_t p = 0; p < rows; ++p) fn(p, out.subspan(p * cols, cols));
}

void per_path_rows_omp(std::uint64_t rows, const std::function<void(std::uint64_t, std::span<double>)>& fn,
                       std::size_t cols, std::span<double> out) {
    const std::int64_t m = static_cast<std::int64_t>(rows);
#pragma omp parallel for schedule(static)
    for (std::int64_t p = 0; p < m; ++p)
        fn(static_cast<std::uint64_t>(p), out.subspan(static_cast<std::uint64_t>(p) * cols, cols));
}

}  // namespace spde::kernels
