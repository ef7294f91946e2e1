#pragma once

#include "spde/linalg.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

// Data-parallel inner loops, each in two variants: an OpenMP kernel (the one
// the library calls) and a serial reference kept for testing. Every kernel
// writes each output slot from exactly one iteration, so the parallel result
// is bitwise identical to the serial one for any thread count.

namespace spde::kernels {

/// cov[i*n+j] = dt * g[i]*g[j] * qh[i*n+j] * geom(f[i]*f[j], nsteps)
/// where geom(r, N) = sum_{k<N} r^k, with the removable singularity at r = 1
/// switched to the limit N when |1 - r| < 1e-8, and a direct loop when
/// |r| >= 1 (reachable only through the unstable-theta override).
void geometric_covariance_omp(std::span<const double> f, std::span<const double> g,
                              std::span<const double> qh, double dt, long nsteps,
                              std::span<double> cov);
void geometric_covariance_serial(std::span<const double> f, std::span<const double> g,
                                 std::span<const double> qh, double dt, long nsteps,
                                 std::span<double> cov);

/// out[k*kc + l] = sum_i gamma[i*kc+k] * d[i] * gamma[i*kc+l]  -  diag[k] (k==l)
/// i.e. the A-basis matrix of Gamma^T diag(d) Gamma minus a diagonal.
void congruence_minus_diag_omp(std::span<const double> gamma, std::span<const double> d,
                               std::span<const double> diag, std::size_t dim_i,
                               std::size_t dim_k, std::span<double> out);
void congruence_minus_diag_serial(std::span<const double> gamma, std::span<const double> d,
                                  std::span<const double> diag, std::size_t dim_i,
                                  std::size_t dim_k, std::span<double> out);

/// Index of the maximizer of fn over grid[0..n), ties resolved to the lowest
/// index. Parallel variant reduces the max value first and locates it second,
/// which keeps the result independent of the schedule.
std::size_t argmax_on_grid_omp(std::span<const double> grid,
                               const std::function<double(double)>& fn,
                               std::vector<double>* values = nullptr);
std::size_t argmax_on_grid_serial(std::span<const double> grid,
                                  const std::function<double(double)>& fn,
                                  std::vector<double>* values = nullptr);

/// Evaluates fn(path_id) for path_id in [0, n) into out[path_id].
void per_path_map_omp(std::uint64_t n, const std::function<double(std::uint64_t)>& fn,
                      std::span<double> out);
void per_path_map_serial(std::uint64_t n, const std::function<double(std::uint64_t)>& fn,
                         std::span<double> out);

/// Row-wise map: fills out.row(p) = fn(p) for p in [0, rows).
void per_path_rows_omp(std::uint64_t rows, const std::function<void(std::uint64_t, std::span<double>)>& fn,
                       std::size_t cols, std::span<double> out);
void per_path_rows_serial(std::uint64_t rows, const std::function<void(std::uint64_t, std::span<double>)>& fn,
                          std::size_t cols, std::span<double> out);

}  // namespace spde::kernels
