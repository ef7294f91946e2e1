#include "spde/spectral.hpp"

#include "spde/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spde {

SpectralModel::SpectralModel(std::vector<double> eigenvalues, std::string domain_tag)
    : eigenvalues_(std::move(eigenvalues)), domain_tag_(std::move(domain_tag)) {
    if (eigenvalues_.empty()) throw std::invalid_argument("SpectralModel: needs at least one mode");
    if (eigenvalues_.front() <= 0.0) throw std::invalid_argument("SpectralModel: eigenvalues must be positive");
    for (std::size_t n = 1; n < eigenvalues_.size(); ++n)
        if (eigenvalues_[n] < eigenvalues_[n - 1])
            throw std::invalid_argument("SpectralModel: eigenvalues must be nondecreasing");
}

SpectralModel build_dirichlet_laplacian_1d(int mode_count) {
    if (mode_count < 1) throw std::invalid_argument("build_dirichlet_laplacian_1d: mode_count must be >= 1");
    std::vector<double> lam(mode_count);
    for (int n = 1; n <= mode_count; ++n) {
        const double npi = static_cast<double>(n) * std::numbers::pi;
        lam[n - 1] = npi * npi;
    }
    return SpectralModel(std::move(lam), "dirichlet-laplacian-1d on (0,1)");
}

ThetaScheme::ThetaScheme(double theta, double total_time, long steps, bool allow_unstable)
    : theta_(theta), total_time_(total_time), steps_(steps) {
    if (steps < 1) throw std::invalid_argument("ThetaScheme: steps must be >= 1");
    if (!(total_time > 0.0)) throw std::invalid_argument("ThetaScheme: total_time must be positive");
    if (theta < 0.0 || theta > 1.0) throw std::invalid_argument("ThetaScheme: theta must lie in [0, 1]");
    if (theta <= 0.5 && !allow_unstable)
        throw std::invalid_argument("ThetaScheme: theta <= 1/2 is unstable; pass allow_unstable to override");
    dt_ = total_time / static_cast<double>(steps);
}

double frac_power_norm(const SpectralModel& model, std::span<const double> u, double s) {
    if (u.size() > static_cast<std::size_t>(model.mode_count()))
        throw std::invalid_argument("frac_power_norm: more coefficients than modes");
    double sum = 0.0;
    for (std::size_t n = 0; n < u.size(); ++n)
        sum += std::pow(model.eigenvalue(static_cast<int>(n)), s) * u[n] * u[n];
    return std::sqrt(sum);
}

std::vector<double> semigroup_apply(const SpectralModel& model, double t, std::span<const double> u) {
    if (t < 0.0) throw std::invalid_argument("semigroup_apply: t must be nonnegative");
    if (u.size() > static_cast<std::size_t>(model.mode_count()))
        throw std::invalid_argument("semigroup_apply: more coefficients than modes");
    std::vector<double> out(u.size());
    for (std::size_t n = 0; n < u.size(); ++n)
        out[n] = std::exp(-model.eigenvalue(static_cast<int>(n)) * t) * u[n];
    return out;
}

double theta_amplification(double theta, double z) {
    if (z < 0.0) throw std::invalid_argument("theta_amplification: z must be nonnegative");
    if (theta < 0.0 || theta > 1.0) throw std::invalid_argument("theta_amplification: theta must lie in [0, 1]");
    return (1.0 - (1.0 - theta) * z) / (1.0 + theta * z);
}

double smoothing_constant(double s) {
    if (s < 0.0) throw std::invalid_argument("smoothing_constant: s must be nonnegative");
    if (s == 0.0) return 1.0;
    return std::pow(s / std::numbers::e, s);
}

double leroux_gap(double theta, long steps) {
    if (!(theta > 0.5) || theta > 1.0)
        throw std::invalid_argument("leroux_gap: requires 1/2 < theta <= 1");
    if (steps < 1) throw std::invalid_argument("leroux_gap: steps must be >= 1");

    const double nd = static_cast<double>(steps);
    auto gap = [theta, nd](double z) {
        return std::abs(std::exp(-nd * z) - std::pow(theta_amplification(theta, z), nd));
    };

    constexpr int grid_points = 1 << 14;
    static thread_local std::vector<double> grid;
    if (grid.size() != grid_points) {
        grid.resize(grid_points);
        const double lo = -6.0, hi = 6.0;
        for (int i = 0; i < grid_points; ++i)
            grid[i] = std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / (grid_points - 1));
    }

    std::vector<double> vals;
    const std::size_t imax = kernels::argmax_on_grid_omp(grid, gap, &vals);

    // Golden-section refinement inside the bracket around the grid maximizer.
    double a = grid[imax == 0 ? 0 : imax - 1];
    double b = grid[imax + 1 < grid.size() ? imax + 1 : imax];
    double best = vals[imax];
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = gap(c), fd = gap(d);
    for (int iter = 0; iter < 200 && (b - a) > 1e-14 * b; ++iter) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - invphi * (b - a); fc = gap(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + invphi * (b - a); fd = gap(d);
        }
        best = std::max(best, std::max(fc, fd));
    }
    return best;
}

FracTrace trace_frac(const SpectralModel& model, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("trace_frac: alpha must be positive");
    FracTrace out;
    if (alpha <= 0.5) {
        out.divergent = true;  // sum (n pi)^{-2 alpha} diverges
        return out;
    }
    const int k = model.mode_count();
    double sum = 0.0;
    for (int n = 0; n < k; ++n) sum += std::pow(model.eigenvalue(n), -alpha);
    out.finite_part = sum;
    out.tail_bound = std::pow(std::numbers::pi, -2.0 * alpha) / (2.0 * alpha - 1.0) *
                     std::pow(static_cast<double>(k), 1.0 - 2.0 * alpha);
    return out;
}

}  // namespace spde
