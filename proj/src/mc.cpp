#include "spde/mc.hpp"

#include "spde/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace spde {

SchemeSampler::SchemeSampler(const DiscreteSpace& space, const CovarianceModel& q,
                             const ThetaScheme& scheme, std::span<const double> x0)
    : space_(space), scheme_(scheme) {
    if (q.mode_count() != space.model_modes())
        throw std::invalid_argument("SchemeSampler: covariance and space built on different models");
    const int dim = space.dim();
    x0_ = space.ph_project(x0);
    f_ = Vector(dim);
    g_ = Vector(dim);
    for (int i = 0; i < dim; ++i) {
        const double z = space.discrete_eigenvalue(i) * scheme.dt();
        f_[i] = theta_amplification(scheme.theta(), z);
        g_[i] = 1.0 / (1.0 + scheme.theta() * z);
    }
    noise_factor_ = psd_sqrt(space.coupling() * q.matrix() * space.coupling().transpose());
}

Vector SchemeSampler::sample_path(const NoiseStream& stream, std::uint64_t path_id) const {
    const int dim = this->dim();
    Vector xi = x0_;
    Vector zeta(dim), noise(dim);
    const double sqrt_dt = std::sqrt(scheme_.dt());
    for (long n = 0; n < scheme_.steps(); ++n) {
        stream.fill_step(path_id, static_cast<std::uint32_t>(n), {zeta.data(), static_cast<std::size_t>(dim)});
        noise.noalias() = noise_factor_ * zeta;
        for (int i = 0; i < dim; ++i) xi[i] = f_[i] * xi[i] + sqrt_dt * g_[i] * noise[i];
    }
    return xi;
}

McEstimate mc_expect(const std::function<double(std::uint64_t)>& fn, std::uint64_t paths) {
    if (paths < 2) throw std::invalid_argument("mc_expect: need at least two paths");
    std::vector<double> values(paths);
    kernels::per_path_map_omp(paths, fn, values);
    const double n = static_cast<double>(paths);
    const double mean = pairwise_sum(values) / n;
    std::vector<double> sq(paths);
    for (std::uint64_t p = 0; p < paths; ++p) sq[p] = (values[p] - mean) * (values[p] - mean);
    const double var = pairwise_sum(sq) / (n - 1.0);
    return {mean, std::sqrt(var / n), paths};
}

McEstimate mc_expect_functional(const SchemeSampler& sampler, const Functional& phi,
                                std::uint64_t paths, const NoiseStream& stream) {
    const DiscreteSpace& space = sampler.space();
    const Vector g = space.ph_project({phi.g.data(), static_cast<std::size_t>(phi.g.size())});
    return mc_expect(
        [&](std::uint64_t p) {
            const Vector xi = sampler.sample_path(stream, p);
            const double gx = g.dot(xi);
            switch (phi.kind) {
                case Functional::Kind::cosine: return std::cos(gx + phi.phase);
                case Functional::Kind::linear: return gx;
                case Functional::Kind::quadratic: return gx * gx;
            }
            return 0.0;
        },
        paths);
}

McMoments mc_moments(const SchemeSampler& sampler, std::uint64_t paths, const NoiseStream& stream) {
    if (paths < 2) throw std::invalid_argument("mc_moments: need at least two paths");
    const int dim = sampler.dim();
    std::vector<double> flat(paths * static_cast<std::uint64_t>(dim));
    kernels::per_path_rows_omp(
        paths,
        [&](std::uint64_t p, std::span<double> row) {
            const Vector xi = sampler.sample_path(stream, p);
            for (int i = 0; i < dim; ++i) row[i] = xi[i];
        },
        static_cast<std::size_t>(dim), flat);

    const double n = static_cast<double>(paths);
    McMoments out;
    out.paths = paths;
    out.mean = Vector(dim);
    std::vector<double> column(paths);
    for (int i = 0; i < dim; ++i) {
        for (std::uint64_t p = 0; p < paths; ++p) column[p] = flat[p * dim + i];
        out.mean[i] = pairwise_sum(column) / n;
    }
    out.cov = Matrix(dim, dim);
    std::vector<double> prod(paths);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j <= i; ++j) {
            for (std::uint64_t p = 0; p < paths; ++p)
                prod[p] = (flat[p * dim + i] - out.mean[i]) * (flat[p * dim + j] - out.mean[j]);
            const double c = pairwise_sum(prod) / (n - 1.0);
            out.cov(i, j) = c;
            out.cov(j, i) = c;
        }
    }
    return out;
}

McEstimate coupled_refinement_error(const DiscreteSpace& space_fine, const DiscreteSpace& space_coarse,
                                    const CovarianceModel& q, const ThetaScheme& scheme_fine,
                                    const ThetaScheme& scheme_coarse, std::span<const double> x0,
                                    const NoiseStream& stream, std::uint64_t paths) {
    if (scheme_fine.steps() % scheme_coarse.steps() != 0)
        throw std::invalid_argument("coupled_refinement_error: coarse step must be a multiple of the fine step");
    if (std::abs(scheme_fine.total_time() - scheme_coarse.total_time()) >
        1e-14 * scheme_fine.total_time())
        throw std::invalid_argument("coupled_refinement_error: schemes must share the horizon");
    if (q.mode_count() != space_fine.model_modes() || q.mode_count() != space_coarse.model_modes())
        throw std::invalid_argument("coupled_refinement_error: covariance/space model mismatch");
    const std::uint32_t ratio =
        static_cast<std::uint32_t>(scheme_fine.steps() / scheme_coarse.steps());
    const int k = q.mode_count();
    const int dim_f = space_fine.dim();
    const int dim_c = space_coarse.dim();

    // Both resolutions are driven by the same K-dimensional increments: per
    // fine step zeta ~ N(0, I_K) enters through Gamma Q^{1/2}, whose one-step
    // covariance is again Gamma Q Gamma^T. The coarse iteration consumes the
    // aggregated fine increments, which is the common-noise coupling.
    const Matrix root = q.sqrt_factor();
    const Matrix drive_f = space_fine.coupling() * root;    // dim_f x K
    const Matrix drive_c = space_coarse.coupling() * root;  // dim_c x K

    Vector ff(dim_f), gf(dim_f), fc(dim_c), gc(dim_c);
    for (int i = 0; i < dim_f; ++i) {
        const double z = space_fine.discrete_eigenvalue(i) * scheme_fine.dt();
        ff[i] = theta_amplification(scheme_fine.theta(), z);
        gf[i] = 1.0 / (1.0 + scheme_fine.theta() * z);
    }
    for (int i = 0; i < dim_c; ++i) {
        const double z = space_coarse.discrete_eigenvalue(i) * scheme_coarse.dt();
        fc[i] = theta_amplification(scheme_coarse.theta(), z);
        gc[i] = 1.0 / (1.0 + scheme_coarse.theta() * z);
    }
    const Vector x0_f = space_fine.ph_project(x0);
    const Vector x0_c = space_coarse.ph_project(x0);
    const double sdt_f = std::sqrt(scheme_fine.dt());
    const double sdt_c = std::sqrt(scheme_coarse.dt());
    const double inv_sqrt_ratio = 1.0 / std::sqrt(static_cast<double>(ratio));

    return mc_expect(
        [&](std::uint64_t p) {
            Vector xi_f = x0_f, xi_c = x0_c;
            Vector zeta(k), zeta_agg(k), noise_f(dim_f), noise_c(dim_c);
            for (long nc = 0; nc < scheme_coarse.steps(); ++nc) {
                zeta_agg.setZero();
                for (std::uint32_t j = 0; j < ratio; ++j) {
                    const auto step = static_cast<std::uint32_t>(nc * ratio + j);
                    stream.fill_step(p, step, {zeta.data(), static_cast<std::size_t>(k)});
                    zeta_agg += zeta;
                    noise_f.noalias() = drive_f * zeta;
                    for (int i = 0; i < dim_f; ++i) xi_f[i] = ff[i] * xi_f[i] + sdt_f * gf[i] * noise_f[i];
                }
                zeta_agg *= inv_sqrt_ratio;
                noise_c.noalias() = drive_c * zeta_agg;
                for (int i = 0; i < dim_c; ++i) xi_c[i] = fc[i] * xi_c[i] + sdt_c * gc[i] * noise_c[i];
            }
            const Vector diff = space_fine.embed({xi_f.data(), static_cast<std::size_t>(dim_f)}) -
                                space_coarse.embed({xi_c.data(), static_cast<std::size_t>(dim_c)});
            return diff.squaredNorm();
        },
        paths);
}

}  // namespace spde
