#pragma once

#include "spde/law.hpp"
#include "spde/noise.hpp"

#include <functional>

namespace spde {

/// Precomputed per-mode data for iterating the scheme in the A_h-eigenbasis:
///   xi^{n+1}_i = F_i xi^n_i + sqrt(dt) G_i (B_h zeta^{n+1})_i,
/// with B_h B_h^T = Gamma Q Gamma^T, so each step draws dim(V_h) normals and
/// the one-step law is exact.
class SchemeSampler {
public:
    SchemeSampler(const DiscreteSpace& space, const CovarianceModel& q, const ThetaScheme& scheme,
                  std::span<const double> x0);

    int dim() const { return static_cast<int>(f_.size()); }
    const ThetaScheme& scheme() const { return scheme_; }
    const DiscreteSpace& space() const { return space_; }

    /// One path of X_h^N, in A_h-eigen coordinates.
    Vector sample_path(const NoiseStream& stream, std::uint64_t path_id) const;

private:
    const DiscreteSpace& space_;
    ThetaScheme scheme_;
    Vector x0_;
    Vector f_, g_;
    Matrix noise_factor_;  // B_h
};

struct McEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::uint64_t paths = 0;
};

/// Monte Carlo mean of fn(path_id) over `paths` independent paths, with the
/// standard error of the mean. Paths are evaluated in parallel into per-path
/// slots and reduced pairwise in index order, so the result is bitwise
/// reproducible for any thread count.
McEstimate mc_expect(const std::function<double(std::uint64_t)>& fn, std::uint64_t paths);

/// E phi(X_h^N) estimated over `paths` paths of the sampler.
McEstimate mc_expect_functional(const SchemeSampler& sampler, const Functional& phi,
                                std::uint64_t paths, const NoiseStream& stream);

/// Sample mean and covariance of X_h^N over `paths` paths (A_h-eigen coords).
struct McMoments {
    Vector mean;
    Matrix cov;
    std::uint64_t paths = 0;
};
McMoments mc_moments(const SchemeSampler& sampler, std::uint64_t paths, const NoiseStream& stream);

/// Common-noise estimate of E |X^{N_c}_coarse - X^{N_f}_fine|_H^2. Both
/// schemes consume the same stream of per-fine-step K-dimensional increments;
/// the coarse step aggregates `ratio` fine increments scaled by 1/sqrt(ratio).
/// Requires the coarse step to be an integer multiple of the fine step.
McEstimate coupled_refinement_error(const DiscreteSpace& space_fine, const DiscreteSpace& space_coarse,
                                    const CovarianceModel& q, const ThetaScheme& scheme_fine,
                                    const ThetaScheme& scheme_coarse, std::span<const double> x0,
                                    const NoiseStream& stream, std::uint64_t paths);

}  // namespace spde
