#pragma once

#include "spde/covariance.hpp"
#include "spde/space.hpp"

#include <span>
#include <string>

namespace spde {

/// Mean vector and covariance matrix of a Gaussian solution law, tagged with
/// the basis the coordinates live in.
struct GaussianState {
    enum class Basis { continuous_spectral, discrete_eigen };
    Basis basis = Basis::continuous_spectral;
    Vector mean;
    Matrix cov;

    /// Symmetry to 1e-12 relative, eigenvalues >= -1e-10 relative.
    bool psd_invariant_holds() const;
};

/// Test functional phi on H. The cosine family phi(x) = cos((g, x) + a) is
/// bounded with bounded first and second derivatives; linear and quadratic
/// are diagnostics outside that class.
struct Functional {
    enum class Kind { cosine, linear, quadratic };
    Kind kind = Kind::cosine;
    Vector g;       ///< coefficients in the continuous A-basis
    double phase = 0.0;

    bool smooth_bounded() const { return kind == Kind::cosine; }
    /// Pointwise evaluation at A-basis coefficients y.
    double operator()(const Vector& y) const;
};

Functional cosine_functional(Vector g, double phase = 0.0);

/// Law of X_T = e^{-TA} x + int_0^T e^{-(T-s)A} Q^{1/2} dW_s on the truncated
/// eigenbasis: mean_k = e^{-lambda_k T} x_k and
/// cov_ij = Q_ij (1 - e^{-(lambda_i + lambda_j) T}) / (lambda_i + lambda_j).
GaussianState continuous_law(const SpectralModel& model, const CovarianceModel& q,
                             std::span<const double> x0, double total_time);

/// Law of the fully discrete solution X_h^N in the A_h-eigenbasis, with
/// F_i = F(lambda_{h,i} dt) and G_i = 1/(1 + theta dt lambda_{h,i}):
///   mean_i  = F_i^N (P_h x)_i
///   cov_ij  = dt G_i G_j (Gamma Q Gamma^T)_ij sum_{k<N} (F_i F_j)^k.
GaussianState discrete_law(const DiscreteSpace& space, const CovarianceModel& q,
                           const ThetaScheme& scheme, std::span<const double> x0);

/// Law of the semidiscrete solution X_{h,T} (space projected, time exact);
/// the N -> infinity limit of discrete_law. Used to isolate the space error.
GaussianState semidiscrete_law(const DiscreteSpace& space, const CovarianceModel& q,
                               std::span<const double> x0, double total_time);

/// E phi under a Gaussian state, in closed form. For a discrete-basis state
/// the functional's g is first mapped through Gamma ((g, X_h) = (Gamma g, xi)).
double expect_functional(const GaussianState& state, const Functional& phi,
                         const DiscreteSpace* space = nullptr);

/// | E phi(X_h^N) - E phi(X_T) |, both sides exact.
double weak_error(const SpectralModel& model, const DiscreteSpace& space, const CovarianceModel& q,
                  const ThetaScheme& scheme, std::span<const double> x0, const Functional& phi);

/// E | X_h^N - X_T |_H^2 for the two solutions driven by the same W:
/// |mean difference|^2 + Tr(cov_disc) + Tr(cov_cont) - 2 * cross, with the
/// cross term assembled from the per-step closed-form integrals
/// int_{t_k}^{t_{k+1}} e^{-lambda_j (T-s)} ds paired with the discrete kernel.
double strong_error_sq(const SpectralModel& model, const DiscreteSpace& space,
                       const CovarianceModel& q, const ThetaScheme& scheme,
                       std::span<const double> x0);

/// v(T - t, y) = E phi(y + int_t^T S(T-s) Q^{1/2} dW_s) for a cosine phi:
/// Gaussian smoothing of phi at y with the covariance of the tail integral.
double kolmogorov_value(const SpectralModel& model, const CovarianceModel& q, double total_time,
                        double t, const Vector& y, const Functional& phi);

}  // namespace spde
