#pragma once

#include "spde/spectral.hpp"

#include <span>

namespace spde {

/// Galerkin space V_h with the eigenstructure of the discrete operator A_h
/// and the coupling Gamma to the continuous eigenbasis:
///   Gamma(i, k) = (e_{i,h}, e_k)_H,  i < dim, k < model K.
///
/// Discrete vectors are coordinates in the A_h-eigenbasis {e_{i,h}}, which is
/// H-orthonormal, so Euclidean norms of coordinate vectors are H-norms.
/// Immutable after construction (the eigensolve happens at build time).
class DiscreteSpace {
public:
    enum class Variant { spectral, fem_p1 };

    Variant variant() const { return variant_; }
    int dim() const { return static_cast<int>(lambda_h_.size()); }
    int model_modes() const { return static_cast<int>(gamma_.cols()); }
    double mesh_width() const { return h_; }          ///< h for P1; lambda_{m+1}^{-1/2} for spectral
    double discrete_eigenvalue(int i) const { return lambda_h_[i]; }
    const Vector& discrete_eigenvalues() const { return lambda_h_; }
    const Matrix& coupling() const { return gamma_; } ///< dim x K

    // P1-only views (empty for the spectral variant).
    const Matrix& mass() const { return mass_; }
    const Matrix& stiffness() const { return stiffness_; }
    const Matrix& eigenvectors() const { return eigvecs_; }   ///< nodal, mass-orthonormal columns
    const Matrix& hat_sine() const { return hat_sine_; }      ///< (phi_j, e_k), dim x K
    int elements() const { return elements_; }

    /// P_h f for f given by A-basis coefficients; returns A_h-eigen coordinates.
    Vector ph_project(std::span<const double> f) const;
    /// T_h P_h f (discrete elliptic solve); A_h-eigen coordinates.
    Vector th_solve(std::span<const double> f) const;
    /// Ritz projection Pi_h v (V-orthogonal); A_h-eigen coordinates.
    Vector ritz_project(std::span<const double> v) const;
    /// Embeds a discrete vector back into H: A-basis coefficients Gamma^T xi.
    Vector embed(std::span<const double> xi) const;

    friend DiscreteSpace build_spectral_space(int m, const SpectralModel& model);
    friend DiscreteSpace build_p1_space(int elements, const SpectralModel& model);

private:
    DiscreteSpace() = default;

    Variant variant_ = Variant::spectral;
    int elements_ = 0;
    double h_ = 0.0;
    Vector lambda_h_;
    Vector model_lambda_;
    Matrix gamma_;
    Matrix mass_, stiffness_, eigvecs_, hat_sine_;
};

/// V_h = span{e_1, ..., e_m}: diagonal everything, Gamma = [I | 0], and the
/// effective mesh width lambda_{m+1}^{-1/2} used by rate studies.
DiscreteSpace build_spectral_space(int m, const SpectralModel& model);

/// P1 elements on the uniform mesh of (0,1) with M elements (M-1 interior
/// nodes): mass (h/6)[1 4 1], stiffness (1/h)[-1 2 -1], eigenpairs from the
/// generalized symmetric problem, and Gamma assembled from the exact
/// antiderivative of hat x sin(k pi x) products.
DiscreteSpace build_p1_space(int elements, const SpectralModel& model);

/// Operator norm of S_h(t) P_h - S(t) on the K x K truncation in the A-basis.
/// norm_index 0 measures H -> H, 1 measures H -> D(A^{1/2}). Rejects t <= 0.
double semigroup_error(const DiscreteSpace& space, const SpectralModel& model, double t,
                       int norm_index);

}  // namespace spde
