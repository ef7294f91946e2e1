#pragma once

#include "spde/spectral.hpp"

#include <string>
#include <vector>

namespace spde {

/// Noise covariance Q represented as the K x K matrix Q_ij = (e_i, Q e_j) on
/// the truncated A-eigenbasis. Symmetric PSD up to roundoff; not required to
/// commute with A (kernel covariances are dense here). Immutable.
///
/// Any factor B with B B^T = Q induces the same Gaussian law for B dW, so the
/// choice of the symmetric PSD root in sqrt_factor() is a normalization, not
/// a modeling decision.
class CovarianceModel {
public:
    enum class Kind { white, diagonal_power, kernel, custom };

    CovarianceModel(Matrix q, Kind kind, std::string label);

    int mode_count() const { return static_cast<int>(qmat_.rows()); }
    const Matrix& matrix() const { return qmat_; }
    Kind kind() const { return kind_; }
    const std::string& label() const { return label_; }

    /// Symmetric PSD square root. Computed per call; callers that iterate
    /// keep their own copy (samplers precompute their factors).
    Matrix sqrt_factor() const { return psd_sqrt(qmat_); }

private:
    Matrix qmat_;
    Kind kind_;
    std::string label_;
};

/// Q = I (space-time white noise; the Dirac-kernel case).
CovarianceModel white_covariance(int mode_count);

/// Q = diag(lambda_n^{-beta0}); then A^{beta0} Q = I exactly.
CovarianceModel diagonal_power_covariance(const SpectralModel& model, double beta0);

/// Q from a convolution kernel: Q f(x) = int_0^1 c(x-y) f(y) dy with the even
/// correlation c(r) = sum_{m=0}^{Mc} c_m cos(m pi r). The double integrals
/// against e_i(x) e_j(y) are evaluated in closed form per cosine mode, so Q
/// is assembled without quadrature error. Throws if the result violates the
/// PSD invariant, naming the offending eigenvalue.
CovarianceModel kernel_covariance(int mode_count, std::span<const double> cosine_coeffs);

/// Reads one cosine coefficient per line ('#' comments and blank lines
/// allowed) and builds kernel_covariance.
CovarianceModel kernel_covariance_from_file(int mode_count, const std::string& path);

/// Truncated estimate of ||A^beta Q||: the operator norm of Lambda^beta Qmat.
/// When verify_interpolation is set, also checks
/// ||A^{l beta} Q^l|| <= ||A^beta Q||^l for l in {1/4, 1/2, 3/4} on the
/// truncated matrices and throws if it fails beyond roundoff slack.
double regularity_estimate(const SpectralModel& model, const CovarianceModel& q, double beta,
                           bool verify_interpolation = false);

/// Two-resolution growth probe for regularity_estimate: flags the estimate as
/// unbounded in K when the value at 2K exceeds the value at K by more than 10%.
struct RegularityGrowth {
    double estimate_k = 0.0;
    double estimate_2k = 0.0;
    bool unbounded_flag = false;
};
RegularityGrowth regularity_growth_check(int mode_count, double beta0_of_q, double beta);

/// Regularity indices (alpha, beta) with the admissible weak-order exponent
/// interval gamma in (0, gamma_sup), gamma_sup = min(1 - alpha + beta, 1).
/// The supremum is open: gamma must stay strictly below gamma_sup.
struct RegularityIndices {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma_sup = 0.0;
};

/// Validates the standing assumptions for the 1-D Dirichlet model and returns
/// the indices. Throws with a diagnostic naming the violated condition:
///  - trace condition: needs alpha > 1/2 (else Tr(A^{-alpha}) diverges),
///  - boundedness of A^beta Q: needs 0 <= beta <= alpha (beta < 0 unsupported),
///  - order condition: needs 1 - alpha + beta > 0.
RegularityIndices admissible_gamma(double alpha, double beta);

}  // namespace spde
