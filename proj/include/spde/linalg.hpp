#pragma once

#include <Eigen/Dense>
#include <span>

namespace spde {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Deterministic sum of a range: fixed-order pairwise (cascade) summation.
/// The result depends only on the values and their order, never on thread
/// count, and the error grows like O(log n) instead of O(n).
double pairwise_sum(std::span<const double> values);

/// Operator 2-norm of a (not necessarily symmetric) matrix, computed by
/// power iteration on M^T M. Relative tolerance 1e-10, iteration cap 10^4.
double operator_norm(const Matrix& m);

/// Symmetric PSD square root B of a symmetric PSD matrix Q (B B = Q).
/// Eigenvalues within -1e-10 * lambda_max of zero are clamped to zero;
/// anything more negative throws std::invalid_argument.
Matrix psd_sqrt(const Matrix& q);

/// Smallest and largest eigenvalue of a symmetric matrix.
std::pair<double, double> sym_eig_range(const Matrix& q);

/// Ordinary least squares line y = slope*x + intercept with R^2.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace spde
