#include "spde/covariance.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace spde {

CovarianceModel::CovarianceModel(Matrix q, Kind kind, std::string label)
    : qmat_(std::move(q)), kind_(kind), label_(std::move(label)) {
    if (qmat_.rows() != qmat_.cols() || qmat_.rows() < 1)
        throw std::invalid_argument("CovarianceModel: matrix must be square and nonempty");
    const double scale = std::max(qmat_.cwiseAbs().maxCoeff(), 1e-300);
    if ((qmat_ - qmat_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("CovarianceModel: matrix is not symmetric");
    const auto [lo, hi] = sym_eig_range(qmat_);
    if (lo < -1e-10 * std::max(hi, 0.0))
        throw std::invalid_argument("CovarianceModel: not PSD, smallest eigenvalue " + std::to_string(lo));
}

CovarianceModel white_covariance(int mode_count) {
    if (mode_count < 1) throw std::invalid_argument("white_covariance: mode_count must be >= 1");
    return CovarianceModel(Matrix::Identity(mode_count, mode_count), CovarianceModel::Kind::white, "white");
}

CovarianceModel diagonal_power_covariance(const SpectralModel& model, double beta0) {
    if (beta0 < 0.0) throw std::invalid_argument("diagonal_power_covariance: beta0 must be nonnegative");
    const int k = model.mode_count();
    Matrix q = Matrix::Zero(k, k);
    for (int n = 0; n < k; ++n) q(n, n) = std::pow(model.eigenvalue(n), -beta0);
    return CovarianceModel(std::move(q), CovarianceModel::Kind::diagonal_power,
                           "diagonal_power(" + std::to_string(beta0) + ")");
}

CovarianceModel kernel_covariance(int mode_count, std::span<const double> cosine_coeffs) {
    if (mode_count < 1) throw std::invalid_argument("kernel_covariance: mode_count must be >= 1");
    if (cosine_coeffs.empty()) throw std::invalid_argument("kernel_covariance: no cosine coefficients");
    const int k = mode_count;
    Matrix q = Matrix::Zero(k, k);
    // cos(m pi (x-y)) splits into cos cos + sin sin products, so each cosine
    // mode of c contributes a rank-one cos-term plus a diagonal sin-term:
    //   (e_i, cos(m pi .) e_j part) = C_im C_jm,  C_im = int e_i(x) cos(m pi x) dx
    //   (sin part) = delta_im delta_jm / 2.
    // C_im = sqrt(2) * (2 i / pi) / (i^2 - m^2) when i + m is odd, else 0.
    Vector c(k);
    for (std::size_t m = 0; m < cosine_coeffs.size(); ++m) {
        const double cm = cosine_coeffs[m];
        if (cm == 0.0) continue;
        for (int i = 1; i <= k; ++i) {
            if ((i + static_cast<int>(m)) % 2 == 1) {
                const double den = static_cast<double>(i) * i - static_cast<double>(m) * m;
                c[i - 1] = std::numbers::sqrt2 * (2.0 * i / std::numbers::pi) / den;
            } else {
                c[i - 1] = 0.0;
            }
        }
        q.selfadjointView<Eigen::Lower>().rankUpdate(c, cm);
        if (m >= 1 && static_cast<int>(m) <= k) q(m - 1, m - 1) += 0.5 * cm;
    }
    q = q.selfadjointView<Eigen::Lower>();
    return CovarianceModel(std::move(q), CovarianceModel::Kind::kernel,
                           "kernel(" + std::to_string(cosine_coeffs.size()) + " cosine modes)");
}

CovarianceModel kernel_covariance_from_file(int mode_count, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("kernel_covariance_from_file: cannot open " + path);
    std::vector<double> coeffs;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double v;
        if (ls >> v) coeffs.push_back(v);
    }
    if (coeffs.empty()) throw std::runtime_error("kernel_covariance_from_file: no coefficients in " + path);
    return kernel_covariance(mode_count, coeffs);
}

namespace {

Matrix lambda_power(const SpectralModel& model, double p, int k) {
    Matrix m = Matrix::Zero(k, k);
    for (int n = 0; n < k; ++n) m(n, n) = std::pow(model.eigenvalue(n), p);
    return m;
}

}  // namespace

double regularity_estimate(const SpectralModel& model, const CovarianceModel& q, double beta,
                           bool verify_interpolation) {
    const int k = q.mode_count();
    if (k > model.mode_count())
        throw std::invalid_argument("regularity_estimate: covariance has more modes than the model");
    const double norm = operator_norm(lambda_power(model, beta, k) * q.matrix());
    if (verify_interpolation) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(q.matrix());
        Vector d = es.eigenvalues().cwiseMax(0.0);
        for (double l : {0.25, 0.5, 0.75}) {
            const Matrix qpow = es.eigenvectors() *
                                d.array().pow(l).matrix().asDiagonal() *
                                es.eigenvectors().transpose();
            const double lhs = operator_norm(lambda_power(model, l * beta, k) * qpow);
            const double rhs = std::pow(norm, l);
            if (lhs > rhs * (1.0 + 1e-8))
                throw std::runtime_error("regularity_estimate: interpolation bound violated at lambda=" +
                                         std::to_string(l));
        }
    }
    return norm;
}

RegularityGrowth regularity_growth_check(int mode_count, double beta0_of_q, double beta) {
    RegularityGrowth out;
    const SpectralModel m1 = build_dirichlet_laplacian_1d(mode_count);
    const SpectralModel m2 = build_dirichlet_laplacian_1d(2 * mode_count);
    out.estimate_k = regularity_estimate(m1, diagonal_power_covariance(m1, beta0_of_q), beta);
    out.estimate_2k = regularity_estimate(m2, diagonal_power_covariance(m2, beta0_of_q), beta);
    out.unbounded_flag = out.estimate_2k > 1.10 * out.estimate_k;
    return out;
}

RegularityIndices admissible_gamma(double alpha, double beta) {
    if (!(alpha > 0.5))
        throw std::invalid_argument(
            "admissible_gamma: trace condition fails, Tr(A^-alpha) diverges for alpha <= 1/2 "
            "on the 1-D Dirichlet Laplacian (alpha = " + std::to_string(alpha) + ")");
    if (beta < 0.0)
        throw std::invalid_argument(
            "admissible_gamma: negative beta is unsupported (all covariance families here have beta >= 0)");
    if (beta > alpha)
        throw std::invalid_argument(
            "admissible_gamma: boundedness of A^beta Q requires beta <= alpha (beta = " +
            std::to_string(beta) + ", alpha = " + std::to_string(alpha) + ")");
    const double sup = 1.0 - alpha + beta;
    if (!(sup > 0.0))
        throw std::invalid_argument(
            "admissible_gamma: order condition 1 - alpha + beta > 0 fails (value " +
            std::to_string(sup) + ")");
    return RegularityIndices{alpha, beta, std::min(sup, 1.0)};
}

}  // namespace spde
