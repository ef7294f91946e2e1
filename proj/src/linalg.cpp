#include "spde/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace spde {

namespace {

double pairwise_sum_rec(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum_rec(v, half) + pairwise_sum_rec(v + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
    return pairwise_sum_rec(values.data(), values.size());
}

double operator_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    const Matrix gram = m.transpose() * m;
    const Eigen::Index n = gram.rows();
    Vector v = Vector::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] += 1e-3 * static_cast<double>(i % 7);
    v.normalize();
    double prev = 0.0;
    for (int iter = 0; iter < 10000; ++iter) {
        Vector w = gram * v;
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
        const double est = std::sqrt(norm);
        if (iter > 0 && std::abs(est - prev) <= 1e-10 * std::max(est, 1e-300)) return est;
        prev = est;
    }
    return prev;
}

Matrix psd_sqrt(const Matrix& q) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(q);
    if (es.info() != Eigen::Success) throw std::runtime_error("psd_sqrt: eigensolver failed");
    Vector d = es.eigenvalues();
    const double scale = std::max(d.cwiseAbs().maxCoeff(), 0.0);
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (d[i] < 0.0) {
            if (d[i] < -1e-10 * scale)
                throw std::invalid_argument("psd_sqrt: matrix is not positive semidefinite (eigenvalue " +
                                            std::to_string(d[i]) + ")");
            d[i] = 0.0;
        }
    }
    return es.eigenvectors() * d.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

std::pair<double, double> sym_eig_range(const Matrix& q) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(q, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("sym_eig_range: eigensolver failed");
    const Vector& d = es.eigenvalues();
    return {d.minCoeff(), d.maxCoeff()};
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need at least two points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = (syy == 0.0) ? 1.0 : 1.0 - (syy - sxy * sxy / sxx) / syy;
    return fit;
}

}  // namespace spde
