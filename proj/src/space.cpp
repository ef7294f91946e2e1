#include "spde/space.hpp"

#include "spde/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace spde {

DiscreteSpace build_spectral_space(int m, const SpectralModel& model) {
    if (m < 1) throw std::invalid_argument("build_spectral_space: m must be >= 1");
    if (m > model.mode_count())
        throw std::invalid_argument("build_spectral_space: m exceeds the model mode count");
    DiscreteSpace s;
    s.variant_ = DiscreteSpace::Variant::spectral;
    s.model_lambda_ = Eigen::Map<const Vector>(model.eigenvalues().data(), model.mode_count());
    s.lambda_h_ = s.model_lambda_.head(m);
    s.gamma_ = Matrix::Zero(m, model.mode_count());
    for (int i = 0; i < m; ++i) s.gamma_(i, i) = 1.0;
    // lambda_{m+1}^{-1/2}; for the Dirichlet model this is 1/((m+1) pi).
    const double next = (m < model.mode_count())
                            ? model.eigenvalue(m)
                            : std::pow((m + 1) * std::numbers::pi, 2);
    s.h_ = 1.0 / std::sqrt(next);
    return s;
}

DiscreteSpace build_p1_space(int elements, const SpectralModel& model) {
    if (elements < 2) throw std::invalid_argument("build_p1_space: need at least 2 elements");
    DiscreteSpace s;
    s.variant_ = DiscreteSpace::Variant::fem_p1;
    s.elements_ = elements;
    s.model_lambda_ = Eigen::Map<const Vector>(model.eigenvalues().data(), model.mode_count());
    const int dim = elements - 1;
    const double h = 1.0 / elements;
    s.h_ = h;

    s.mass_ = Matrix::Zero(dim, dim);
    s.stiffness_ = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        s.mass_(i, i) = 4.0 * h / 6.0;
        s.stiffness_(i, i) = 2.0 / h;
        if (i + 1 < dim) {
            s.mass_(i, i + 1) = s.mass_(i + 1, i) = h / 6.0;
            s.stiffness_(i, i + 1) = s.stiffness_(i + 1, i) = -1.0 / h;
        }
    }

    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(s.stiffness_, s.mass_);
    if (es.info() != Eigen::Success) throw std::runtime_error("build_p1_space: eigensolver failed");
    s.lambda_h_ = es.eigenvalues();       // ascending
    s.eigvecs_ = es.eigenvectors();       // V^T mass V = I

    // (phi_j, e_k) = sqrt(2) * 2 (1 - cos(k pi h)) sin(k pi x_j) / (h (k pi)^2)
    const int k_modes = model.mode_count();
    s.hat_sine_ = Matrix(dim, k_modes);
    for (int j = 1; j <= dim; ++j) {
        for (int k = 1; k <= k_modes; ++k) {
            const double kpi = k * std::numbers::pi;
            s.hat_sine_(j - 1, k - 1) = std::numbers::sqrt2 * 2.0 * (1.0 - std::cos(kpi * h)) *
                                        std::sin(kpi * j * h) / (h * kpi * kpi);
        }
    }
    s.gamma_ = s.eigvecs_.transpose() * s.hat_sine_;
    return s;
}

Vector DiscreteSpace::ph_project(std::span<const double> f) const {
    const Eigen::Map<const Vector> fv(f.data(), static_cast<Eigen::Index>(f.size()));
    if (fv.size() > gamma_.cols()) throw std::invalid_argument("ph_project: too many coefficients");
    return gamma_.leftCols(fv.size()) * fv;
}

Vector DiscreteSpace::th_solve(std::span<const double> f) const {
    const Eigen::Map<const Vector> fv(f.data(), static_cast<Eigen::Index>(f.size()));
    if (fv.size() > gamma_.cols()) throw std::invalid_argument("th_solve: too many coefficients");
    if (variant_ == Variant::spectral) {
        Vector xi = Vector::Zero(dim());
        const Eigen::Index n = std::min<Eigen::Index>(fv.size(), dim());
        for (Eigen::Index i = 0; i < n; ++i) xi[i] = fv[i] / lambda_h_[i];
        return xi;
    }
    // Nodal route: stiffness u = load with load_j = (phi_j, f).
    const Vector load = hat_sine_.leftCols(fv.size()) * fv;
    const Vector u = stiffness_.llt().solve(load);
    return eigvecs_.transpose() * (mass_ * u);
}

Vector DiscreteSpace::ritz_project(std::span<const double> v) const {
    const Eigen::Map<const Vector> vv(v.data(), static_cast<Eigen::Index>(v.size()));
    if (vv.size() > gamma_.cols()) throw std::invalid_argument("ritz_project: too many coefficients");
    if (variant_ == Variant::spectral) {
        Vector xi = Vector::Zero(dim());
        const Eigen::Index n = std::min<Eigen::Index>(vv.size(), dim());
        for (Eigen::Index i = 0; i < n; ++i) xi[i] = vv[i];
        return xi;
    }
    // ((u_h - v, phi_j)) = 0: stiffness u = energy load, load_j = (A v, phi_j).
    const Vector load = hat_sine_.leftCols(vv.size()) *
                        (model_lambda_.head(vv.size()).cwiseProduct(vv));
    const Vector u = stiffness_.llt().solve(load);
    return eigvecs_.transpose() * (mass_ * u);
}

Vector DiscreteSpace::embed(std::span<const double> xi) const {
    const Eigen::Map<const Vector> x(xi.data(), static_cast<Eigen::Index>(xi.size()));
    if (x.size() != dim()) throw std::invalid_argument("embed: wrong discrete dimension");
    return gamma_.transpose() * x;
}

double semigroup_error(const DiscreteSpace& space, const SpectralModel& model, double t,
                       int norm_index) {
    if (!(t > 0.0)) throw std::invalid_argument("semigroup_error: t must be positive");
    if (norm_index != 0 && norm_index != 1)
        throw std::invalid_argument("semigroup_error: norm_index must be 0 or 1");
    const int k = model.mode_count();
    const int dim = space.dim();

    std::vector<double> decay(dim);
    for (int i = 0; i < dim; ++i) decay[i] = std::exp(-space.discrete_eigenvalue(i) * t);
    std::vector<double> diag(k);
    for (int n = 0; n < k; ++n) diag[n] = std::exp(-model.eigenvalue(n) * t);

    // Row-major copy of Gamma for the kernel.
    std::vector<double> gamma_rm(static_cast<std::size_t>(dim) * k);
    for (int i = 0; i < dim; ++i)
        for (int n = 0; n < k; ++n) gamma_rm[static_cast<std::size_t>(i) * k + n] = space.coupling()(i, n);

    std::vector<double> err(static_cast<std::size_t>(k) * k);
    kernels::congruence_minus_diag_omp(gamma_rm, decay, diag, static_cast<std::size_t>(dim),
                                       static_cast<std::size_t>(k), err);
    // The error matrix is symmetric, so the row-major buffer can be mapped
    // directly into a column-major view.
    const Eigen::Map<const Matrix> e(err.data(), k, k);
    if (norm_index == 0) return operator_norm(e);
    Vector lam_sqrt(k);
    for (int n = 0; n < k; ++n) lam_sqrt[n] = std::sqrt(model.eigenvalue(n));
    return operator_norm(lam_sqrt.asDiagonal() * e);
}

}  // namespace spde
