#include "spde/law.hpp"

#include "spde/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace spde {

namespace {

Vector padded(std::span<const double> x, Eigen::Index n, const char* who) {
    if (x.size() > static_cast<std::size_t>(n)) throw std::invalid_argument(std::string(who) + ": too many coefficients");
    Vector v = Vector::Zero(n);
    for (std::size_t i = 0; i < x.size(); ++i) v[static_cast<Eigen::Index>(i)] = x[i];
    return v;
}

// (1 - e^{-a}) / a with the removable singularity at a = 0.
double one_minus_exp_over(double a) {
    if (std::abs(a) < 1e-12) return 1.0 - 0.5 * a;
    return -std::expm1(-a) / a;
}

}  // namespace

bool GaussianState::psd_invariant_holds() const {
    if (cov.size() == 0) return true;
    const double scale = std::max(cov.cwiseAbs().maxCoeff(), 1e-300);
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) return false;
    const auto [lo, hi] = sym_eig_range(cov);
    return lo >= -1e-10 * std::max(hi, 0.0);
}

double Functional::operator()(const Vector& y) const {
    const Eigen::Index n = std::min(g.size(), y.size());
    const double gy = g.head(n).dot(y.head(n));
    switch (kind) {
        case Kind::cosine: return std::cos(gy + phase);
        case Kind::linear: return gy;
        case Kind::quadratic: return gy * gy;
    }
    return 0.0;
}

Functional cosine_functional(Vector g, double phase) {
    Functional f;
    f.kind = Functional::Kind::cosine;
    f.g = std::move(g);
    f.phase = phase;
    return f;
}

GaussianState continuous_law(const SpectralModel& model, const CovarianceModel& q,
                             std::span<const double> x0, double total_time) {
    if (!(total_time > 0.0)) throw std::invalid_argument("continuous_law: total_time must be positive");
    const int k = q.mode_count();
    if (k > model.mode_count()) throw std::invalid_argument("continuous_law: covariance larger than model");
    GaussianState st;
    st.basis = GaussianState::Basis::continuous_spectral;
    const Vector x = padded(x0, k, "continuous_law");
    st.mean = Vector(k);
    for (int n = 0; n < k; ++n) st.mean[n] = std::exp(-model.eigenvalue(n) * total_time) * x[n];
    st.cov = Matrix(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double s = model.eigenvalue(i) + model.eigenvalue(j);
            const double v = q.matrix()(i, j) * total_time * one_minus_exp_over(s * total_time);
            st.cov(i, j) = v;
            st.cov(j, i) = v;
        }
    }
    return st;
}

GaussianState discrete_law(const DiscreteSpace& space, const CovarianceModel& q,
                           const ThetaScheme& scheme, std::span<const double> x0) {
    if (q.mode_count() != space.model_modes())
        throw std::invalid_argument("discrete_law: covariance and space built on different models");
    const int dim = space.dim();
    const double dt = scheme.dt();
    const double theta = scheme.theta();

    std::vector<double> f(dim), g(dim);
    for (int i = 0; i < dim; ++i) {
        const double z = space.discrete_eigenvalue(i) * dt;
        f[i] = theta_amplification(theta, z);
        g[i] = 1.0 / (1.0 + theta * z);
    }

    GaussianState st;
    st.basis = GaussianState::Basis::discrete_eigen;
    const Vector phx = space.ph_project(x0);
    st.mean = Vector(dim);
    for (int i = 0; i < dim; ++i) st.mean[i] = std::pow(f[i], static_cast<double>(scheme.steps())) * phx[i];

    const Matrix qh = space.coupling() * q.matrix() * space.coupling().transpose();
    // Row-major flat view of the symmetric q_h; symmetry makes the layout moot.
    st.cov = Matrix(dim, dim);
    kernels::geometric_covariance_omp(f, g, std::span<const double>(qh.data(), qh.size()), dt,
                                      scheme.steps(), std::span<double>(st.cov.data(), st.cov.size()));
    return st;
}

GaussianState semidiscrete_law(const DiscreteSpace& space, const CovarianceModel& q,
                               std::span<const double> x0, double total_time) {
    if (!(total_time > 0.0)) throw std::invalid_argument("semidiscrete_law: total_time must be positive");
    if (q.mode_count() != space.model_modes())
        throw std::invalid_argument("semidiscrete_law: covariance and space built on different models");
    const int dim = space.dim();
    GaussianState st;
    st.basis = GaussianState::Basis::discrete_eigen;
    const Vector phx = space.ph_project(x0);
    st.mean = Vector(dim);
    for (int i = 0; i < dim; ++i)
        st.mean[i] = std::exp(-space.discrete_eigenvalue(i) * total_time) * phx[i];
    const Matrix qh = space.coupling() * q.matrix() * space.coupling().transpose();
    st.cov = Matrix(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double s = space.discrete_eigenvalue(i) + space.discrete_eigenvalue(j);
            const double v = qh(i, j) * total_time * one_minus_exp_over(s * total_time);
            st.cov(i, j) = v;
            st.cov(j, i) = v;
        }
    }
    return st;
}

double expect_functional(const GaussianState& state, const Functional& phi,
                         const DiscreteSpace* space) {
    Vector g;
    if (state.basis == GaussianState::Basis::discrete_eigen) {
        if (space == nullptr)
            throw std::invalid_argument("expect_functional: discrete state needs its space for the coupling");
        g = space->ph_project(std::span<const double>(phi.g.data(), phi.g.size()));
    } else {
        g = padded(std::span<const double>(phi.g.data(), phi.g.size()), state.mean.size(),
                   "expect_functional");
    }
    const double gm = g.dot(state.mean);
    const double gcg = g.dot(state.cov * g);
    switch (phi.kind) {
        case Functional::Kind::cosine: return std::cos(gm + phi.phase) * std::exp(-0.5 * gcg);
        case Functional::Kind::linear: return gm;
        case Functional::Kind::quadratic: return gm * gm + gcg;
    }
    return 0.0;
}

double weak_error(const SpectralModel& model, const DiscreteSpace& space, const CovarianceModel& q,
                  const ThetaScheme& scheme, std::span<const double> x0, const Functional& phi) {
    const GaussianState cont = continuous_law(model, q, x0, scheme.total_time());
    const GaussianState disc = discrete_law(space, q, scheme, x0);
    return std::abs(expect_functional(disc, phi, &space) - expect_functional(cont, phi));
}

double strong_error_sq(const SpectralModel& model, const DiscreteSpace& space,
                       const CovarianceModel& q, const ThetaScheme& scheme,
                       std::span<const double> x0) {
    const double total_time = scheme.total_time();
    const double dt = scheme.dt();
    const double theta = scheme.theta();
    const long nsteps = scheme.steps();
    const int dim = space.dim();
    const int k = q.mode_count();

    const GaussianState cont = continuous_law(model, q, x0, total_time);
    const GaussianState disc = discrete_law(space, q, scheme, x0);

    // Deterministic part: |Gamma^T mean_disc - mean_cont|^2 in H.
    const Vector mean_diff = space.embed(std::span<const double>(disc.mean.data(), disc.mean.size())) - cont.mean;

    // Cross term E (X_h^N - m_h, X_T - m_T):
    //   sum_{i,l} Gamma_il (Gamma Q)_il G_i J_il,
    //   J_il = (1 - e^{-lambda_l dt}) / lambda_l * sum_{j<N} (F_i e^{-lambda_l dt})^j.
    const Matrix gq = space.coupling() * q.matrix();  // dim x K
    std::vector<double> row_sums(dim);
    const Matrix& gamma = space.coupling();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < dim; ++i) {
        const double zi = space.discrete_eigenvalue(i) * dt;
        const double fi = theta_amplification(theta, zi);
        const double gi = 1.0 / (1.0 + theta * zi);
        double s = 0.0;
        for (int l = 0; l < k; ++l) {
            const double lam = model.eigenvalue(l);
            const double e = std::exp(-lam * dt);
            const double r = fi * e;
            double geo;
            if (std::abs(1.0 - r) < 1e-12) {
                geo = static_cast<double>(nsteps);
            } else if (std::abs(r) >= 1.0) {
                geo = 0.0;
                double p = 1.0;
                for (long j = 0; j < nsteps; ++j) { geo += p; p *= r; }
            } else if (r <= 0.5) {
                geo = (1.0 - std::pow(r, static_cast<double>(nsteps))) / (1.0 - r);
            } else {
                geo = -std::expm1(static_cast<double>(nsteps) * std::log1p(r - 1.0)) / (1.0 - r);
            }
            const double j_il = dt * one_minus_exp_over(lam * dt) * geo;
            s += gamma(i, l) * gq(i, l) * gi * j_il;
        }
        row_sums[i] = s;
    }
    const double cross = pairwise_sum(row_sums);

    return mean_diff.squaredNorm() + disc.cov.trace() + cont.cov.trace() - 2.0 * cross;
}

double kolmogorov_value(const SpectralModel& model, const CovarianceModel& q, double total_time,
                        double t, const Vector& y, const Functional& phi) {
    if (t < 0.0 || t > total_time)
        throw std::invalid_argument("kolmogorov_value: t must lie in [0, T]");
    if (phi.kind != Functional::Kind::cosine)
        throw std::invalid_argument("kolmogorov_value: closed form implemented for cosine functionals");
    const int k = q.mode_count();
    const Vector g = padded(std::span<const double>(phi.g.data(), phi.g.size()), k, "kolmogorov_value");
    const Vector yy = padded(std::span<const double>(y.data(), y.size()), k, "kolmogorov_value");
    const double tau = total_time - t;
    double gcg = 0.0;
    if (tau > 0.0) {
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) {
                const double s = model.eigenvalue(i) + model.eigenvalue(j);
                gcg += g[i] * g[j] * q.matrix()(i, j) * tau * one_minus_exp_over(s * tau);
            }
        }
    }
    return std::cos(g.dot(yy) + phi.phase) * std::exp(-0.5 * gcg);
}

}  // namespace spde
