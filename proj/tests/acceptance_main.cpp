// Acceptance suite: runs every headline check at its stated tolerance and
// prints one pass/fail line per criterion. Exit code is the number of
// failures.

#include "spde/law.hpp"
#include "spde/mc.hpp"
#include "spde/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace spde;
using clock_type = std::chrono::steady_clock;

int failures = 0;

void report(int index, bool pass, double seconds, double budget, const std::string& detail) {
    const bool in_budget = seconds <= budget;
    if (!pass || !in_budget) ++failures;
    std::printf("[%s] C%-2d %s (%.2fs / budget %.0fs)%s\n", (pass && in_budget) ? "PASS" : "FAIL",
                index, detail.c_str(), seconds, budget, in_budget ? "" : " [over budget]");
    std::fflush(stdout);
}

template <typename F>
double timed(F&& f) {
    const auto t0 = clock_type::now();
    f();
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

// The weak-order studies use the cosine functional with g = sum_k e_k: a
// bounded C^2 functional that senses every retained mode. A single-mode g
// superconverges (the per-mode variance error of the theta-scheme is O(dt)),
// so it cannot exhibit the infinite-dimensional rate these criteria pin.
StudyConfig weak_study_base() {
    StudyConfig cfg;
    cfg.kind = StudyKind::time_weak;
    cfg.modes = 64;
    cfg.noise = NoiseKind::white;
    cfg.alpha = 0.51;
    cfg.beta = 0.0;
    cfg.theta = 1.0;
    cfg.total_time = 1.0;
    cfg.m_list = {64};
    cfg.g_spec = "all";
    cfg.x0_spec = "zero";
    return cfg;
}

void criterion_1() {
    double slope = 0;
    const double secs = timed([&] {
        StudyConfig cfg = weak_study_base();
        cfg.n_list = {8, 16, 32, 64, 128, 256};
        const ConvergenceReport rep = run_study(cfg);
        slope = rep.fit.slope.value_or(-1);
    });
    const bool pass = slope >= 0.40 && slope <= 0.58;
    report(1, pass, secs, 10, "time weak order, white noise: slope " + fmt(slope) + " in [0.40, 0.58]");
}

void criterion_2() {
    double slope = 0;
    const double secs = timed([&] {
        StudyConfig cfg = weak_study_base();
        cfg.kind = StudyKind::space_weak;
        cfg.space = SpaceKind::fem_p1;
        cfg.elements_list = {4, 8, 16, 32};
        cfg.n_list = {1 << 12};
        const ConvergenceReport rep = run_study(cfg);
        slope = rep.fit.slope.value_or(-1);
    });
    const bool pass = slope >= 0.85 && slope <= 1.15;
    report(2, pass, secs, 60, "space weak order, P1 elements: slope " + fmt(slope) + " in [0.85, 1.15]");
}

void criterion_3() {
    double ratio = 0, sw = 0, ss = 0;
    const double secs = timed([&] {
        // One common grid for both fits; deep enough that both rates sit on
        // their asymptotic plateaus.
        const std::vector<long> grid = {32, 64, 128, 256, 512, 1024};
        const auto model = build_dirichlet_laplacian_1d(64);
        const auto space = build_spectral_space(64, model);
        const auto q = white_covariance(64);
        const auto phi = cosine_functional(Vector::Ones(64), 0.0);
        std::vector<double> lx, lw, ls;
        for (long n : grid) {
            const ThetaScheme scheme(1.0, 1.0, n);
            lx.push_back(std::log2(1.0 / static_cast<double>(n)));
            lw.push_back(std::log2(weak_error(model, space, q, scheme, {}, phi)));
            ls.push_back(std::log2(std::sqrt(strong_error_sq(model, space, q, scheme, {}))));
        }
        sw = fit_line(lx, lw).slope;
        ss = fit_line(lx, ls).slope;
        ratio = sw / ss;
    });
    const bool pass = ratio >= 1.7 && ratio <= 2.3;
    report(3, pass, secs, 30,
           "weak = 2 x strong on the shared grid N = 32..1024: slope_weak " + fmt(sw) +
               ", slope_strong " + fmt(ss) + ", ratio " + fmt(ratio) + " in [1.7, 2.3]");
}

void criterion_4() {
    double slope = 0, white_slope = 0;
    const double secs = timed([&] {
        StudyConfig cfg = weak_study_base();
        cfg.noise = NoiseKind::diagonal_power;
        cfg.beta0 = 0.5;
        cfg.alpha = 0.51;
        cfg.beta = 0.5;
        cfg.n_list = {256, 512, 1024, 2048, 4096, 8192};
        slope = run_study(cfg).fit.slope.value_or(-1);

        StudyConfig wht = weak_study_base();
        wht.n_list = cfg.n_list;
        white_slope = run_study(wht).fit.slope.value_or(-1);
    });
    const bool pass = slope >= 0.8 && slope <= 1.05 && slope > white_slope;
    report(4, pass, secs, 10,
           "smoother noise beta0 = 0.5 lifts the weak slope: " + fmt(slope) +
               " in [0.8, 1.05], white on same grid " + fmt(white_slope));
}

void criterion_5() {
    // N * sup_z |e^{-Nz} - F^N(z)| per theta: bounded by one constant with
    // <= 25% variation across N in {2 .. 1024}. For theta < 1 the plateau
    // |F(inf)|^N * N at small N genuinely breaks the 25% constancy even
    // though the Le Roux bound itself (uniform boundedness) holds; the
    // criterion is reported as measured.
    std::string detail = "deterministic theta-scheme bound:";
    bool pass = true;
    const double secs = timed([&] {
        const auto model = build_dirichlet_laplacian_1d(256);
        const auto space = build_p1_space(32, model);
        for (double theta : {0.6, 0.75, 1.0}) {
            double cmin = 1e300, cmax = 0;
            for (long n = 2; n <= 1024; n *= 2) {
                const double gap = leroux_gap(theta, n);
                const double c = static_cast<double>(n) * gap;
                cmin = std::min(cmin, c);
                cmax = std::max(cmax, c);
                // the sup over z dominates the discrete-spectrum norm
                const double dt = 1.0 / static_cast<double>(n);
                double disc = 0;
                for (int i = 0; i < space.dim(); ++i) {
                    const double z = space.discrete_eigenvalue(i) * dt;
                    disc = std::max(disc, std::abs(std::exp(-static_cast<double>(n) * z) -
                                                   std::pow(theta_amplification(theta, z),
                                                            static_cast<double>(n))));
                }
                if (disc > gap * (1 + 1e-9)) pass = false;
            }
            const double variation = (cmax - cmin) / cmax;
            detail += " theta " + fmt(theta) + ": kappa " + fmt(cmax) + ", variation " +
                      fmt(100 * variation) + "%;";
            if (variation > 0.25) pass = false;
        }
    });
    report(5, pass, secs, 5, detail + " require <= 25%");
}

void criterion_6() {
    bool pass = true;
    std::string worst_id = "-";
    double worst = 0;
    const double secs = timed([&] {
        const auto model = build_dirichlet_laplacian_1d(4096);
        std::mt19937_64 rng(2025);
        std::uniform_real_distribution<double> d(-1, 1);
        auto track = [&](const char* id, double rel) {
            if (rel > worst) { worst = rel; worst_id = id; }
            if (rel > 1e-9) pass = false;
        };
        for (int m : {4, 16, 64}) {
            const auto s = build_p1_space(m, model);
            const int dim = s.dim();
            for (int trial = 0; trial < 5; ++trial) {
                Vector f(256);
                for (int i = 0; i < 256; ++i) f[i] = d(rng);
                const Vector lhs = s.th_solve({f.data(), 256});
                Vector tf(256);
                for (int i = 0; i < 256; ++i) tf[i] = f[i] / model.eigenvalue(i);
                const Vector rhs = s.ritz_project({tf.data(), 256});
                track("ThPh=PihT", (lhs - rhs).norm() / (1 + rhs.norm()));

                Vector xi(dim);
                for (int i = 0; i < dim; ++i) xi[i] = d(rng);
                const Vector nodal = s.eigenvectors() * xi;
                double energy = 0, prev = 0;
                for (int j = 0; j < dim; ++j) {
                    energy += (nodal[j] - prev) * (nodal[j] - prev) / s.mesh_width();
                    prev = nodal[j];
                }
                energy += prev * prev / s.mesh_width();
                double discrete_energy = 0;
                for (int i = 0; i < dim; ++i) discrete_energy += s.discrete_eigenvalue(i) * xi[i] * xi[i];
                track("|A^.5 w|=|Ah^.5 w|",
                      std::abs(std::sqrt(energy) - std::sqrt(discrete_energy)) / std::sqrt(discrete_energy));

                double lhs_t = 0;
                for (int i = 0; i < dim; ++i) lhs_t += xi[i] * xi[i] / s.discrete_eigenvalue(i);
                const Vector w = s.embed({xi.data(), static_cast<std::size_t>(dim)});
                double rhs_t = 0;
                for (int kk = 0; kk < w.size(); ++kk) rhs_t += w[kk] * w[kk] / model.eigenvalue(kk);
                track("|Th^.5 w|=|T^.5 w|", std::abs(std::sqrt(lhs_t) - std::sqrt(rhs_t)) / std::sqrt(rhs_t));

                Vector v(4096);
                for (int i = 0; i < 4096; ++i) v[i] = d(rng);
                const Vector pv = s.ph_project({v.data(), 4096});
                double lhs_p = 0;
                for (int i = 0; i < dim; ++i) lhs_p += pv[i] * pv[i] / s.discrete_eigenvalue(i);
                double rhs_p = 0;
                for (int kk = 0; kk < 4096; ++kk) rhs_p += v[kk] * v[kk] / model.eigenvalue(kk);
                track("|Th^.5 Ph v|<=|T^.5 v|", lhs_p <= rhs_p * (1 + 1e-9) ? 0.0 : 1.0);
            }
        }
    });
    report(6, pass, secs, 5,
           "elliptic identity suite at 1e-9, M in {4,16,64}: worst rel " + fmt(worst) + " (" + worst_id + ")");
}

void criterion_7() {
    double s0 = 0, s1 = 0;
    const double secs = timed([&] {
        const auto model = build_dirichlet_laplacian_1d(512);
        std::vector<double> lh, l0, l1;
        for (int m : {8, 16, 32, 64}) {
            const auto s = build_p1_space(m, model);
            lh.push_back(std::log2(1.0 / m));
            l0.push_back(std::log2(semigroup_error(s, model, 0.1, 0)));
            l1.push_back(std::log2(semigroup_error(s, model, 0.1, 1)));
        }
        s0 = fit_line(lh, l0).slope;
        s1 = fit_line(lh, l1).slope;
    });
    const bool pass = std::abs(s0 - 2.0) <= 0.15 && std::abs(s1 - 1.0) <= 0.15;
    report(7, pass, secs, 30,
           "semigroup approximation rates at t = 0.1: H slope " + fmt(s0) + " (2 +- 0.15), V slope " +
               fmt(s1) + " (1 +- 0.15)");
}

void criterion_8() {
    bool pass = true;
    double worst_disc = 0, cont_err = 0, strong_rel = 0;
    const double secs = timed([&] {
        // (a) discrete law vs brute-force accumulation, 20 random configs
        std::mt19937_64 rng(4242);
        std::uniform_real_distribution<double> theta_d(0.51, 1.0), entry(-1, 1);
        std::uniform_int_distribution<int> n_d(1, 64), k_d(2, 8), m_d(2, 8);
        for (int trial = 0; trial < 20; ++trial) {
            const int k = k_d(rng);
            const auto model = build_dirichlet_laplacian_1d(k);
            Matrix a(k, k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) a(i, j) = entry(rng);
            const CovarianceModel q(Matrix(a * a.transpose()), CovarianceModel::Kind::custom, "random");
            const DiscreteSpace space = (trial % 2 == 0)
                                            ? build_spectral_space(std::min(k, m_d(rng)), model)
                                            : build_p1_space(std::max(2, m_d(rng)), model);
            const ThetaScheme scheme(theta_d(rng), 1.0, n_d(rng));
            const GaussianState law = discrete_law(space, q, scheme, {});

            Vector f(space.dim()), g(space.dim());
            for (int i = 0; i < space.dim(); ++i) {
                const double z = space.discrete_eigenvalue(i) * scheme.dt();
                f[i] = theta_amplification(scheme.theta(), z);
                g[i] = 1.0 / (1.0 + scheme.theta() * z);
            }
            const Matrix qh = space.coupling() * q.matrix() * space.coupling().transpose();
            Matrix brute = Matrix::Zero(space.dim(), space.dim());
            Vector pw = Vector::Ones(space.dim());
            for (long step = 0; step < scheme.steps(); ++step) {
                for (int i = 0; i < space.dim(); ++i)
                    for (int j = 0; j < space.dim(); ++j)
                        brute(i, j) += scheme.dt() * pw[i] * pw[j] * g[i] * g[j] * qh(i, j);
                for (int i = 0; i < space.dim(); ++i) pw[i] *= f[i];
            }
            const double rel = (law.cov - brute).cwiseAbs().maxCoeff() / brute.cwiseAbs().maxCoeff();
            worst_disc = std::max(worst_disc, rel);
            if (rel > 1e-10) pass = false;
        }

        // (b) continuous law vs composite Simpson with 1e5 intervals
        {
            const auto model = build_dirichlet_laplacian_1d(4);
            const std::vector<double> coeffs = {0.3, 0.9, 0.5};
            const auto q = kernel_covariance(4, coeffs);
            const auto law = continuous_law(model, q, {}, 1.0);
            const int n = 100000;
            const double hs = 1.0 / n;
            Matrix acc = Matrix::Zero(4, 4);
            for (int i = 0; i <= n; ++i) {
                const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
                const double tau = 1.0 - i * hs;
                for (int aa = 0; aa < 4; ++aa)
                    for (int bb = 0; bb < 4; ++bb)
                        acc(aa, bb) += w * std::exp(-(model.eigenvalue(aa) + model.eigenvalue(bb)) * tau) *
                                       q.matrix()(aa, bb);
            }
            acc *= hs / 3.0;
            cont_err = (law.cov - acc).cwiseAbs().maxCoeff();
            if (cont_err > 1e-8) pass = false;
        }

        // (c) strong error vs the fine-quadrature Ito-isometry oracle, K=2 N=2
        {
            const auto model = build_dirichlet_laplacian_1d(2);
            const auto space = build_spectral_space(2, model);
            const auto q = white_covariance(2);
            const ThetaScheme scheme(1.0, 1.0, 2);
            const double claimed = strong_error_sq(model, space, q, scheme, {});
            double acc = 0.0;
            const double dt = scheme.dt();
            for (long n = 0; n < 2; ++n) {
                Vector dh(2);
                for (int i = 0; i < 2; ++i) {
                    const double z = model.eigenvalue(i) * dt;
                    dh[i] = std::pow(theta_amplification(1.0, z), static_cast<double>(2 - n - 1)) /
                            (1 + z);
                }
                const int sub = 1000;
                const double hs = dt / sub;
                double local = 0;
                for (int j = 0; j <= sub; ++j) {
                    const double s = n * dt + j * hs;
                    const double w = (j == 0 || j == sub) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
                    for (int i = 0; i < 2; ++i) {
                        const double diff = dh[i] - std::exp(-model.eigenvalue(i) * (1.0 - s));
                        local += w * diff * diff;
                    }
                }
                acc += local * hs / 3.0;
            }
            strong_rel = std::abs(claimed - acc) / acc;
            if (strong_rel > 1e-6) pass = false;
        }
    });
    report(8, pass, secs, 20,
           "oracle equivalences: discrete vs brute rel " + fmt(worst_disc) +
               " (<= 1e-10), continuous vs Simpson " + fmt(cont_err) + " (<= 1e-8), strong vs quadrature rel " +
               fmt(strong_rel) + " (<= 1e-6)");
}

void criterion_9() {
    bool pass = true;
    bool bitwise = true;
    double worst_sigma = 0;
    const double secs = timed([&] {
        const auto model = build_dirichlet_laplacian_1d(4);
        const auto space = build_spectral_space(4, model);
        const auto q = white_covariance(4);
        const ThetaScheme scheme(1.0, 1.0, 16);
        const SchemeSampler sampler(space, q, scheme, {});
        const NoiseStream stream(20240915);
        const std::uint64_t paths = 100000;
        const double n = static_cast<double>(paths);

        const McMoments mm = mc_moments(sampler, paths, stream);
        const GaussianState law = discrete_law(space, q, scheme, {});
        auto sigma_track = [&](double devs) {
            worst_sigma = std::max(worst_sigma, devs);
            if (devs > 4.0) pass = false;
        };
        for (int i = 0; i < 4; ++i) {
            sigma_track(std::abs(mm.mean[i] - law.mean[i]) / std::sqrt(law.cov(i, i) / n));
            sigma_track(std::abs(mm.cov(i, i) - law.cov(i, i)) /
                        (law.cov(i, i) * std::sqrt(2.0 / (n - 1))));
            for (int j = 0; j < i; ++j) {
                const double r = mm.cov(i, j) / std::sqrt(mm.cov(i, i) * mm.cov(j, j));
                sigma_track(std::abs(std::atanh(r)) * std::sqrt(n - 3));
            }
        }
        const auto phi = cosine_functional(Vector::Ones(4), 0.0);
        const McEstimate est = mc_expect_functional(sampler, phi, paths, stream);
        const double exact = expect_functional(law, phi, &space);
        sigma_track(std::abs(est.estimate - exact) / est.stderr_);

#ifdef _OPENMP
        const int saved = omp_get_max_threads();
        omp_set_num_threads(1);
        const McEstimate est1 = mc_expect_functional(sampler, phi, paths, stream);
        const McMoments mm1 = mc_moments(sampler, paths, stream);
        omp_set_num_threads(std::max(4, saved));
        const McEstimate est4 = mc_expect_functional(sampler, phi, paths, stream);
        const McMoments mm4 = mc_moments(sampler, paths, stream);
        omp_set_num_threads(saved);
        bitwise = est1.estimate == est4.estimate && est1.stderr_ == est4.stderr_ &&
                  mm1.mean == mm4.mean && mm1.cov == mm4.cov && est1.estimate == est.estimate;
#endif
        if (!bitwise) pass = false;
    });
    report(9, pass, secs, 60,
           "MC vs exact law at 1e5 paths: worst deviation " + fmt(worst_sigma) +
               " sigma (<= 4), thread-count bitwise match " + (bitwise ? "yes" : "NO"));
}

void criterion_10() {
    bool pass = true;
    std::string cs;
    const double secs = timed([&] {
        const double gamma = 0.4, gamma1 = 0.45, theta = 1.0, total_time = 1.0;
        const auto model = build_dirichlet_laplacian_1d(512);
        double cmin = 1e300, cmax = 0;
        for (long n_steps : {16L, 64L, 256L}) {
            const double dt = total_time / static_cast<double>(n_steps);
            double fitted = 0;
            for (long n = 0; n + 1 < n_steps; ++n) {  // n < N - 1
                for (double t : {n * dt, (n + 0.5) * dt, (n + 1) * dt}) {
                    double sup = 0;
                    for (int i = 0; i < model.mode_count(); ++i) {
                        const double lam = model.eigenvalue(i);
                        const double z = lam * dt;
                        const double kernel =
                            std::pow(theta_amplification(theta, z), static_cast<double>(n_steps - n - 1)) /
                            (1 + theta * z);
                        const double value = std::abs(kernel - std::exp(-lam * (total_time - t))) *
                                             std::pow(lam, (1 - gamma1) / 2);
                        sup = std::max(sup, value);
                    }
                    const double rhs = std::pow(dt, gamma / 2) *
                                       std::pow((n_steps - n - 1) * dt, -(1 - gamma1 + gamma) / 2);
                    fitted = std::max(fitted, sup / rhs);
                }
            }
            cmin = std::min(cmin, fitted);
            cmax = std::max(cmax, fitted);
            cs += " C(N=" + std::to_string(n_steps) + ") = " + fmt(fitted) + ";";
        }
        if ((cmax - cmin) / cmax > 0.25) pass = false;
        cs += " variation " + fmt(100 * (cmax - cmin) / cmax) + "%";
    });
    report(10, pass, secs, 10, "time-kernel bound, (gamma, gamma1) = (0.4, 0.45):" + cs + " (require <= 25%)");
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf("%d criterion(s) failed\n", failures);
    return failures;
}
