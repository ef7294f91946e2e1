#include "spde/mc.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace spde;

TEST_CASE("deterministic path when Q = 0") {
    const auto model = build_dirichlet_laplacian_1d(6);
    const auto space = build_p1_space(5, model);
    const CovarianceModel q0(Matrix::Zero(6, 6), CovarianceModel::Kind::custom, "zero");
    const ThetaScheme scheme(0.8, 1.0, 12);
    std::vector<double> x0 = {1.0, -0.5, 0.25};
    const SchemeSampler sampler(space, q0, scheme, x0);
    const NoiseStream stream(1);
    const Vector path = sampler.sample_path(stream, 0);
    const Vector phx = space.ph_project(x0);
    for (int i = 0; i < space.dim(); ++i) {
        const double f = theta_amplification(0.8, space.discrete_eigenvalue(i) * scheme.dt());
        CHECK(path[i] == doctest::Approx(std::pow(f, 12.0) * phx[i]).epsilon(1e-13));
    }
}

TEST_CASE("mc_expect basics") {
    SUBCASE("constant functional") {
        const auto est = mc_expect([](std::uint64_t) { return 1.0; }, 1000);
        CHECK(est.estimate == 1.0);
        CHECK(est.stderr_ == 0.0);
    }
    SUBCASE("needs two paths") {
        CHECK_THROWS_AS(mc_expect([](std::uint64_t) { return 0.0; }, 1), std::invalid_argument);
    }
}

TEST_CASE("sample moments match the exact discrete law within 4 stderr") {
    const auto model = build_dirichlet_laplacian_1d(4);
    const auto space = build_spectral_space(4, model);
    const auto q = white_covariance(4);
    const ThetaScheme scheme(1.0, 1.0, 16);
    const SchemeSampler sampler(space, q, scheme, {});
    const NoiseStream stream(2024);
    const std::uint64_t paths = 100000;

    const McMoments mm = mc_moments(sampler, paths, stream);
    const GaussianState law = discrete_law(space, q, scheme, {});
    const double n = static_cast<double>(paths);

    for (int i = 0; i < 4; ++i) {
        const double se_mean = std::sqrt(law.cov(i, i) / n);
        CHECK(std::abs(mm.mean[i] - law.mean[i]) <= 4 * se_mean);
        // variance of the sample variance for a Gaussian: 2 sigma^4 / (n - 1)
        const double se_var = law.cov(i, i) * std::sqrt(2.0 / (n - 1));
        CHECK(std::abs(mm.cov(i, i) - law.cov(i, i)) <= 4 * se_var);
    }
    // off-diagonals through the Fisher transform of the sample correlation
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < i; ++j) {
            const double r = mm.cov(i, j) / std::sqrt(mm.cov(i, i) * mm.cov(j, j));
            const double rho = law.cov(i, j) / std::sqrt(law.cov(i, i) * law.cov(j, j));
            const double z = std::atanh(r) - std::atanh(rho);
            CHECK(std::abs(z) <= 4.0 / std::sqrt(n - 3));
        }
    }
}

TEST_CASE("mc cosine expectation: coverage over 20 seeds") {
    const auto model = build_dirichlet_laplacian_1d(4);
    const auto space = build_spectral_space(4, model);
    const auto q = white_covariance(4);
    const ThetaScheme scheme(1.0, 1.0, 8);
    const SchemeSampler sampler(space, q, scheme, {});
    const auto phi = cosine_functional(Vector::Ones(4), 0.0);
    const GaussianState law = discrete_law(space, q, scheme, {});
    const double exact = expect_functional(law, phi, &space);

    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const NoiseStream stream(seed * 7919);
        const auto est = mc_expect_functional(sampler, phi, 20000, stream);
        if (std::abs(est.estimate - exact) <= 4 * est.stderr_) ++hits;
    }
    CHECK(hits >= 19);  // 4-sigma misses are ~6e-5 likely per trial
}

TEST_CASE("stderr halves like 1/sqrt(M)") {
    const auto model = build_dirichlet_laplacian_1d(4);
    const auto space = build_spectral_space(4, model);
    const auto q = white_covariance(4);
    const ThetaScheme scheme(1.0, 1.0, 8);
    const SchemeSampler sampler(space, q, scheme, {});
    const auto phi = cosine_functional(Vector::Ones(4), 0.0);

    double ratio_sum = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const NoiseStream stream(seed);
        const auto big = mc_expect_functional(sampler, phi, 20000, stream);
        const auto small = mc_expect_functional(sampler, phi, 10000, stream);
        ratio_sum += (small.stderr_ * small.stderr_) / (big.stderr_ * big.stderr_);
    }
    CHECK(ratio_sum / 10.0 == doctest::Approx(2.0).epsilon(0.2));
}

#ifdef _OPENMP
TEST_CASE("bitwise reproducibility across thread counts") {
    const auto model = build_dirichlet_laplacian_1d(4);
    const auto space = build_spectral_space(4, model);
    const auto q = white_covariance(4);
    const ThetaScheme scheme(1.0, 1.0, 16);
    const SchemeSampler sampler(space, q, scheme, {});
    const auto phi = cosine_functional(Vector::Ones(4), 0.0);
    const NoiseStream stream(5150);

    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto one = mc_expect_functional(sampler, phi, 20000, stream);
    const McMoments mm1 = mc_moments(sampler, 5000, stream);
    omp_set_num_threads(std::max(4, saved));
    const auto many = mc_expect_functional(sampler, phi, 20000, stream);
    const McMoments mm4 = mc_moments(sampler, 5000, stream);
    omp_set_num_threads(saved);

    CHECK(one.estimate == many.estimate);
    CHECK(one.stderr_ == many.stderr_);
    CHECK(mm1.mean == mm4.mean);
    CHECK(mm1.cov == mm4.cov);
}
#endif

TEST_CASE("coupled refinement") {
    const auto model = build_dirichlet_laplacian_1d(8);
    const auto space = build_spectral_space(8, model);
    const auto q = white_covariance(8);
    const NoiseStream stream(31415);

    SUBCASE("identical schemes couple to exactly zero") {
        const ThetaScheme scheme(1.0, 1.0, 16);
        const auto est = coupled_refinement_error(space, space, q, scheme, scheme, {}, stream, 500);
        CHECK(est.estimate == 0.0);
        CHECK(est.stderr_ == 0.0);
    }

    SUBCASE("rejects non-nested schemes") {
        const ThetaScheme fine(1.0, 1.0, 12), coarse(1.0, 1.0, 8);
        CHECK_THROWS_AS(coupled_refinement_error(space, space, q, fine, coarse, {}, stream, 10),
                        std::invalid_argument);
    }

    SUBCASE("ratio 2 sits inside the exact-law triangle bounds") {
        const ThetaScheme fine(1.0, 1.0, 64), coarse(1.0, 1.0, 32);
        const auto est = coupled_refinement_error(space, space, q, fine, coarse, {}, stream, 20000);
        const auto sref = build_dirichlet_laplacian_1d(8);
        const double sc = std::sqrt(strong_error_sq(sref, space, q, coarse, {}));
        const double sf = std::sqrt(strong_error_sq(sref, space, q, fine, {}));
        const double upper = (sc + sf) * (sc + sf);
        const double lower = (sc - sf) * (sc - sf);
        CHECK(est.estimate <= upper + 4 * est.stderr_);
        CHECK(est.estimate >= lower - 4 * est.stderr_);
    }

    SUBCASE("squared coupling error decays with slope ~ 0.5 in dt") {
        std::vector<double> lx, ly;
        for (long n = 8; n <= 256; n *= 2) {
            const ThetaScheme fine(1.0, 1.0, 2 * n), coarse(1.0, 1.0, n);
            const auto est = coupled_refinement_error(space, space, q, fine, coarse, {}, stream, 10000);
            lx.push_back(std::log2(1.0 / static_cast<double>(n)));
            ly.push_back(std::log2(est.estimate));
        }
        CHECK(fit_line(lx, ly).slope == doctest::Approx(0.5).epsilon(0.3));
    }
}
