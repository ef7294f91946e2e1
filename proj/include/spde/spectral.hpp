#pragma once

#include "spde/linalg.hpp"

#include <span>
#include <string>
#include <vector>

namespace spde {

/// Spectral representation of the operator A: eigenvalues lambda_1 <= ... <=
/// lambda_K with the eigenfunctions kept implicit. All computations in the
/// library are carried out on coefficient vectors in this eigenbasis.
/// Immutable after construction.
class SpectralModel {
public:
    SpectralModel(std::vector<double> eigenvalues, std::string domain_tag);

    int mode_count() const { return static_cast<int>(eigenvalues_.size()); }
    double eigenvalue(int n) const { return eigenvalues_[n]; }  // 0-based
    std::span<const double> eigenvalues() const { return eigenvalues_; }
    const std::string& domain_tag() const { return domain_tag_; }

private:
    std::vector<double> eigenvalues_;
    std::string domain_tag_;
};

/// lambda_n = (n pi)^2, e_n = sqrt(2) sin(n pi x) on (0,1).
SpectralModel build_dirichlet_laplacian_1d(int mode_count);

/// Implicit theta-scheme time grid: N steps of size dt = T/N, weight theta.
/// 1/2 < theta <= 1 unless allow_unstable, which admits theta in [0, 1/2]
/// for demonstrating instability only.
class ThetaScheme {
public:
    ThetaScheme(double theta, double total_time, long steps, bool allow_unstable = false);

    double theta() const { return theta_; }
    double dt() const { return dt_; }
    long steps() const { return steps_; }
    double total_time() const { return total_time_; }
    double time_at(long n) const { return static_cast<double>(n) * dt_; }

private:
    double theta_;
    double total_time_;
    long steps_;
    double dt_;
};

/// |u|_{D(A^{s/2})} = (sum_n lambda_n^s u_n^2)^{1/2}; s < 0 is the dual norm.
double frac_power_norm(const SpectralModel& model, std::span<const double> u, double s);

/// Component-wise e^{-lambda_n t} u_n. Rejects t < 0.
std::vector<double> semigroup_apply(const SpectralModel& model, double t, std::span<const double> u);

/// Amplification factor F(z) = (1 - (1-theta) z) / (1 + theta z) of the
/// theta-scheme on a mode with z = lambda dt.
double theta_amplification(double theta, double z);

/// Sharp constant of the smoothing bound sup_{x>=0} x^s e^{-tx} = C(s) t^{-s},
/// namely C(s) = (s/e)^s.
double smoothing_constant(double s);

/// sup_{z >= 0} | e^{-N z} - F(z)^N |, estimated by a dense scan over a
/// logarithmic grid z in [1e-6, 1e6] (2^14 points) followed by golden-section
/// refinement around the grid maximizer. Requires theta > 1/2.
double leroux_gap(double theta, long steps);

/// Truncated trace of A^{-alpha} with an integral-comparison tail bound.
struct FracTrace {
    bool divergent = false;   ///< alpha <= 1/2: the full series diverges
    double finite_part = 0.0; ///< sum_{n<=K} lambda_n^{-alpha}
    double tail_bound = 0.0;  ///< >= sum_{n>K} (n pi)^{-2 alpha}
};
FracTrace trace_frac(const SpectralModel& model, double alpha);

}  // namespace spde
