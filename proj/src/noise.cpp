#include "spde/noise.hpp"

#include <cmath>
#include <numbers>

namespace spde {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t mul0 = 0xD2511F53u, mul1 = 0xCD9E8D57u;
    constexpr std::uint32_t weyl0 = 0x9E3779B9u, weyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(mul0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(mul1) * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
               static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
               static_cast<std::uint32_t>(p0)};
        key[0] += weyl0;
        key[1] += weyl1;
    }
    return ctr;
}

namespace {

// Acklam's rational approximation to the inverse normal CDF.
constexpr double a_[6] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                          1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
constexpr double b_[5] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                          6.680131188771972e+01, -1.328068155288572e+01};
constexpr double c_[6] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                          -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
constexpr double d_[4] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                          3.754408661907416e+00};

double acklam(double p) {
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c_[0] * q + c_[1]) * q + c_[2]) * q + c_[3]) * q + c_[4]) * q + c_[5]) /
               ((((d_[0] * q + d_[1]) * q + d_[2]) * q + d_[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        return (((((a_[0] * r + a_[1]) * r + a_[2]) * r + a_[3]) * r + a_[4]) * r + a_[5]) * q /
               (((((b_[0] * r + b_[1]) * r + b_[2]) * r + b_[3]) * r + b_[4]) * r + 1.0);
    }
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c_[0] * q + c_[1]) * q + c_[2]) * q + c_[3]) * q + c_[4]) * q + c_[5]) /
           ((((d_[0] * q + d_[1]) * q + d_[2]) * q + d_[3]) * q + 1.0);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double inverse_normal_cdf(double p) {
    double x = acklam(p);
    // One Halley step against the erfc-based CDF.
    const double err = normal_cdf(x) - p;
    const double u = err * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double NoiseStream::normal(std::uint64_t path, std::uint32_t step, std::uint32_t mode) const {
    const std::array<std::uint32_t, 4> ctr = {mode >> 1, step, static_cast<std::uint32_t>(path),
                                              static_cast<std::uint32_t>(path >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                              static_cast<std::uint32_t>(seed_ >> 32)};
    const auto words = philox4x32(ctr, key);
    const int lane = static_cast<int>(mode & 1u);
    const std::uint64_t bits =
        (static_cast<std::uint64_t>(words[2 * lane]) << 32) | words[2 * lane + 1];
    // 53-bit uniform centered in (0,1): never 0 or 1, safe to invert.
    const double p = static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
    return inverse_normal_cdf(p);
}

void NoiseStream::fill_step(std::uint64_t path, std::uint32_t step, std::span<double> out) const {
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                              static_cast<std::uint32_t>(seed_ >> 32)};
    for (std::size_t m = 0; m < out.size(); m += 2) {
        const std::array<std::uint32_t, 4> ctr = {static_cast<std::uint32_t>(m >> 1), step,
                                                  static_cast<std::uint32_t>(path),
                                                  static_cast<std::uint32_t>(path >> 32)};
        const auto words = philox4x32(ctr, key);
        const std::uint64_t b0 = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
        out[m] = inverse_normal_cdf(static_cast<double>(b0 >> 11) * 0x1.0p-53 + 0x1.0p-54);
        if (m + 1 < out.size()) {
            const std::uint64_t b1 = (static_cast<std::uint64_t>(words[2]) << 32) | words[3];
            out[m + 1] = inverse_normal_cdf(static_cast<double>(b1 >> 11) * 0x1.0p-53 + 0x1.0p-54);
        }
    }
}

double NoiseStream::aggregate_normal(std::uint64_t path, std::uint32_t coarse_step,
                                     std::uint32_t mode, std::uint32_t ratio) const {
    double s = 0.0;
    for (std::uint32_t j = 0; j < ratio; ++j) s += normal(path, coarse_step * ratio + j, mode);
    return s / std::sqrt(static_cast<double>(ratio));
}

}  // namespace spde
