#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace spde {

/// Philox 4x32-10 counter-based block cipher (Salmon et al.). One block maps
/// a 128-bit counter and 64-bit key to four independent 32-bit words.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Inverse of the standard normal CDF. Rational approximation (Acklam)
/// polished by one Halley step through erfc, giving ~1 ulp over (0, 1).
double inverse_normal_cdf(double p);

/// Standard normal CDF via erfc (used by tests as the independent check).
double normal_cdf(double x);

/// Deterministic map (seed; path, step, mode) -> N(0,1) variate. Stateless:
/// the variate depends only on the four indices, never on evaluation order or
/// thread count. Each Philox block yields two variates (mode pairs share a
/// block); 53-bit uniforms are taken strictly inside (0,1) before inversion.
class NoiseStream {
public:
    explicit NoiseStream(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    double normal(std::uint64_t path, std::uint32_t step, std::uint32_t mode) const;

    /// Fills out[m] = normal(path, step, m) for m in [0, out.size()).
    void fill_step(std::uint64_t path, std::uint32_t step, std::span<double> out) const;

    /// The coarse-step increment used by coupled refinements: the sum of
    /// `ratio` consecutive fine-step variates scaled by 1/sqrt(ratio).
    double aggregate_normal(std::uint64_t path, std::uint32_t coarse_step, std::uint32_t mode,
                            std::uint32_t ratio) const;

private:
    std::uint64_t seed_;
};

}  // namespace spde
