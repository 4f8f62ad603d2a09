#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace heatcurve {

/// Sobol' points (Joe-Kuo direction numbers) in up to kMaxDims dimensions,
/// randomized by a per-dimension XOR digital shift derived from `seed`.
/// The sequence is fully determined by (dims, seed).
class SobolSequence {
public:
    static constexpr int kMaxDims = 8;
    static constexpr int kBits = 32;

    SobolSequence(int dims, std::uint64_t seed);

    int dims() const noexcept { return dims_; }

    /// Writes the next point into out[0..dims). Coordinates lie in (0, 1).
    void next(std::span<double> out);

    /// Restarts the sequence; the shift is kept.
    void reset() noexcept;

private:
    int dims_;
    std::uint64_t index_ = 0;
    std::vector<std::array<std::uint32_t, kBits>> directions_;
    std::vector<std::uint32_t> state_;
    std::vector<std::uint32_t> shift_;
};

/// splitmix64 step; used to derive independent seeds for QMC replicas.
std::uint64_t splitmix64(std::uint64_t& state);

/// Standard normal quantile.
double normal_quantile(double p);

}  // namespace heatcurve
