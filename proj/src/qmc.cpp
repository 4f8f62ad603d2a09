#include "heatcurve/qmc.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <bit>
#include <cmath>
#include <numbers>

#include "heatcurve/errors.hpp"

namespace heatcurve {

namespace {

struct Primitive {
    int degree;
    std::uint32_t coeffs;  // interior polynomial coefficients a
    std::array<std::uint32_t, 5> m;
};

// Dimensions 2..8 of new-joe-kuo-6.21201; dimension 1 is van der Corput.
constexpr std::array<Primitive, 7> kPrimitives = {{
    {1, 0, {1, 0, 0, 0, 0}},
    {2, 1, {1, 3, 0, 0, 0}},
    {3, 1, {1, 3, 1, 0, 0}},
    {3, 2, {1, 1, 1, 0, 0}},
    {4, 1, {1, 1, 3, 3, 0}},
    {4, 4, {1, 3, 5, 13, 0}},
    {5, 2, {1, 1, 5, 5, 17}},
}};

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

SobolSequence::SobolSequence(int dims, std::uint64_t seed) : dims_(dims) {
    if (dims < 1 || dims > kMaxDims) throw InvalidParameter("SobolSequence: unsupported dimension count");
    directions_.resize(static_cast<std::size_t>(dims));
    for (int b = 0; b < kBits; ++b) directions_[0][static_cast<std::size_t>(b)] = 1u << (kBits - 1 - b);
    for (int d = 1; d < dims; ++d) {
        const auto& prim = kPrimitives[static_cast<std::size_t>(d - 1)];
        auto& v = directions_[static_cast<std::size_t>(d)];
        const int s = prim.degree;
        for (int i = 0; i < s; ++i) v[static_cast<std::size_t>(i)] = prim.m[static_cast<std::size_t>(i)] << (kBits - 1 - i);
        for (int i = s; i < kBits; ++i) {
            std::uint32_t value = v[static_cast<std::size_t>(i - s)] ^ (v[static_cast<std::size_t>(i - s)] >> s);
            for (int k = 1; k < s; ++k) {
                if ((prim.coeffs >> (s - 1 - k)) & 1u) value ^= v[static_cast<std::size_t>(i - k)];
            }
            v[static_cast<std::size_t>(i)] = value;
        }
    }
    std::uint64_t sm = seed;
    shift_.resize(static_cast<std::size_t>(dims));
    for (auto& sh : shift_) sh = static_cast<std::uint32_t>(splitmix64(sm) >> 32);
    state_.assign(static_cast<std::size_t>(dims), 0u);
}

void SobolSequence::reset() noexcept {
    index_ = 0;
    std::fill(state_.begin(), state_.end(), 0u);
}

void SobolSequence::next(std::span<double> out) {
    // Gray-code order: point i differs from i-1 in the direction of the
    // lowest zero bit of i-1. Point 0 is the origin (before shifting).
    if (index_ > 0) {
        const int c = std::countr_one(index_ - 1);
        if (c >= kBits) throw InvalidParameter("SobolSequence: sequence exhausted");
        for (int d = 0; d < dims_; ++d) state_[static_cast<std::size_t>(d)] ^= directions_[static_cast<std::size_t>(d)][static_cast<std::size_t>(c)];
    }
    ++index_;
    constexpr double kScale = 1.0 / 4294967296.0;
    for (int d = 0; d < dims_; ++d) {
        const std::uint32_t x = state_[static_cast<std::size_t>(d)] ^ shift_[static_cast<std::size_t>(d)];
        // centre of the dyadic cell keeps points strictly inside (0, 1)
        out[static_cast<std::size_t>(d)] = (static_cast<double>(x) + 0.5) * kScale;
    }
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("normal_quantile: p must lie in (0, 1)");
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace heatcurve
