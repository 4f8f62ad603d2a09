#pragma once

// Truncated Taylor series arithmetic. c[j] holds f^(j)(x0) / j!.

#include <array>
#include <cmath>

namespace heatcurve::detail {

inline constexpr int kJetOrder = 8;

struct Taylor {
    std::array<double, kJetOrder + 1> c{};

    double& operator[](int j) { return c[static_cast<std::size_t>(j)]; }
    double operator[](int j) const { return c[static_cast<std::size_t>(j)]; }
};

inline Taylor operator+(const Taylor& a, const Taylor& b) {
    Taylor r;
    for (int j = 0; j <= kJetOrder; ++j) r[j] = a[j] + b[j];
    return r;
}

inline Taylor operator*(const Taylor& a, const Taylor& b) {
    Taylor r;
    for (int n = 0; n <= kJetOrder; ++n) {
        double s = 0.0;
        for (int k = 0; k <= n; ++k) s += a[k] * b[n - k];
        r[n] = s;
    }
    return r;
}

inline Taylor sqrt(const Taylor& a) {
    Taylor r;
    r[0] = std::sqrt(a[0]);
    for (int n = 1; n <= kJetOrder; ++n) {
        double s = a[n];
        for (int k = 1; k < n; ++k) s -= r[k] * r[n - k];
        r[n] = s / (2.0 * r[0]);
    }
    return r;
}

/// Derivative series: (f')[j] = (j+1) f[j+1]. The top coefficient is lost.
inline Taylor derivative(const Taylor& a) {
    Taylor r;
    for (int j = 0; j < kJetOrder; ++j) r[j] = (j + 1) * a[j + 1];
    return r;
}

/// Antiderivative vanishing at the expansion point.
inline Taylor integral(const Taylor& a) {
    Taylor r;
    for (int j = 1; j <= kJetOrder; ++j) r[j] = a[j - 1] / j;
    return r;
}

/// f(g(h)) for g with g[0] = 0.
inline Taylor compose(const Taylor& f, const Taylor& g) {
    Taylor r;
    r[0] = f[0];
    Taylor power = g;
    for (int j = 1; j <= kJetOrder; ++j) {
        for (int n = 0; n <= kJetOrder; ++n) r[n] += f[j] * power[n];
        power = power * g;
    }
    return r;
}

/// Series inverse h of g (g[0] = 0, g[1] != 0): g(h(x)) = x.
inline Taylor revert(const Taylor& g) {
    Taylor h;
    h[1] = 1.0 / g[1];
    for (int n = 2; n <= kJetOrder; ++n) {
        const Taylor partial = compose(g, h);
        h[n] = -partial[n] / g[1];
    }
    return h;
}

}  // namespace heatcurve::detail
