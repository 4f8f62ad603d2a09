#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "heatcurve/errors.hpp"

namespace heatcurve {

struct QuadratureConfig {
    double abs_tol = 1e-13;
    double rel_tol = 1e-12;
    int max_depth = 50;
    int panel_order = 15;  // Gauss-Kronrod 7/15 is the only rule provided

    void validate() const;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

/// Fixed-order pairwise summation. Result depends only on the order of `xs`.
double pairwise_sum(std::span<const double> xs);

namespace detail {

// Kronrod abscissae on [-1, 1], nonnegative half, descending. Odd indices are
// the Gauss 7-point nodes.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    int depth;
};

template <class F>
Panel gk15(F& f, double a, double b, int depth) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        kron += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    return Panel{a, b, kron * h, std::abs((kron - gauss) * h), depth};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod 7/15 quadrature of f over [a, b].
/// The panel with the largest |G7 - K15| is bisected until the summed
/// estimate meets max(abs_tol, rel_tol*|I|). Throws ToleranceNotMet with the
/// best value when every remaining panel has hit max_depth.
template <class F>
QuadResult adaptive_1d(F&& f, double a, double b, const QuadratureConfig& cfg = {}) {
    cfg.validate();
    if (a == b) return {};
    if (!(a < b)) throw InvalidParameter("adaptive_1d: requires a < b");

    using detail::Panel;
    auto worse = [](const Panel& x, const Panel& y) { return x.error < y.error; };
    std::priority_queue<Panel, std::vector<Panel>, decltype(worse)> open(worse);
    std::vector<Panel> closed;

    Panel first = detail::gk15(f, a, b, 0);
    double total = first.value;
    double total_err = first.error;
    open.push(first);

    constexpr std::size_t kMaxPanels = 1u << 15;
    bool stalled = false;
    while (!open.empty()) {
        const double target = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total));
        if (total_err <= target) break;
        Panel worst = open.top();
        open.pop();
        if (worst.depth >= cfg.max_depth || open.size() + closed.size() > kMaxPanels) {
            closed.push_back(worst);
            stalled = true;
            continue;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = detail::gk15(f, worst.a, mid, worst.depth + 1);
        Panel right = detail::gk15(f, mid, worst.b, worst.depth + 1);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        open.push(left);
        open.push(right);
    }
    while (!open.empty()) {
        closed.push_back(open.top());
        open.pop();
    }
    std::sort(closed.begin(), closed.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    std::vector<double> vals, errs;
    vals.reserve(closed.size());
    errs.reserve(closed.size());
    for (const auto& p : closed) {
        vals.push_back(p.value);
        errs.push_back(p.error);
    }
    QuadResult out{pairwise_sum(vals), pairwise_sum(errs)};
    const double target = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(out.value));
    if (stalled && out.error > target) {
        throw ToleranceNotMet("adaptive_1d: refinement stalled", out.value, out.error);
    }
    return out;
}

/// h * sum f(a + i h), i = 0..n-1, h = period/n. Spectrally accurate for
/// smooth periodic integrands.
template <class F>
double periodic_trapezoid(F&& f, double a, double period, int n) {
    std::vector<double> vals(static_cast<std::size_t>(n));
    const double h = period / n;
    for (int i = 0; i < n; ++i) vals[static_cast<std::size_t>(i)] = f(a + h * i);
    return h * pairwise_sum(vals);
}

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule. Cached; the reference stays valid for the
/// lifetime of the program.
const GaussRule& gauss_legendre(int n);

/// e^{-x} I0(x) for x >= 0.
double bessel_i0_scaled(double x);

/// e^{-x} I1(x) for x >= 0. Needed by the tube kernel's angular reduction.
double bessel_i1_scaled(double x);

struct Extrapolation {
    double limit = 0.0;
    double error = std::numeric_limits<double>::infinity();
};

/// Richardson (Neville) table assuming an error expansion in powers of step^order.
Extrapolation richardson(std::span<const double> values, std::span<const double> steps, int order);

struct PowerFit {
    std::vector<double> coeffs;
    double max_residual = 0.0;
    double condition_number = 0.0;
};

/// Least squares y ~ sum_j c_j t^{e_j}. Columns are scaled to unit norm and
/// solved by Householder QR; the reported condition number is that of the
/// scaled design matrix.
PowerFit powerbasis_fit(std::span<const double> t, std::span<const double> y,
                        std::span<const double> exponents, double max_condition = 1e12);

/// n points from lo to hi, log-uniform, endpoints included.
std::vector<double> geometric_grid(double lo, double hi, int n);

/// Runs body(i) for i in [0, n) across hardware threads. Each index must be
/// independent; callers reduce afterwards in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace heatcurve
