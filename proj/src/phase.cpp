#include "heatcurve/phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "heatcurve/errors.hpp"
#include "heatcurve/numerics.hpp"

namespace heatcurve {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kHalfWidth = 4;  // nine-point stencils throughout

// Fornberg's algorithm: weights of the derivative `order` at 0 on integer nodes -N..N.
std::vector<double> central_weights(int order, int half_width) {
    const int n = 2 * half_width + 1;
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = i - half_width;
    std::vector<std::vector<double>> c(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(order + 1), 0.0));
    auto at = [&](int i, int k) -> double& { return c[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]; };
    double c1 = 1.0;
    double c4 = x[0];
    at(0, 0) = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[static_cast<std::size_t>(i)];
        for (int j = 0; j < i; ++j) {
            const double c3 = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) at(i, k) = c1 * (k * at(i - 1, k - 1) - c5 * at(i - 1, k)) / c2;
                at(i, 0) = -c1 * c5 * at(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k) at(j, k) = (c4 * at(j, k) - k * at(j, k - 1)) / c3;
            at(j, 0) = c4 * at(j, 0) / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = at(i, order);
    return w;
}

// Accuracy order of the nine-point central stencil for each derivative.
constexpr std::array<int, 7> kAccuracy = {0, 8, 8, 6, 6, 4, 4};

// Step floors as fractions of the smallest curvature radius.
constexpr std::array<double, 7> kStepFloor = {0.0, 0.0, 0.0, 2e-2, 2e-2, 8e-2, 8e-2};

}  // namespace

double phase_offset(const CurveSpec& curve, const ArcLengthTable& table, double tau, double sigma) {
    const double u_tau = table.u_of_s(tau);
    const double du = table.u_offset(u_tau, sigma);
    return chord(curve, u_tau, du).squaredNorm();
}

double phase(const CurveSpec& curve, const ArcLengthTable& table, double s, double tau) {
    return phase_offset(curve, table, tau, s - tau);
}

PhaseJet phase_jet_analytic(const CurveSpec& curve, const ArcLengthTable& table, double tau) {
    const FrenetData f = frenet(curve, table, tau);
    PhaseJet jet;
    jet.tau = tau;
    jet.d[2] = 2.0;
    jet.d[4] = -2.0 * f.curvature_jet[0];
    jet.d[5] = -5.0 * f.curvature_jet[1];
    jet.d[6] = -9.0 * f.curvature_jet[2] + 2.0 * f.third_deriv_sq;
    return jet;
}

PhaseJet phase_jet_numeric(const CurveSpec& curve, const ArcLengthTable& table, double tau, double h) {
    if (!(h >= 1e-4 && h <= 1e-2)) throw InvalidParameter("phase_jet_numeric: h must lie in [1e-4, 1e-2]");
    const double kmax = max_curvature(curve);
    const double u_tau = table.u_of_s(tau);

    auto sample = [&](double step) {
        std::array<double, 2 * kHalfWidth + 1> v{};
        for (int i = -kHalfWidth; i <= kHalfWidth; ++i) {
            v[static_cast<std::size_t>(i + kHalfWidth)] =
                i == 0 ? 0.0 : chord(curve, u_tau, table.u_offset(u_tau, i * step)).squaredNorm();
        }
        return v;
    };
    auto apply = [](const std::vector<double>& w, const auto& v, double step, int order) {
        std::vector<double> terms(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) terms[i] = w[i] * v[i];
        return pairwise_sum(terms) / std::pow(step, order);
    };

    PhaseJet jet;
    jet.tau = tau;
    for (int m = 1; m <= 6; ++m) {
        const double step = std::max(h, kStepFloor[static_cast<std::size_t>(m)] / kmax);
        const auto w = central_weights(m, kHalfWidth);
        const std::vector<double> steps = {step, 0.5 * step};
        const std::vector<double> values = {apply(w, sample(step), step, m), apply(w, sample(0.5 * step), 0.5 * step, m)};
        const Extrapolation e = richardson(values, steps, kAccuracy[static_cast<std::size_t>(m)]);
        jet.d[static_cast<std::size_t>(m)] = e.limit;
        jet.error[static_cast<std::size_t>(m)] = e.error;
    }
    return jet;
}

double separation_margin(const CurveSpec& curve, const ArcLengthTable& table, int tau_grid, int scan_grid) {
    if (tau_grid < 8 || scan_grid < 64) throw InvalidParameter("separation_margin: grids too coarse");
    check_embedded(curve, table);
    const double du = kTwoPi / scan_grid;
    std::vector<double> margins(static_cast<std::size_t>(tau_grid));

    parallel_for(static_cast<std::size_t>(tau_grid), [&](std::size_t i) {
        const double u_tau = kTwoPi * static_cast<double>(i) / tau_grid;
        const double s_tau = table.s_of_u(u_tau);
        double best = std::numeric_limits<double>::infinity();
        for (const int dir : {1, -1}) {
            int last = 0;
            for (int j = 1; j < scan_grid; ++j) {
                const double offset = dir * j * du;
                const Vec3 diff = chord(curve, u_tau, offset);
                const Vec3 tangent = derivatives(curve, u_tau + offset, 1)[1];
                if (!(dir * diff.dot(tangent) > 0.0)) break;
                last = j;
            }
            best = std::min(best, std::abs(table.s_of_u(u_tau + dir * last * du) - s_tau));
        }
        margins[i] = best;
    });

    const double margin = *std::min_element(margins.begin(), margins.end());
    if (!(margin > 0.0)) throw NotSimple("separation_margin: no positive monotonicity margin");
    return margin;
}

}  // namespace heatcurve
