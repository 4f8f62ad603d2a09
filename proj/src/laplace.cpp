#include "heatcurve/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "heatcurve/errors.hpp"
#include "heatcurve/heat_content.hpp"

namespace heatcurve {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTailExponent = 36.85;  // e^{-36.85} < 1e-16

// Smallest phase value outside the monotone neighbourhood of u_tau, scanned
// on a uniform parameter grid.
double far_phase_floor(const CurveSpec& curve, double u_tau, int scan = 4096) {
    const double dv = 2.0 * kPi / scan;
    std::vector<double> phi(static_cast<std::size_t>(scan + 1));
    for (int j = 0; j <= scan; ++j) phi[static_cast<std::size_t>(j)] = chord(curve, u_tau, j * dv).squaredNorm();
    int fwd = 0;
    while (fwd < scan && phi[static_cast<std::size_t>(fwd + 1)] > phi[static_cast<std::size_t>(fwd)]) ++fwd;
    int bwd = scan;
    while (bwd > fwd && phi[static_cast<std::size_t>(bwd - 1)] > phi[static_cast<std::size_t>(bwd)]) --bwd;
    double floor = std::min(phi[static_cast<std::size_t>(fwd)], phi[static_cast<std::size_t>(bwd)]);
    for (int j = fwd; j <= bwd; ++j) floor = std::min(floor, phi[static_cast<std::size_t>(j)]);
    return floor;
}

std::array<double, 3> series_integrals(const CurveSpec& curve, const ArcLengthTable& table, int grid) {
    const double l = table.total_length();
    std::vector<double> a0(static_cast<std::size_t>(grid)), a2(a0.size()), a4(a0.size());
    for (int j = 0; j < grid; ++j) {
        const LaplaceCoeffs c = laplace_coeffs(curve, table, l * j / grid);
        a0[static_cast<std::size_t>(j)] = c.a0;
        a2[static_cast<std::size_t>(j)] = c.a2;
        a4[static_cast<std::size_t>(j)] = c.a4;
    }
    const double h = l / grid;
    return {h * pairwise_sum(a0), h * pairwise_sum(a2), h * pairwise_sum(a4)};
}

}  // namespace

LaplaceCoeffs laplace_coeffs(const CurveSpec& curve, const ArcLengthTable& table, double tau) {
    const FrenetData f = frenet(curve, table, tau);
    const double k2 = f.curvature_jet[0];
    LaplaceCoeffs c;
    c.tau = tau;
    c.a2 = k2 / 8.0;
    // The curvature term is 35 k^4; a printed 35 k^2 would break the units of a4.
    c.a4 = (36.0 * f.curvature_jet[2] + 35.0 * k2 * k2 - 8.0 * f.third_deriv_sq) / 1152.0;
    return c;
}

QuadResult laplace_integral_numeric(const CurveSpec& curve, const ArcLengthTable& table, double tau, double lambda) {
    if (!(lambda > 0.0)) throw InvalidParameter("laplace_integral_numeric: lambda must be positive");
    const double u_tau = table.u_of_s(tau);
    auto integrand = [&](double v) {
        const double phi = chord(curve, u_tau, v).squaredNorm();
        return std::exp(-lambda * phi) * derivatives(curve, u_tau + v, 1)[1].norm();
    };
    QuadratureConfig cfg;
    cfg.abs_tol = 0.5e-13;
    cfg.rel_tol = 1e-14;
    // panels doubling away from the peak, so a first coarse panel cannot miss it
    const double width = 1.0 / (std::sqrt(lambda) * derivatives(curve, u_tau, 1)[1].norm());
    QuadResult out;
    for (const double dir : {-1.0, 1.0}) {
        double a = 0.0, b = std::min(kPi, width);
        while (true) {
            const QuadResult r = dir > 0 ? adaptive_1d(integrand, a, b, cfg) : adaptive_1d(integrand, -b, -a, cfg);
            out.value += r.value;
            out.error += r.error;
            if (b >= kPi) break;
            a = b;
            b = std::min(kPi, 2.0 * b);
        }
    }
    return out;
}

FittedCoeffs extract_coeffs_bruteforce(const CurveSpec& curve, const ArcLengthTable& table, double tau,
                                       std::span<const double> lambda_grid, bool include_odd) {
    const std::size_t min_points = include_odd ? 7 : 6;
    if (lambda_grid.size() < min_points) throw InvalidParameter("extract_coeffs_bruteforce: lambda grid too short");
    for (double l : lambda_grid) {
        if (!(l > 0.0)) throw InvalidParameter("extract_coeffs_bruteforce: lambda must be positive");
    }
    const double lambda_min = *std::min_element(lambda_grid.begin(), lambda_grid.end());
    const double floor = far_phase_floor(curve, table.u_of_s(tau));
    if (lambda_min * floor < kTailExponent) {
        std::ostringstream msg;
        msg << "extract_coeffs_bruteforce: tail not negligible (lambda_min * phi_far = " << lambda_min * floor << ")";
        throw InvalidParameter(msg.str());
    }

    std::vector<double> x, y;
    for (double l : lambda_grid) {
        x.push_back(1.0 / l);
        y.push_back(laplace_integral_numeric(curve, table, tau, l).value * std::sqrt(l / kPi));
    }
    const std::vector<double> exps = include_odd ? std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0}
                                                 : std::vector<double>{0.0, 1.0, 2.0};
    const PowerFit fit = powerbasis_fit(x, y, exps);

    // y = sum_i Gamma((i+1)/2) / Gamma(1/2) a_i lambda^{-i/2}
    const double sqrt_pi = std::sqrt(kPi);
    FittedCoeffs out;
    out.max_residual = fit.max_residual;
    out.condition_number = fit.condition_number;
    out.a0 = fit.coeffs[0];
    if (include_odd) {
        out.a1 = fit.coeffs[1] * sqrt_pi / std::tgamma(1.0);
        out.a2 = fit.coeffs[2] * sqrt_pi / std::tgamma(1.5);
        out.a3 = fit.coeffs[3] * sqrt_pi / std::tgamma(2.0);
        out.a4 = fit.coeffs[4] * sqrt_pi / std::tgamma(2.5);
    } else {
        out.a2 = fit.coeffs[1] * sqrt_pi / std::tgamma(1.5);
        out.a4 = fit.coeffs[2] * sqrt_pi / std::tgamma(2.5);
    }
    return out;
}

std::vector<double> default_lambda_grid(const CurveSpec& curve, int n) {
    const double k = max_curvature(curve);
    const double scale = std::max(1.0, k * k);
    return geometric_grid(200.0 * scale, 6400.0 * scale, n);
}

std::array<double, 3> closed_form_constants() {
    std::array<double, 3> c{};
    for (int i = 0; i < 3; ++i) c[static_cast<std::size_t>(i)] = std::pow(2.0, 2 * i - 1) * (2 * i + 1);
    return c;
}

Calibration calibrate_constants(double tolerance, double radius) {
    if (!(tolerance > 0.0)) throw InvalidParameter("calibrate_constants: tolerance must be positive");
    const CurveSpec circle = make_builtin(CurveFamily::circle, std::vector<double>{radius});
    const ArcLengthTable table = arclength_reparam(circle, 256);
    const double l = table.total_length();
    const auto integrals = series_integrals(circle, table, 512);

    const std::vector<double> t = geometric_grid(1e-4, 1e-2, 40);
    std::vector<double> y;
    for (double ti : t) y.push_back(circle_closed_form(radius, ti) * 4.0 * kPi * ti * l * l);
    // t^3..t^6 absorb the next terms of the series; they are not reported.
    // Stopping at t^4 leaves a 2e-4 bias in C_2 from the t^5 tail.
    const std::vector<double> exps = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    const PowerFit fit = powerbasis_fit(t, y, exps);

    Calibration cal;
    cal.max_residual = fit.max_residual / l;
    if (cal.max_residual > tolerance) {
        throw CalibrationFailure("calibrate_constants: fit residual " + std::to_string(cal.max_residual) +
                                 " above tolerance");
    }
    for (std::size_t i = 0; i < 3; ++i) {
        const double raw = fit.coeffs[i] / integrals[i];
        cal.raw[i] = raw;
        bool snapped = false;
        for (int q = 1; q <= 12 && !snapped; ++q) {
            const double p = std::round(raw * q);
            if (std::abs(raw - p / q) <= tolerance * std::max(1.0, std::abs(raw))) {
                cal.constants[i] = p / q;
                snapped = true;
            }
        }
        if (!snapped) {
            std::ostringstream msg;
            msg << "calibrate_constants: C_" << i << " = " << raw << " is not a simple rational";
            throw CalibrationFailure(msg.str());
        }
    }
    return cal;
}

const Calibration& frozen_calibration() {
    static const Calibration cal = calibrate_constants();
    return cal;
}

double HeatSeries::evaluate(double t) const {
    double sum = 0.0, power = 1.0;
    for (int i = 0; i <= order; ++i) {
        sum += alphas[static_cast<std::size_t>(i)] * power;
        power *= t;
    }
    return sum / (length * length * 4.0 * kPi * t);
}

HeatSeries heat_series(const CurveSpec& curve, const ArcLengthTable& table, int order, int grid) {
    if (order < 0 || order > 2) throw InvalidParameter("heat_series: order must be 0, 1 or 2");
    if (grid < 16) throw InvalidParameter("heat_series: grid too coarse");
    HeatSeries hs;
    hs.length = table.total_length();
    hs.order = order;
    hs.integrals = series_integrals(curve, table, grid);
    hs.constants = frozen_calibration().constants;
    hs.closed_form_constants = closed_form_constants();
    for (std::size_t i = 0; i < 3; ++i) {
        hs.alphas[i] = static_cast<int>(i) <= order ? hs.constants[i] * hs.integrals[i] : 0.0;
    }
    return hs;
}

}  // namespace heatcurve
