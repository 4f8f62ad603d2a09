#pragma once

#include <array>
#include <span>
#include <vector>

#include "heatcurve/curve.hpp"
#include "heatcurve/numerics.hpp"

namespace heatcurve {

/// Coefficients of I_tau(lambda) ~ sum_i Gamma((i+1)/2) a_i lambda^{-(i+1)/2}.
struct LaplaceCoeffs {
    double tau = 0.0;
    double a0 = 1.0;
    double a2 = 0.0;  // 1/length^2
    double a4 = 0.0;  // 1/length^4
};

LaplaceCoeffs laplace_coeffs(const CurveSpec& curve, const ArcLengthTable& table, double tau);

/// I_tau(lambda) = int_0^l exp(-lambda phi_tau(s)) ds by adaptive quadrature
/// (absolute tolerance 1e-13). Throws ToleranceNotMet on stalled refinement.
QuadResult laplace_integral_numeric(const CurveSpec& curve, const ArcLengthTable& table, double tau, double lambda);

struct FittedCoeffs {
    double a0 = 0.0;
    double a1 = 0.0;  // zero unless odd terms were fitted
    double a2 = 0.0;
    double a3 = 0.0;
    double a4 = 0.0;
    double max_residual = 0.0;
    double condition_number = 0.0;
};

/// Least-squares fit of I_tau(lambda) sqrt(lambda / pi) in powers of
/// lambda^{-1/2}, converted to the a_i convention. With include_odd the
/// lambda^{-1/2} and lambda^{-3/2} terms are fitted too (needs >= 7 points).
/// Throws InvalidParameter if the off-peak tail is not negligible at min(lambda).
FittedCoeffs extract_coeffs_bruteforce(const CurveSpec& curve, const ArcLengthTable& table, double tau,
                                       std::span<const double> lambda_grid, bool include_odd = false);

/// Geometric grid 200..6400 (n points) scaled by max(1, k_max^2), so the fit
/// stays in the asymptotic regime for strongly curved arcs.
std::vector<double> default_lambda_grid(const CurveSpec& curve, int n = 6);

/// 2^{2i-1}(2i+1), the constants printed with the series; kept for reporting.
std::array<double, 3> closed_form_constants();

struct Calibration {
    std::array<double, 3> constants{};  // snapped to simple rationals
    std::array<double, 3> raw{};        // as fitted
    double max_residual = 0.0;
};

/// Fits the circle closed form of radius R on t in [1e-4, 1e-2] and solves
/// for C_i. Throws CalibrationFailure if a constant is not within
/// `tolerance` of a rational with denominator <= 12 or the fit residual
/// exceeds tolerance.
Calibration calibrate_constants(double tolerance = 1e-4, double radius = 1.0);

/// Calibration at R = 1, computed once and immutable afterwards.
const Calibration& frozen_calibration();

struct HeatSeries {
    double length = 0.0;
    int order = 2;
    std::array<double, 3> integrals{};  // int_0^l a_{2i}(tau) dtau
    std::array<double, 3> alphas{};
    std::array<double, 3> constants{};
    std::array<double, 3> closed_form_constants{};

    /// (1/l^2)(1/(4 pi t)) sum_{i <= order} alpha_i t^i
    double evaluate(double t) const;
};

/// alpha_i = C_i int a_{2i}, tau-integration by the trapezoid rule on
/// `grid` uniform arc-length points.
HeatSeries heat_series(const CurveSpec& curve, const ArcLengthTable& table, int order = 2, int grid = 512);

}  // namespace heatcurve
