#pragma once

#include <span>
#include <vector>

#include "heatcurve/curve.hpp"
#include "heatcurve/numerics.hpp"

namespace heatcurve {

struct EvalGrid {
    std::vector<double> t_values;  // positive, strictly monotone
    QuadratureConfig quad;

    static EvalGrid geometric(double tmin, double tmax, int n, QuadratureConfig quad = {});
    void validate() const;
};

/// Certified data for bounding the off-diagonal part of the heat integral.
struct OffDiagonalBounds {
    double margin = 0.0;        // phi_tau is monotone for arc separations up to margin
    double far_distance = 0.0;  // lower bound of |gamma(s) - gamma(tau)| for separations >= margin
    double max_speed = 0.0;     // upper bound of |gamma'(u)|
};

OffDiagonalBounds off_diagonal_bounds(const CurveSpec& curve, const ArcLengthTable& table);

/// H_S(t) = (1/l^2)(4 pi t)^{-3/2} int int exp(-|gamma(s) - gamma(tau)|^2 / 4t) ds dtau.
/// Outer periodic trapezoid in tau, inner adaptive Gauss-Kronrod near the
/// diagonal, bounded or integrated tail. Returns an absolute error estimate.
QuadResult heat_content_direct(const CurveSpec& curve, const ArcLengthTable& table, double t,
                               const QuadratureConfig& quad = {});

QuadResult heat_content_direct(const CurveSpec& curve, const ArcLengthTable& table, double t,
                               const QuadratureConfig& quad, const OffDiagonalBounds& bounds);

/// Same integral restricted to s > tau and doubled; used to test symmetry.
QuadResult heat_content_direct_half(const CurveSpec& curve, const ArcLengthTable& table, double t,
                                    const QuadratureConfig& quad = {});

/// (4 pi t)^{-3/2} e^{-x} I_0(x), x = R^2 / 2t.
double circle_closed_form(double radius, double t);

struct ExpansionFit {
    double alpha0 = 0.0, alpha1 = 0.0, alpha2 = 0.0;
    double max_residual = 0.0;
    double condition_number = 0.0;
    std::vector<double> h_values;
    std::vector<double> h_errors;
};

/// Least squares of H_direct(t) 4 pi t l^2 against alpha0 + alpha1 t + alpha2 t^2.
ExpansionFit fit_expansion(const CurveSpec& curve, const ArcLengthTable& table, const EvalGrid& grid);

}  // namespace heatcurve
