#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heatcurve/curve.hpp"
#include "heatcurve/numerics.hpp"

namespace heatcurve {

enum class TubeBackend { automatic, product, qmc };

std::string to_string(TubeBackend backend);
TubeBackend parse_backend(std::string_view name);

/// Radius and integration settings of the tube S_eps = {gamma(s) + r(cos th N + sin th B), r < eps}.
struct TubeSpec {
    double eps = 0.1;
    // product quadrature: outer s (trapezoid), theta (trapezoid), r (Gauss-Legendre);
    // inner s' and r' windows use n_inner Gauss-Legendre nodes each
    int n_s = 32;
    int n_theta = 16;
    int n_r = 24;
    int n_inner = 40;
    // quasi-Monte Carlo: total samples split over `replicas` digital shifts
    std::int64_t samples = 1 << 16;
    int replicas = 8;
    std::uint64_t seed = 1;
    TubeBackend backend = TubeBackend::automatic;
    double rel_tol = 1e-3;  // achieved error above rel_tol * value raises ToleranceNotMet

    void validate() const;
};

struct TubeSeries {
    double eps = 0.0;
    double length = 0.0;
    double vol = 0.0;  // alpha0_eps = |S_eps|
    double surf = 0.0;
    double alpha1_eps = 0.0;
    double alpha3_eps = 0.0;

    /// (1/vol^2)(alpha0 + alpha1 t^{1/2} + alpha3 t^{3/2})
    double evaluate(double t) const;
};

Vec3 tube_point(const CurveSpec& curve, const ArcLengthTable& table, double s, double r, double theta);

/// Largest admissible radius: min(eps_0, 0.99 / k_max).
double max_tube_radius(const CurveSpec& curve, const ArcLengthTable& table);

struct TubeMeasures {
    double vol = 0.0;             // pi eps^2 l
    double surf = 0.0;            // 2 pi eps l
    double vol_quadrature = 0.0;  // product quadrature of r(1 - r k cos th)
    double surf_quadrature = 0.0;
};

/// Throws TubeTooWide unless eps < max_tube_radius.
TubeMeasures tube_measures(const CurveSpec& curve, const ArcLengthTable& table, double eps);

/// (1/|S_eps|) int_{S_eps} h dx by product quadrature; error from a coarser rule.
QuadResult induced_measure_pairing(const CurveSpec& curve, const ArcLengthTable& table, double eps,
                                   const std::function<double(const Vec3&)>& h);

/// Quadrature volume of S_eps divided by eps^2, for each eps.
std::vector<double> measure_ratio_limit(const CurveSpec& curve, const ArcLengthTable& table,
                                        std::span<const double> eps_list);

/// alpha1 = -2 eps l sqrt(pi); alpha3 by quadrature of
/// -(eps / 12 sqrt(pi)) int int (-3/eps^2 + A1/eps + A0)(1 - eps k cos th) ds dth with
/// A1 = 2 k c / (1 - eps k c), A0 = -3 k^2 c^2 / (1 - eps k c)^2, c = cos th.
/// zero_curvature replaces k by 0 in the integrand (straight-tube check).
TubeSeries tube_alpha_coeffs(const CurveSpec& curve, const ArcLengthTable& table, double eps,
                             bool zero_curvature = false);

struct TubeResult {
    double value = 0.0;  // H^eps(t)
    double error = 0.0;  // absolute; standard error for qmc
    TubeBackend backend = TubeBackend::product;
};

/// H^eps(t) = (1/|S_eps|^2) int_{S_eps} int_{S_eps} p_t(x, y) dx dy.
TubeResult tube_heat_content(const CurveSpec& curve, const ArcLengthTable& table, double t, const TubeSpec& spec);

struct TubeExpansionFit {
    double beta0 = 0.0, beta1 = 0.0, beta3 = 0.0;
    double max_residual = 0.0;
    double condition_number = 0.0;
    std::vector<double> h_values;
    std::vector<double> h_errors;
};

/// Fits |S_eps|^2 H^eps(t) in {1, t^{1/2}, t^{3/2}}. Every t must satisfy sqrt(t) <= eps / 10.
TubeExpansionFit tube_expansion_check(const CurveSpec& curve, const ArcLengthTable& table,
                                      std::span<const double> t_grid, const TubeSpec& spec);

/// Euclidean distance from y to the curve; u_hint seeds the local search.
double distance_to_curve(const CurveSpec& curve, const Vec3& y, double u_hint);

}  // namespace heatcurve
