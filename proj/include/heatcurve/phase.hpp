#pragma once

#include <array>

#include "heatcurve/curve.hpp"

namespace heatcurve {

/// Derivatives d[j] = phi_tau^(j)(tau), j = 0..6, of the squared-distance
/// phase phi_tau(s) = |gamma(s) - gamma(tau)|^2 in arc length.
struct PhaseJet {
    double tau = 0.0;
    std::array<double, 7> d{};
    std::array<double, 7> error{};  // zero for the analytic jet
};

double phase(const CurveSpec& curve, const ArcLengthTable& table, double s, double tau);

/// phi_tau(tau + sigma) with full relative precision for small sigma.
double phase_offset(const CurveSpec& curve, const ArcLengthTable& table, double tau, double sigma);

PhaseJet phase_jet_analytic(const CurveSpec& curve, const ArcLengthTable& table, double tau);

/// Central finite differences (accuracy 8 for d[2], 6 for d[3], d[4], 4 for
/// d[5], d[6]) with one Richardson step over {h, h/2}. Steps for orders >= 3
/// are raised to a fixed fraction of the curvature radius so that rounding
/// does not swamp the stencil.
PhaseJet phase_jet_numeric(const CurveSpec& curve, const ArcLengthTable& table, double tau, double h = 1e-3);

/// Largest grid-certified margin such that phi_tau' > 0 on (tau, tau + m] and
/// phi_tau' < 0 on [tau - m, tau) for every tau of the grid. Throws NotSimple.
double separation_margin(const CurveSpec& curve, const ArcLengthTable& table, int tau_grid = 512,
                         int scan_grid = 4096);

}  // namespace heatcurve
