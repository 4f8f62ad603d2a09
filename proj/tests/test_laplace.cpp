#include "doctest.h"

#include <cmath>
#include <numbers>

#include "heatcurve/curve.hpp"
#include "heatcurve/errors.hpp"
#include "heatcurve/heat_content.hpp"
#include "heatcurve/laplace.hpp"
#include "heatcurve/numerics.hpp"

using namespace heatcurve;
using std::numbers::pi;

namespace {

struct Fixture {
    CurveSpec curve;
    ArcLengthTable table;
};

Fixture fixture(CurveFamily family, std::vector<double> params) {
    auto c = make_builtin(family, params);
    auto t = arclength_reparam(c, 1024);
    return {std::move(c), std::move(t)};
}

}  // namespace

TEST_CASE("laplace coefficients of circles") {
    const auto f1 = fixture(CurveFamily::circle, {1.0});
    for (double tau : {0.0, 1.0, 3.3}) {
        const auto c = laplace_coeffs(f1.curve, f1.table, tau);
        CHECK(c.a0 == 1.0);
        CHECK(std::abs(c.a2 - 0.125) < 1e-13);
        CHECK(std::abs(c.a4 - 3.0 / 128.0) < 1e-13);
    }
    const auto f2 = fixture(CurveFamily::circle, {2.0});
    const auto c = laplace_coeffs(f2.curve, f2.table, 2.0);
    CHECK(std::abs(c.a2 - 1.0 / 32.0) < 1e-14);
    CHECK(std::abs(c.a4 - 3.0 / 2048.0) < 1e-14);
}

TEST_CASE("a2 is nonnegative on every builtin curve") {
    for (auto [fam, p] : {std::pair{CurveFamily::ellipse, std::vector<double>{2.0, 1.0}},
                          std::pair{CurveFamily::trefoil, std::vector<double>{2.0, 1.0}}}) {
        const auto f = fixture(fam, p);
        for (int i = 0; i < 32; ++i) CHECK(laplace_coeffs(f.curve, f.table, f.table.total_length() * i / 32).a2 >= 0.0);
    }
}

TEST_CASE("laplace integral of the unit circle matches the Bessel closed form") {
    const auto f = fixture(CurveFamily::circle, {1.0});
    for (double lambda : {0.5, 10.0, 300.0}) {
        const auto r = laplace_integral_numeric(f.curve, f.table, 0.7, lambda);
        const double exact = 2 * pi * bessel_i0_scaled(2 * lambda);
        CHECK(std::abs(r.value - exact) < 2e-13);
        CHECK(r.value <= f.table.total_length());
        CHECK(r.value > 0.0);
    }
    CHECK_THROWS_AS(laplace_integral_numeric(f.curve, f.table, 0.0, 0.0), InvalidParameter);
}

TEST_CASE("laplace integral tends to the length as lambda vanishes") {
    const auto f = fixture(CurveFamily::trefoil, {2.0, 1.0});
    const auto r = laplace_integral_numeric(f.curve, f.table, 1.0, 1e-12);
    CHECK(std::abs(r.value / f.table.total_length() - 1.0) < 1e-9);
}

TEST_CASE("ellipse laplace integral follows the two-term expansion") {
    const auto f = fixture(CurveFamily::ellipse, {2.0, 1.0});
    const double lambda = 50.0;
    const auto c = laplace_coeffs(f.curve, f.table, 0.0);
    const double two_term = std::sqrt(pi / lambda) * (c.a0 + std::tgamma(1.5) / std::tgamma(0.5) * c.a2 / lambda);
    const auto r = laplace_integral_numeric(f.curve, f.table, 0.0, lambda);
    CHECK(std::abs(r.value / two_term - 1.0) < 0.01);
}

TEST_CASE("brute-force extraction on the unit circle") {
    const auto f = fixture(CurveFamily::circle, {1.0});
    const std::vector<double> grid = {50, 100, 200, 400, 800, 1600};
    const auto fit = extract_coeffs_bruteforce(f.curve, f.table, 0.0, grid);
    CHECK(std::abs(fit.a0 - 1.0) < 1e-6);
    CHECK(std::abs(fit.a2 - 0.125) < 1e-3);
    CHECK(std::abs(fit.a4 - 3.0 / 128.0) < 5e-3);
    const std::vector<double> short_grid = {50, 100, 200};
    CHECK_THROWS_AS(extract_coeffs_bruteforce(f.curve, f.table, 0.0, short_grid), InvalidParameter);
    const std::vector<double> low = {1, 2, 4, 8, 16, 32};
    CHECK_THROWS_AS(extract_coeffs_bruteforce(f.curve, f.table, 0.0, low), InvalidParameter);
}

TEST_CASE("brute-force extraction on the ellipse at u = 0") {
    const auto f = fixture(CurveFamily::ellipse, {2.0, 1.0});
    const std::vector<double> grid = {50, 100, 200, 400, 800, 1600};
    const auto fit = extract_coeffs_bruteforce(f.curve, f.table, 0.0, grid);
    CHECK(std::abs(fit.a2 - 0.5) < 1e-2);
}

TEST_CASE("brute-force coefficients match analytic ones on all builtin curves") {
    for (auto [fam, p] : {std::pair{CurveFamily::circle, std::vector<double>{1.0}},
                          std::pair{CurveFamily::ellipse, std::vector<double>{2.0, 1.0}},
                          std::pair{CurveFamily::trefoil, std::vector<double>{2.0, 1.0}}}) {
        const auto f = fixture(fam, p);
        const auto grid = default_lambda_grid(f.curve);
        const double kmax = max_curvature(f.curve);
        for (int i = 0; i < 16; ++i) {
            const double tau = f.table.total_length() * (i + 0.25) / 16;
            const auto a = laplace_coeffs(f.curve, f.table, tau);
            const auto b = extract_coeffs_bruteforce(f.curve, f.table, tau, grid);
            // relative to the curvature scale of each coefficient
            CHECK(std::abs(b.a2 - a.a2) <= 0.01 * std::max(a.a2, kmax * kmax / 8));
            CHECK(std::abs(b.a4 - a.a4) <= 0.05 * std::max(std::abs(a.a4), std::pow(kmax, 4) * 3 / 128));
        }
    }
}

TEST_CASE("odd coefficients vanish") {
    for (auto [fam, p] : {std::pair{CurveFamily::circle, std::vector<double>{1.0}},
                          std::pair{CurveFamily::trefoil, std::vector<double>{2.0, 1.0}}}) {
        const auto f = fixture(fam, p);
        const auto grid = default_lambda_grid(f.curve, 8);
        const double kmax = max_curvature(f.curve);
        for (double tau : {0.0, 2.0}) {
            const auto b = extract_coeffs_bruteforce(f.curve, f.table, tau, grid, true);
            CHECK(std::abs(b.a1) < 1e-3 * std::abs(b.a0) * kmax);
            CHECK(std::abs(b.a3) < 1e-3 * std::abs(b.a0) * std::pow(kmax, 3));
        }
    }
}

TEST_CASE("calibrated assembly constants") {
    const auto cal = calibrate_constants();
    CHECK(std::abs(cal.raw[0] - 1.0) < 1e-6);
    CHECK(std::abs(cal.raw[1] - 2.0) < 1e-4);
    CHECK(std::abs(cal.raw[2] - 12.0) < 1e-4);
    CHECK(cal.constants == std::array<double, 3>{1.0, 2.0, 12.0});

    const auto cal2 = calibrate_constants(1e-4, 2.0);
    CHECK(cal2.constants == cal.constants);

    const auto closed = closed_form_constants();
    CHECK(closed == std::array<double, 3>{0.5, 6.0, 40.0});
    CHECK_THROWS_AS(calibrate_constants(0.0), InvalidParameter);
}

TEST_CASE("calibrated constants are scale free and shared by the ellipse") {
    // the ellipse series fitted to direct quadrature must use the same C_1
    const auto f = fixture(CurveFamily::ellipse, {2.0, 1.0});
    const auto hs = heat_series(f.curve, f.table);
    CHECK(hs.constants == frozen_calibration().constants);
    const auto fit = fit_expansion(f.curve, f.table, EvalGrid::geometric(1e-4, 1e-2, 12));
    CHECK(std::abs(fit.alpha1 / hs.integrals[1] - hs.constants[1]) < 0.01 * hs.constants[1]);
}

TEST_CASE("heat series of the unit circle") {
    const auto f = fixture(CurveFamily::circle, {1.0});
    const auto hs = heat_series(f.curve, f.table);
    const double l = 2 * pi;
    CHECK(std::abs(hs.alphas[0] - l) < 1e-12);
    CHECK(std::abs(hs.alphas[1] - l / 4) < 1e-12);
    CHECK(std::abs(hs.alphas[2] - 9 * l / 32) < 1e-12);
    CHECK(std::abs(hs.integrals[1] - l / 8) < 1e-12);
    CHECK(std::abs(hs.integrals[2] - 3 * l / 128) < 1e-12);
    CHECK(hs.closed_form_constants[1] == 6.0);

    for (double t : {1e-4, 1e-3, 1e-2}) {
        const double rel = std::abs(hs.evaluate(t) / circle_closed_form(1.0, t) - 1.0);
        CHECK(rel <= 2.0 * std::pow(t, 3));
    }
    CHECK(std::abs(hs.evaluate(1e-3) / circle_closed_form(1.0, 1e-3) - 1.0) < 1e-4);

    const auto h0 = heat_series(f.curve, f.table, 0);
    CHECK(h0.alphas[1] == 0.0);
    CHECK_THROWS_AS(heat_series(f.curve, f.table, 3), InvalidParameter);
}
