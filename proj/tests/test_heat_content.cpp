#include "doctest.h"

#include <cmath>
#include <numbers>

#include "heatcurve/curve.hpp"
#include "heatcurve/errors.hpp"
#include "heatcurve/heat_content.hpp"
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

TEST_CASE("circle closed form") {
    // (4 pi t)^{-3/2} e^{-5} I0(5) at t = 0.1, written out
    const double x = 5.0;
    CHECK(std::abs(circle_closed_form(1.0, 0.1) / (std::pow(0.4 * pi, -1.5) * bessel_i0_scaled(x)) - 1.0) < 1e-15);
    CHECK(std::abs(circle_closed_form(1.0, 0.1) - 0.1303) < 5e-4);
    CHECK(std::abs(circle_closed_form(2.0, 0.4) - circle_closed_form(1.0, 0.1) / 8.0) < 1e-16);
    const double t = 1e-3;
    CHECK(std::abs(circle_closed_form(1.0, t) * 2 * pi * 4 * pi * t - 1.0) < 3e-4);
    CHECK(std::isfinite(circle_closed_form(1.0, 1e-9)));
    CHECK_THROWS_AS(circle_closed_form(-1.0, 0.1), InvalidParameter);
    CHECK_THROWS_AS(circle_closed_form(1.0, 0.0), InvalidParameter);
}

TEST_CASE("direct quadrature matches the circle closed form on [1e-4, 10]") {
    const auto f = fixture(CurveFamily::circle, {1.0});
    const auto bounds = off_diagonal_bounds(f.curve, f.table);
    for (double t : geometric_grid(1e-4, 10.0, 11)) {
        const auto r = heat_content_direct(f.curve, f.table, t, {}, bounds);
        const double exact = circle_closed_form(1.0, t);
        CHECK(r.value > 0.0);
        CHECK(std::abs(r.value / exact - 1.0) < 1e-8);
    }
    const auto r = heat_content_direct(f.curve, f.table, 0.1);
    CHECK(std::abs(r.value / circle_closed_form(1.0, 0.1) - 1.0) < 1e-8);
    CHECK(std::abs(r.value - circle_closed_form(1.0, 0.1)) <= r.error + 1e-15);
}

TEST_CASE("half domain doubled equals the full domain") {
    const auto f = fixture(CurveFamily::trefoil, {2.0, 1.0});
    for (double t : {1e-3, 0.1}) {
        const auto full = heat_content_direct(f.curve, f.table, t);
        const auto half = heat_content_direct_half(f.curve, f.table, t);
        CHECK(std::abs(full.value - half.value) <= full.error + half.error + 1e-12 * full.value);
    }
}

TEST_CASE("scaling law H_c(t) = H(t / c^2) / c^3") {
    for (auto [fam, p] : {std::pair{CurveFamily::ellipse, std::vector<double>{2.0, 1.0}},
                          std::pair{CurveFamily::trefoil, std::vector<double>{2.0, 1.0}}}) {
        const auto f = fixture(fam, p);
        const auto g = scaled(f.curve, 2.0);
        const auto tg = arclength_reparam(g, 1024);
        const auto big = heat_content_direct(g, tg, 0.2);
        const auto small = heat_content_direct(f.curve, f.table, 0.05);
        CHECK(std::abs(big.value / (small.value / 8.0) - 1.0) < 1e-9);
    }
}

TEST_CASE("leading behaviour as t goes to zero") {
    for (auto [fam, p] : {std::pair{CurveFamily::circle, std::vector<double>{1.0}},
                          std::pair{CurveFamily::ellipse, std::vector<double>{2.0, 1.0}}}) {
        const auto f = fixture(fam, p);
        const double t = 1e-5, l = f.table.total_length();
        const auto r = heat_content_direct(f.curve, f.table, t);
        CHECK(std::abs(r.value * 4 * pi * t * l * l / l - 1.0) < 1e-3);
    }
}

TEST_CASE("error estimate tightens with the tolerance") {
    const auto f = fixture(CurveFamily::ellipse, {2.0, 1.0});
    const auto bounds = off_diagonal_bounds(f.curve, f.table);
    QuadratureConfig loose, tight;
    loose.rel_tol = 1e-6;
    loose.abs_tol = 1e-300;
    tight.rel_tol = 1e-8;
    tight.abs_tol = 1e-300;
    for (double t : {1e-3, 0.05}) {
        const auto a = heat_content_direct(f.curve, f.table, t, loose, bounds);
        const auto b = heat_content_direct(f.curve, f.table, t, tight, bounds);
        CHECK(b.error * 10.0 <= a.error);
        CHECK(a.error <= 1e-6 * a.value);
        CHECK(b.error <= 1e-8 * b.value);
        CHECK(std::abs(a.value - b.value) <= a.error + b.error);
    }
}

TEST_CASE("direct quadrature is deterministic") {
    const auto f = fixture(CurveFamily::trefoil, {2.0, 1.0});
    const auto a = heat_content_direct(f.curve, f.table, 0.01);
    const auto b = heat_content_direct(f.curve, f.table, 0.01);
    CHECK(a.value == b.value);
    CHECK(a.error == b.error);
    CHECK_THROWS_AS(heat_content_direct(f.curve, f.table, 0.0), InvalidParameter);
}

TEST_CASE("fit_expansion on the unit circle") {
    const auto f = fixture(CurveFamily::circle, {1.0});
    const auto fit = fit_expansion(f.curve, f.table, EvalGrid::geometric(1e-4, 1e-2, 12));
    CHECK(std::abs(fit.alpha0 / (2 * pi) - 1.0) < 1e-3);
    CHECK(std::abs(fit.alpha1 / fit.alpha0 - 0.25) < 0.0025);
    CHECK(fit.h_values.size() == 12);

    CHECK_THROWS_AS(fit_expansion(f.curve, f.table, EvalGrid::geometric(1e-3, 5e-3, 6)), InvalidParameter);
    CHECK_THROWS_AS(fit_expansion(f.curve, f.table, EvalGrid::geometric(1e-2, 1.0, 6)), InvalidParameter);
}

TEST_CASE("EvalGrid validation") {
    EvalGrid g;
    g.t_values = {0.1, 0.2, 0.15};
    CHECK_THROWS_AS(g.validate(), InvalidParameter);
    g.t_values = {0.3, 0.2, 0.1};
    CHECK_NOTHROW(g.validate());
    g.t_values = {0.1, -0.2};
    CHECK_THROWS_AS(g.validate(), InvalidParameter);
}
