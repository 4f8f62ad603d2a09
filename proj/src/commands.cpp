#include "heatcurve/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "heatcurve/curve.hpp"
#include "heatcurve/errors.hpp"
#include "heatcurve/heat_content.hpp"
#include "heatcurve/laplace.hpp"

namespace heatcurve {

namespace {

constexpr double kPi = std::numbers::pi;
// A fitted power contributes "significantly" above this fraction of the leading term.
constexpr double kSignificance = 1e-5;
const std::vector<double> kCommonExponents = {0.0, 0.5, 1.0, 1.5, 2.0};

[[noreturn]] void bad(std::string_view where, std::string_view key, const std::string& what) {
    std::string msg;
    if (!where.empty()) msg += std::string(where) + ": ";
    msg += "field '" + std::string(key) + "': " + what;
    throw ConfigurationError(msg);
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view where, std::string_view key, std::string_view text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
        bad(where, key, "'" + t + "' is not a finite number");
    }
    return v;
}

std::int64_t to_int(std::string_view where, std::string_view key, std::string_view text) {
    const std::string t = trim(text);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) bad(where, key, "'" + t + "' is not an integer");
    return v;
}

std::vector<double> to_list(std::string_view where, std::string_view key, std::string_view text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        out.push_back(to_double(where, key, text.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string join(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + format_number(xs[i]);
    return s;
}

struct Setup {
    CurveSpec curve;
    ArcLengthTable table;
    EmbeddingInfo embed;
};

// Curve construction and every check that depends on the curve; failures here are configuration errors.
Setup prepare(const ExperimentConfig& c) {
    try {
        const CurveFamily family = parse_family(c.curve);
        CurveSpec curve;
        switch (family) {
            case CurveFamily::circle: curve = make_builtin(family, std::vector<double>{c.radius.value_or(1.0)}); break;
            case CurveFamily::ellipse: curve = make_builtin(family, c.axes.value_or(std::vector<double>{2.0, 1.0})); break;
            case CurveFamily::trefoil: curve = make_builtin(family, c.torus.value_or(std::vector<double>{2.0, 1.0})); break;
            case CurveFamily::custom: curve = load_curve_file(c.coeffs_file); break;
        }
        ArcLengthTable table = arclength_reparam(curve, 1024);
        const EmbeddingInfo embed = check_embedded(curve, table);
        Setup s{std::move(curve), std::move(table), embed};
        if (c.command == Command::tube || c.command == Command::compare) {
            const double limit = max_tube_radius(s.curve, s.table);
            for (double e : *c.eps) {
                if (!(e < limit)) {
                    bad("", "eps", format_number(e) + " exceeds the admissible tube radius " + format_number(limit));
                }
            }
        }
        return s;
    } catch (const ConfigurationError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigurationError(std::string("curve: ") + e.what());
    }
}

TubeSpec tube_spec(const ExperimentConfig& c, double eps) {
    TubeSpec spec;
    spec.eps = eps;
    spec.n_s = c.n_s;
    spec.n_theta = c.n_theta;
    spec.n_r = c.n_r;
    spec.n_inner = c.n_inner;
    spec.samples = c.samples;
    spec.replicas = c.replicas;
    spec.seed = c.seed;
    spec.backend = c.backend;
    spec.rel_tol = c.tube_tol;
    return spec;
}

// max over the grid of |c_e t^e| / |c_0| for each fitted exponent
std::vector<double> contributions(const PowerFit& fit, std::span<const double> t, std::span<const double> exps) {
    std::vector<double> out;
    for (std::size_t j = 0; j < exps.size(); ++j) {
        double m = 0.0;
        for (double ti : t) m = std::max(m, std::abs(fit.coeffs[j] * std::pow(ti, exps[j])));
        out.push_back(m / std::abs(fit.coeffs[0]));
    }
    return out;
}

std::string significant(const std::vector<double>& contrib) {
    std::string s;
    for (std::size_t j = 0; j < contrib.size(); ++j) {
        if (j == 0 || contrib[j] > kSignificance) s += (s.empty() ? "" : ";") + format_number(kCommonExponents[j]);
    }
    return s;
}

bool has_half_integer(const std::vector<double>& contrib) { return contrib[1] > kSignificance || contrib[3] > kSignificance; }

std::vector<double> t_grid(const ExperimentConfig& c) { return geometric_grid(*c.tmin, *c.tmax, *c.tsteps); }

QuadratureConfig direct_quad(const ExperimentConfig& c) {
    QuadratureConfig q;
    q.rel_tol = c.tol;
    q.abs_tol = 1e-300;
    return q;
}

void cmd_expand(const ExperimentConfig&, const Setup& s, Report& r, PlotSpec* plot) {
    const Calibration& cal = frozen_calibration();
    const HeatSeries hs = heat_series(s.curve, s.table, 2, 512);
    Section& sec = r.add_section("", {"i", "C_i_calibrated", "C_i_closed_form", "integral_a2i", "alpha_i"});
    for (std::size_t i = 0; i < 3; ++i) {
        sec.add_row({static_cast<double>(i), hs.constants[i], hs.closed_form_constants[i], hs.integrals[i], hs.alphas[i]});
    }
    for (std::size_t i = 0; i < 3; ++i) {
        const std::string k = std::to_string(i);
        r.note("C_" + k + "_raw", cal.raw[i]);
        r.note("C_" + k + "_discrepancy", hs.closed_form_constants[i] - hs.constants[i]);
        r.note("C_" + k + "_ratio_closed_form_over_calibrated", hs.closed_form_constants[i] / hs.constants[i]);
    }
    r.note("calibration_residual", cal.max_residual);
    // the calibrated series reproduces the unit circle closed form at t = 1e-3
    const CurveSpec unit = make_builtin(CurveFamily::circle, std::vector<double>{1.0});
    const ArcLengthTable ut = arclength_reparam(unit, 256);
    const double t = 1e-3, exact = circle_closed_form(1.0, t);
    r.note("circle_check_t", t);
    r.note("circle_check_rel_residual", std::abs(heat_series(unit, ut, 2, 512).evaluate(t) / exact - 1.0));
    const HeatSeries closed = [&] {
        HeatSeries p = heat_series(unit, ut, 2, 512);
        for (std::size_t i = 0; i < 3; ++i) p.alphas[i] = p.closed_form_constants[i] * p.integrals[i];
        return p;
    }();
    r.note("circle_check_rel_residual_closed_form_constants", std::abs(closed.evaluate(t) / exact - 1.0));

    if (plot) {
        plot->title = "heat series H(t) by truncation order";
        plot->x_label = "t";
        plot->x = geometric_grid(1e-4, 1e-1, 40);
        for (int order = 0; order <= 2; ++order) {
            HeatSeries h = hs;
            h.order = order;
            PlotSeries ps{"order " + std::to_string(order), {}};
            for (double x : plot->x) ps.y.push_back(h.evaluate(x));
            plot->curves.push_back(std::move(ps));
        }
    }
}

void cmd_direct(const ExperimentConfig& c, const Setup& s, Report& r, PlotSpec* plot) {
    const auto ts = t_grid(c);
    const QuadratureConfig quad = direct_quad(c);
    const OffDiagonalBounds bounds = off_diagonal_bounds(s.curve, s.table);
    Section& sec = r.add_section("", {"t", "H_S", "abs_error_estimate"});
    PlotSeries hv{"H_S", {}}, rel{"abs_error/H_S", {}};
    for (double t : ts) {
        const QuadResult q = heat_content_direct(s.curve, s.table, t, quad, bounds);
        sec.add_row({t, q.value, q.error});
        hv.y.push_back(q.value);
        rel.y.push_back(q.error / q.value);
    }
    r.note("length", s.table.total_length());
    if (plot) {
        plot->title = "direct heat content";
        plot->x_label = "t";
        plot->x = ts;
        plot->curves = {hv};
        plot->residuals = {rel};
    }
}

void cmd_tube(const ExperimentConfig& c, const Setup& s, Report& r, PlotSpec* plot) {
    const auto ts = t_grid(c);
    Section& sec = r.add_section("", {"eps", "t", "H_eps", "abs_error", "vol", "alpha1_eps", "alpha3_eps"});
    if (plot) {
        plot->title = "tube heat content";
        plot->x_label = "t";
        plot->x = ts;
    }
    for (double eps : *c.eps) {
        const TubeSpec spec = tube_spec(c, eps);
        const TubeSeries series = tube_alpha_coeffs(s.curve, s.table, eps);
        PlotSeries hv{"H_eps eps=" + format_number(eps), {}}, res{"|H_eps/series - 1| eps=" + format_number(eps), {}};
        for (double t : ts) {
            const TubeResult q = tube_heat_content(s.curve, s.table, t, spec);
            sec.add_row({eps, t, q.value, q.error, series.vol, series.alpha1_eps, series.alpha3_eps});
            hv.y.push_back(q.value);
            res.y.push_back(std::abs(q.value / series.evaluate(t) - 1.0));
        }
        if (plot) {
            plot->curves.push_back(std::move(hv));
            plot->residuals.push_back(std::move(res));
        }
    }
    r.note("backend", to_string(c.backend));
    r.note("length", s.table.total_length());
}

void cmd_compare(const ExperimentConfig& c, const Setup& s, Report& r, PlotSpec* plot) {
    const double l = s.table.total_length();
    const auto ts = t_grid(c);
    std::vector<double> eps = *c.eps;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    const QuadratureConfig quad = direct_quad(c);
    const OffDiagonalBounds bounds = off_diagonal_bounds(s.curve, s.table);
    const HeatSeries hs = heat_series(s.curve, s.table, 2, 512);
    std::vector<TubeSeries> tseries;
    for (double e : eps) tseries.push_back(tube_alpha_coeffs(s.curve, s.table, e));

    std::vector<std::string> cols = {"t", "H_direct", "H_series"};
    for (double e : eps) cols.push_back("H_tube_eps=" + format_number(e));
    for (double e : eps) cols.push_back("tube_series_eps=" + format_number(e));
    Section* main = &r.add_section("grid", cols);
    std::vector<std::vector<double>> tube_cols(eps.size());
    std::vector<double> direct_col, series_col;
    for (double t : ts) {
        std::vector<double> row = {t, heat_content_direct(s.curve, s.table, t, quad, bounds).value, hs.evaluate(t)};
        for (std::size_t j = 0; j < eps.size(); ++j) {
            row.push_back(tube_heat_content(s.curve, s.table, t, tube_spec(c, eps[j])).value);
            tube_cols[j].push_back(row.back());
        }
        for (std::size_t j = 0; j < eps.size(); ++j) row.push_back(tseries[j].evaluate(t));
        direct_col.push_back(row[1]);
        series_col.push_back(row[2]);
        main->add_row(std::move(row));
    }
    if (plot) {
        plot->title = "direct, series and tube heat content";
        plot->x_label = "t";
        plot->x = ts;
        plot->curves = {{"H_direct", direct_col}, {"H_series", series_col}};
        PlotSeries sr{"|H_series/H_direct - 1|", {}};
        for (std::size_t i = 0; i < ts.size(); ++i) sr.y.push_back(std::abs(series_col[i] / direct_col[i] - 1.0));
        plot->residuals = {sr};
        for (std::size_t j = 0; j < eps.size(); ++j) {
            plot->curves.push_back({"H_tube eps=" + format_number(eps[j]), tube_cols[j]});
            PlotSeries tr{"|H_tube/H_direct - 1| eps=" + format_number(eps[j]), {}};
            for (std::size_t i = 0; i < ts.size(); ++i) tr.y.push_back(std::abs(tube_cols[j][i] / direct_col[i] - 1.0));
            plot->residuals.push_back(std::move(tr));
        }
    }

    // Exponent fits in the common basis {0, 1/2, 1, 3/2, 2}, each on its own small-t range.
    const double k2 = s.embed.max_curvature * s.embed.max_curvature;
    const auto td = geometric_grid(1e-4 / std::max(1.0, k2), 1e-2 / std::max(1.0, k2), 9);
    std::vector<double> yd;
    for (double t : td) yd.push_back(heat_content_direct(s.curve, s.table, t, quad, bounds).value * 4.0 * kPi * t * l * l);
    // t^3 absorbs the next series term so it cannot leak into the half-integer columns; not reported
    std::vector<double> direct_exps = kCommonExponents;
    direct_exps.push_back(3.0);
    const PowerFit direct_fit = powerbasis_fit(td, yd, direct_exps);
    auto direct_contrib = contributions(direct_fit, td, direct_exps);
    direct_contrib.pop_back();

    std::vector<std::string> ecols = {"exponent", "direct"};
    for (double e : eps) ecols.push_back("tube_eps=" + format_number(e));
    std::vector<std::vector<double>> tube_contrib;
    std::vector<TubeExpansionFit> tube_fits;
    for (double e : eps) {
        const auto tt = geometric_grid(e * e * 1e-4, e * e * 1e-2, 8);
        const TubeExpansionFit f = tube_expansion_check(s.curve, s.table, tt, tube_spec(c, e));
        std::vector<double> y;
        const double vol = kPi * e * e * l;
        for (double h : f.h_values) y.push_back(h * vol * vol);
        tube_contrib.push_back(contributions(powerbasis_fit(tt, y, kCommonExponents), tt, kCommonExponents));
        tube_fits.push_back(f);
    }
    Section& ex = r.add_section("exponent_contributions", ecols);
    for (std::size_t j = 0; j < kCommonExponents.size(); ++j) {
        std::vector<double> row = {kCommonExponents[j], direct_contrib[j]};
        for (const auto& tc : tube_contrib) row.push_back(tc[j]);
        ex.add_row(std::move(row));
    }

    Section& tf = r.add_section("tube_fit", {"eps", "beta0", "beta1", "beta3", "vol", "alpha1_eps", "alpha3_eps",
                                             "max_residual"});
    for (std::size_t j = 0; j < eps.size(); ++j) {
        tf.add_row({eps[j], tube_fits[j].beta0, tube_fits[j].beta1, tube_fits[j].beta3, tseries[j].vol,
                    tseries[j].alpha1_eps, tseries[j].alpha3_eps, tube_fits[j].max_residual});
    }

    // Pointwise convergence in eps at fixed t.
    const double tf_val = *c.tfixed;
    const double h_fixed = heat_content_direct(s.curve, s.table, tf_val, quad, bounds).value;
    Section& conv = r.add_section("convergence", {"eps", "t", "H_tube", "H_direct", "abs_diff"});
    std::vector<double> gaps;
    for (double e : eps) {
        const double h = tube_heat_content(s.curve, s.table, tf_val, tube_spec(c, e)).value;
        gaps.push_back(std::abs(h - h_fixed));
        conv.add_row({e, tf_val, h, h_fixed, gaps.back()});
    }

    r.note("exponents_direct", significant(direct_contrib));
    bool tube_half = true;
    for (std::size_t j = 0; j < eps.size(); ++j) {
        r.note("exponents_tube_eps_" + format_number(eps[j]), significant(tube_contrib[j]));
        tube_half = tube_half && has_half_integer(tube_contrib[j]);
    }
    r.note("half_integer_exponents_direct", has_half_integer(direct_contrib) ? "present" : "absent");
    r.note("half_integer_exponents_tube", tube_half ? "present" : "absent");
    r.note("orders_agree", !has_half_integer(direct_contrib) && !tube_half ? "yes" : "no");

    // alpha3_eps ~ c/eps (+ O(eps)) and alpha1_eps = slope * eps
    std::vector<double> a3, b1;
    for (std::size_t j = 0; j < eps.size(); ++j) {
        a3.push_back(tseries[j].alpha3_eps);
        b1.push_back(tube_fits[j].beta1);
    }
    const double target = std::sqrt(kPi) * l / 2.0;
    const std::vector<double> blow_exps = eps.size() >= 4 ? std::vector<double>{-1.0, 1.0} : std::vector<double>{-1.0};
    const PowerFit blow = powerbasis_fit(eps, a3, blow_exps);
    r.note("blowup_constant_eps_alpha3", blow.coeffs[0]);
    r.note("blowup_target_sqrtpi_l_over_2", target);
    r.note("blowup_rel_diff", std::abs(blow.coeffs[0] / target - 1.0));
    const std::vector<double> lin = {1.0};
    const PowerFit a1fit = powerbasis_fit(eps, b1, lin);
    const double slope_target = -2.0 * l * std::sqrt(kPi);
    double lin_res = 0.0;
    for (std::size_t j = 0; j < eps.size(); ++j) lin_res = std::max(lin_res, std::abs(b1[j] / (a1fit.coeffs[0] * eps[j]) - 1.0));
    r.note("alpha1_slope", a1fit.coeffs[0]);
    r.note("alpha1_slope_target", slope_target);
    r.note("alpha1_slope_rel_diff", std::abs(a1fit.coeffs[0] / slope_target - 1.0));
    r.note("alpha1_linear_max_rel_residual", lin_res);

    bool monotone = true;
    for (std::size_t j = 1; j < gaps.size(); ++j) monotone = monotone && gaps[j] < gaps[j - 1];
    r.note("convergence_t", tf_val);
    r.note("convergence_monotone", monotone ? "yes" : "no");
    r.note("convergence_final_rel", gaps.back() / h_fixed);
    // empirical rate: least-squares slope of log gap against log eps
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(eps.size());
    for (std::size_t j = 0; j < eps.size(); ++j) {
        const double x = std::log(eps[j]), y = std::log(gaps[j]);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    r.note("convergence_empirical_rate", (n * sxy - sx * sy) / (n * sxx - sx * sx));
}

void cmd_oracle(const ExperimentConfig& c, const Setup& s, Report& r, PlotSpec* plot) {
    const double radius = c.radius.value_or(1.0);
    const auto ts = t_grid(c);
    const QuadratureConfig quad = direct_quad(c);
    const OffDiagonalBounds bounds = off_diagonal_bounds(s.curve, s.table);
    Section& heat = r.add_section("heat", {"t", "closed_form", "direct", "rel_diff"});
    PlotSeries cf{"closed form", {}}, dv{"direct", {}}, rd{"rel_diff", {}};
    double worst_t = 0.0;
    for (double t : ts) {
        const double exact = circle_closed_form(radius, t);
        const double d = heat_content_direct(s.curve, s.table, t, quad, bounds).value;
        const double rel = std::abs(d / exact - 1.0);
        worst_t = std::max(worst_t, rel);
        heat.add_row({t, exact, d, rel});
        cf.y.push_back(exact);
        dv.y.push_back(d);
        rd.y.push_back(rel);
    }
    // int_0^{2 pi R} exp(-lambda 2R^2 (1 - cos(s/R))) ds = 2 pi R e^{-x} I_0(x), x = 2 lambda R^2
    Section& lap = r.add_section("laplace", {"lambda", "I_numeric", "I_bessel", "rel_diff"});
    double worst_l = 0.0;
    for (double lam : *c.lambda) {
        const double num = laplace_integral_numeric(s.curve, s.table, 0.0, lam).value;
        const double ref = 2.0 * kPi * radius * bessel_i0_scaled(2.0 * lam * radius * radius);
        const double rel = std::abs(num / ref - 1.0);
        worst_l = std::max(worst_l, rel);
        lap.add_row({lam, num, ref, rel});
    }
    r.note("max_rel_diff_heat", worst_t);
    r.note("max_rel_diff_laplace", worst_l);
    if (plot) {
        plot->title = "circle oracle";
        plot->x_label = "t";
        plot->x = ts;
        plot->curves = {cf, dv};
        plot->residuals = {rd};
    }
}

bool write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) return false;
    f << body;
    return static_cast<bool>(f.flush());
}

}  // namespace

std::string to_string(Command command) {
    switch (command) {
        case Command::expand: return "expand";
        case Command::direct: return "direct";
        case Command::tube: return "tube";
        case Command::compare: return "compare";
        case Command::oracle: return "oracle";
    }
    return "expand";
}

Command parse_command(std::string_view name) {
    for (Command c : {Command::expand, Command::direct, Command::tube, Command::compare, Command::oracle}) {
        if (to_string(c) == name) return c;
    }
    throw ConfigurationError("unknown subcommand '" + std::string(name) + "'");
}

void ExperimentConfig::set(std::string_view raw_key, std::string_view value, std::string_view where) {
    std::string key = trim(raw_key);
    std::replace(key.begin(), key.end(), '-', '_');
    const std::string v = trim(value);
    auto positive_int = [&](int& field) {
        const std::int64_t x = to_int(where, key, v);
        if (x <= 0 || x > 1000000) bad(where, key, "must be a positive integer");
        field = static_cast<int>(x);
    };
    if (key == "curve") {
        try {
            parse_family(v);
        } catch (const Error&) {
            bad(where, key, "unknown curve family '" + v + "'");
        }
        curve = v;
    } else if (key == "radius") radius = to_double(where, key, v);
    else if (key == "axes") axes = to_list(where, key, v);
    else if (key == "torus") torus = to_list(where, key, v);
    else if (key == "coeffs_file") coeffs_file = v;
    else if (key == "tol") tol = to_double(where, key, v);
    else if (key == "tube_tol") tube_tol = to_double(where, key, v);
    else if (key == "seed") {
        const std::int64_t x = to_int(where, key, v);
        if (x < 0) bad(where, key, "must be non-negative");
        seed = static_cast<std::uint64_t>(x);
    } else if (key == "eps") eps = to_list(where, key, v);
    else if (key == "tmin") tmin = to_double(where, key, v);
    else if (key == "tmax") tmax = to_double(where, key, v);
    else if (key == "tsteps") {
        int x = 0;
        positive_int(x);
        tsteps = x;
    } else if (key == "tfixed") tfixed = to_double(where, key, v);
    else if (key == "lambda") lambda = to_list(where, key, v);
    else if (key == "backend") {
        try {
            backend = parse_backend(v);
        } catch (const Error&) {
            bad(where, key, "unknown backend '" + v + "'");
        }
    } else if (key == "samples") {
        samples = to_int(where, key, v);
        if (samples <= 0) bad(where, key, "must be positive");
    } else if (key == "replicas") positive_int(replicas);
    else if (key == "n_s") positive_int(n_s);
    else if (key == "n_theta") positive_int(n_theta);
    else if (key == "n_r") positive_int(n_r);
    else if (key == "n_inner") positive_int(n_inner);
    else if (key == "out") out = v;
    else if (key == "svg") svg = v;
    else {
        std::string msg = where.empty() ? std::string() : std::string(where) + ": ";
        throw ConfigurationError(msg + "unknown key '" + key + "'");
    }
}

void ExperimentConfig::resolve() {
    struct Defaults {
        double tmin, tmax;
        int tsteps;
    };
    static const std::map<Command, Defaults> defaults = {
        {Command::expand, {1e-4, 1e-1, 4}},   {Command::direct, {1e-4, 10.0, 12}}, {Command::tube, {1e-6, 1e-4, 8}},
        {Command::compare, {1e-5, 1e-1, 9}}, {Command::oracle, {1e-4, 10.0, 12}},
    };
    const Defaults& d = defaults.at(command);
    if (!tmin) tmin = d.tmin;
    if (!tmax) tmax = d.tmax;
    if (!tsteps) tsteps = d.tsteps;
    if (!tfixed) tfixed = 0.1;
    if (!lambda) lambda = std::vector<double>{1.0, 10.0, 100.0, 1000.0, 10000.0};
    if (!eps) eps = command == Command::compare ? std::vector<double>{0.2, 0.1, 0.05, 0.025} : std::vector<double>{0.1};

    const CurveFamily family = parse_family(curve);
    if (radius && family != CurveFamily::circle) bad("", "radius", "only applies to --curve circle");
    if (axes && family != CurveFamily::ellipse) bad("", "axes", "only applies to --curve ellipse");
    if (torus && family != CurveFamily::trefoil) bad("", "torus", "only applies to --curve trefoil");
    if (!coeffs_file.empty() && family != CurveFamily::custom) bad("", "coeffs_file", "only applies to --curve custom");
    if (family == CurveFamily::custom && coeffs_file.empty()) bad("", "coeffs_file", "required for --curve custom");
    if (radius && !(*radius > 0.0)) bad("", "radius", "must be positive");
    if (axes && (axes->size() != 2 || !((*axes)[0] > 0.0) || !((*axes)[1] > 0.0))) bad("", "axes", "expects two positive semi-axes");
    if (torus && (torus->size() != 2 || !((*torus)[1] > 0.0) || !((*torus)[0] > (*torus)[1]))) {
        bad("", "torus", "expects radii R > r > 0");
    }
    if (command == Command::oracle && family != CurveFamily::circle) bad("", "curve", "oracle requires --curve circle");
    if (!(tol > 0.0 && tol <= 1e-2)) bad("", "tol", "must lie in (0, 1e-2]");
    if (!(*tmin > 0.0)) bad("", "tmin", "must be positive");
    if (!(*tmax > *tmin)) bad("", "tmax", "must exceed tmin");
    if (*tsteps < 2) bad("", "tsteps", "must be at least 2");
    if (!(*tfixed > 0.0)) bad("", "tfixed", "must be positive");
    for (double x : *lambda) {
        if (!(x > 0.0)) bad("", "lambda", "values must be positive");
    }
    if (eps->empty()) bad("", "eps", "needs at least one value");
    for (double x : *eps) {
        if (!(x > 0.0)) bad("", "eps", "values must be positive");
    }
    if (command == Command::compare) {
        std::vector<double> e = *eps;
        std::sort(e.begin(), e.end());
        if (e.size() < 3 || std::adjacent_find(e.begin(), e.end()) != e.end()) {
            bad("", "eps", "compare needs at least three distinct values");
        }
    }
    try {
        tube_spec(*this, eps->front()).validate();
    } catch (const Error& ex) {
        throw ConfigurationError(std::string("tube settings: ") + ex.what());
    }
}

std::string ExperimentConfig::canonical() const {
    std::map<std::string, std::string> kv;
    kv["command"] = to_string(command);
    kv["curve"] = curve;
    if (radius) kv["radius"] = format_number(*radius);
    if (axes) kv["axes"] = join(*axes);
    if (torus) kv["torus"] = join(*torus);
    if (!coeffs_file.empty()) kv["coeffs_file"] = coeffs_file;
    kv["tol"] = format_number(tol);
    kv["tube_tol"] = format_number(tube_tol);
    kv["seed"] = std::to_string(seed);
    if (eps) kv["eps"] = join(*eps);
    if (tmin) kv["tmin"] = format_number(*tmin);
    if (tmax) kv["tmax"] = format_number(*tmax);
    if (tsteps) kv["tsteps"] = std::to_string(*tsteps);
    if (tfixed) kv["tfixed"] = format_number(*tfixed);
    if (lambda) kv["lambda"] = join(*lambda);
    kv["backend"] = to_string(backend);
    kv["samples"] = std::to_string(samples);
    kv["replicas"] = std::to_string(replicas);
    kv["n_s"] = std::to_string(n_s);
    kv["n_theta"] = std::to_string(n_theta);
    kv["n_r"] = std::to_string(n_r);
    kv["n_inner"] = std::to_string(n_inner);
    std::string s;
    for (const auto& [k, v] : kv) s += k + "=" + v + "\n";
    return s;
}

void apply_config_text(ExperimentConfig& config, std::string_view text, std::string_view name) {
    std::size_t start = 0;
    int line_no = 0;
    while (start <= text.size()) {
        const std::size_t nl = text.find('\n', start);
        std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const std::string where = std::string(name) + ":" + std::to_string(line_no);
        if (!trim(line).empty()) {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) throw ConfigurationError(where + ": expected key=value");
            config.set(line.substr(0, eq), line.substr(eq + 1), where);
        }
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
}

void run_command(const ExperimentConfig& config, Report& report, PlotSpec* plot) {
    const Setup s = prepare(config);
    try {
        switch (config.command) {
            case Command::expand: cmd_expand(config, s, report, plot); break;
            case Command::direct: cmd_direct(config, s, report, plot); break;
            case Command::tube: cmd_tube(config, s, report, plot); break;
            case Command::compare: cmd_compare(config, s, report, plot); break;
            case Command::oracle: cmd_oracle(config, s, report, plot); break;
        }
    } catch (const Error& e) {
        report.partial = true;
        report.partial_reason = e.what();
        throw;
    }
}

int execute(const ExperimentConfig& config, std::string& diagnostics) {
    Report report;
    PlotSpec plot;
    const Provenance prov{config.seed, config.canonical()};
    auto emit = [&]() -> bool {
        const std::string body = report.render(prov);
        if (config.out.empty()) {
            std::cout << body;
            return true;
        }
        if (!write_file(config.out, body)) {
            diagnostics = "cannot write output file '" + config.out + "'";
            return false;
        }
        return true;
    };
    try {
        run_command(config, report, config.svg.empty() ? nullptr : &plot);
    } catch (const ConfigurationError& e) {
        diagnostics = std::string("configuration error: ") + e.what();
        return 1;
    } catch (const Error& e) {
        diagnostics = std::string("numerical failure: ") + e.what();
        // compare keeps what it finished, clearly marked
        if (config.command == Command::compare && !report.sections.empty()) emit();
        return 2;
    }
    if (!emit()) return 1;
    if (!config.svg.empty() && !write_file(config.svg, render_svg(plot))) {
        diagnostics = "cannot write svg file '" + config.svg + "'";
        return 1;
    }
    return 0;
}

}  // namespace heatcurve
