#include "heatcurve/heat_content.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "heatcurve/errors.hpp"
#include "heatcurve/phase.hpp"

namespace heatcurve {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kVCut = 8.0;       // window half-width in units of 2 sqrt(t)
constexpr int kFirstOuter = 32;     // first trapezoid level in tau
constexpr int kMaxOuter = 1 << 16;

// Adaptive integral over [a, b] after splitting into `panels` equal pieces,
// so that isolated peaks narrower than the interval are not missed.
QuadResult split_adaptive(const std::function<double(double)>& f, double a, double b, int panels,
                          const QuadratureConfig& cfg) {
    QuadResult out;
    for (int i = 0; i < panels; ++i) {
        const QuadResult r = adaptive_1d(f, a + (b - a) * i / panels, a + (b - a) * (i + 1) / panels, cfg);
        out.value += r.value;
        out.error += r.error;
    }
    return out;
}

struct InnerResult {
    double value = 0.0;
    double error = 0.0;
};

// |gamma'(u)| int |gamma'(u+v)| exp(-|gamma(u+v) - gamma(u)|^2 / 4t) dv over
// the period (or over v > 0 only when half is set).
InnerResult inner_integral(const CurveSpec& curve, const ArcLengthTable& table, const OffDiagonalBounds& bounds,
                           double t, double u, bool half, const QuadratureConfig& cfg) {
    const double speed_u = derivatives(curve, u, 1)[1].norm();
    const std::function<double(double)> f = [&](double v) {
        const double phi = chord(curve, u, v).squaredNorm();
        return std::exp(-phi / (4.0 * t)) * derivatives(curve, u + v, 1)[1].norm();
    };
    const double l = table.total_length();
    const double width = kVCut * 2.0 * std::sqrt(t);
    InnerResult out;

    if (width >= bounds.margin || 2.0 * width >= l) {
        // no usable off-diagonal bound: integrate everything
        const int panels = std::max(1, static_cast<int>(std::ceil(0.5 * l / width)));
        const QuadResult right = split_adaptive(f, 0.0, kPi, panels, cfg);
        QuadResult left{};
        if (!half) left = split_adaptive(f, -kPi, 0.0, panels, cfg);
        out.value = speed_u * (left.value + right.value);
        out.error = speed_u * (left.error + right.error);
        return out;
    }

    const double v_hi = half ? std::min(kPi, table.u_offset(u, width)) : table.u_offset(u, width);
    const double v_lo = table.u_offset(u, -width);
    const QuadResult right = adaptive_1d(f, 0.0, v_hi, cfg);
    QuadResult left{};
    if (!half) left = adaptive_1d(f, v_lo, 0.0, cfg);
    double value = left.value + right.value;
    double error = left.error + right.error;

    // phi increases up to the margin and stays above far_distance^2 beyond it
    const double phi_edge = std::min(chord(curve, u, v_hi).squaredNorm(), chord(curve, u, v_lo).squaredNorm());
    const double phi_floor = std::min(phi_edge, bounds.far_distance * bounds.far_distance);
    const double far_len = 2.0 * kPi - (v_hi - v_lo);
    const double bound = bounds.max_speed * far_len * std::exp(-phi_floor / (4.0 * t));
    const double target = std::max(cfg.abs_tol, cfg.rel_tol * value);
    if (bound <= 1e-3 * target) {
        error += bound;
    } else {
        const double far_arc = l - 2.0 * width;
        const int panels = std::max(1, static_cast<int>(std::ceil(far_arc / width)));
        if (half) {
            const QuadResult far = v_hi < kPi ? split_adaptive(f, v_hi, kPi, panels, cfg) : QuadResult{};
            value += far.value;
            error += far.error;
        } else {
            const QuadResult far = split_adaptive(f, v_hi, 2.0 * kPi + v_lo, panels, cfg);
            value += far.value;
            error += far.error;
        }
    }
    out.value = speed_u * value;
    out.error = speed_u * error;
    return out;
}

QuadResult direct_impl(const CurveSpec& curve, const ArcLengthTable& table, double t, const QuadratureConfig& quad,
                       const OffDiagonalBounds& bounds, bool half) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidParameter("heat_content_direct: t must be positive");
    quad.validate();
    const double l = table.total_length();
    const double prefactor = std::pow(4.0 * kPi * t, -1.5) / (l * l) * (half ? 2.0 : 1.0);

    QuadratureConfig inner = quad;
    inner.rel_tol = 0.1 * quad.rel_tol;
    inner.abs_tol = std::max(1e-300, 0.1 * quad.abs_tol / (prefactor * 2.0 * kPi));

    std::vector<double> values, errors;
    auto add_nodes = [&](int n, int start, int stride) {
        std::vector<double> v(static_cast<std::size_t>((n - start + stride - 1) / stride));
        std::vector<double> e(v.size());
        parallel_for(v.size(), [&](std::size_t i) {
            const double u = 2.0 * kPi * static_cast<double>(start + static_cast<int>(i) * stride) / n;
            const InnerResult r = inner_integral(curve, table, bounds, t, u, half, inner);
            v[i] = r.value;
            e[i] = r.error;
        });
        values.insert(values.end(), v.begin(), v.end());
        errors.insert(errors.end(), e.begin(), e.end());
    };

    int n = kFirstOuter;
    add_nodes(n, 0, 1);
    double estimate = 2.0 * kPi / n * pairwise_sum(values);
    double diff = std::numeric_limits<double>::infinity();
    while (true) {
        const double target = std::max(quad.abs_tol, quad.rel_tol * std::abs(prefactor * estimate));
        if (prefactor * diff <= 0.5 * target) break;
        if (2 * n > kMaxOuter) {
            throw ToleranceNotMet("heat_content_direct: outer trapezoid did not converge", prefactor * estimate,
                                  prefactor * diff);
        }
        add_nodes(2 * n, 1, 2);
        n *= 2;
        const double next = 2.0 * kPi / n * pairwise_sum(values);
        diff = std::abs(next - estimate);
        estimate = next;
    }
    const double inner_err = 2.0 * kPi / n * pairwise_sum(errors);
    return {prefactor * estimate, prefactor * (diff + inner_err)};
}

}  // namespace

EvalGrid EvalGrid::geometric(double tmin, double tmax, int n, QuadratureConfig quad) {
    EvalGrid g;
    g.t_values = geometric_grid(tmin, tmax, n);
    g.quad = quad;
    g.validate();
    return g;
}

void EvalGrid::validate() const {
    if (t_values.size() < 2) throw InvalidParameter("EvalGrid: need at least two times");
    for (double t : t_values) {
        if (!(t > 0.0) || !std::isfinite(t)) throw InvalidParameter("EvalGrid: times must be positive");
    }
    const bool up = t_values[1] > t_values[0];
    for (std::size_t i = 1; i < t_values.size(); ++i) {
        if ((t_values[i] > t_values[i - 1]) != up || t_values[i] == t_values[i - 1]) {
            throw InvalidParameter("EvalGrid: times must be strictly monotone");
        }
    }
    quad.validate();
}

OffDiagonalBounds off_diagonal_bounds(const CurveSpec& curve, const ArcLengthTable& table) {
    OffDiagonalBounds b;
    b.margin = separation_margin(curve, table);

    const int grid = 1024;
    const double l = table.total_length();
    const double h = l / grid;
    std::vector<Vec3> pts(static_cast<std::size_t>(grid));
    double speed = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double u = table.u_of_s(h * i);
        pts[static_cast<std::size_t>(i)] = curve.point(u);
    }
    for (int i = 0; i < 4096; ++i) speed = std::max(speed, derivatives(curve, 2.0 * kPi * i / 4096, 1)[1].norm());
    b.max_speed = 1.01 * speed;

    // grid pairs within h of every pair separated by >= margin; the chord is
    // 1-Lipschitz in each arc-length argument
    double dmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i) {
        for (int j = i + 1; j < grid; ++j) {
            const double sep = std::min(h * (j - i), l - h * (j - i));
            if (sep < b.margin - h) continue;
            dmin = std::min(dmin, (pts[static_cast<std::size_t>(i)] - pts[static_cast<std::size_t>(j)]).norm());
        }
    }
    b.far_distance = std::isfinite(dmin) ? std::max(0.0, dmin - h) : 0.0;
    return b;
}

QuadResult heat_content_direct(const CurveSpec& curve, const ArcLengthTable& table, double t,
                               const QuadratureConfig& quad, const OffDiagonalBounds& bounds) {
    return direct_impl(curve, table, t, quad, bounds, false);
}

QuadResult heat_content_direct(const CurveSpec& curve, const ArcLengthTable& table, double t,
                               const QuadratureConfig& quad) {
    return direct_impl(curve, table, t, quad, off_diagonal_bounds(curve, table), false);
}

QuadResult heat_content_direct_half(const CurveSpec& curve, const ArcLengthTable& table, double t,
                                    const QuadratureConfig& quad) {
    return direct_impl(curve, table, t, quad, off_diagonal_bounds(curve, table), true);
}

double circle_closed_form(double radius, double t) {
    if (!(radius > 0.0) || !(t > 0.0)) throw InvalidParameter("circle_closed_form: R and t must be positive");
    return std::pow(4.0 * kPi * t, -1.5) * bessel_i0_scaled(radius * radius / (2.0 * t));
}

ExpansionFit fit_expansion(const CurveSpec& curve, const ArcLengthTable& table, const EvalGrid& grid) {
    grid.validate();
    const auto [lo, hi] = std::minmax_element(grid.t_values.begin(), grid.t_values.end());
    if (*hi < 10.0 * *lo) throw InvalidParameter("fit_expansion: grid must span at least one decade");
    const double k = max_curvature(curve);
    if (k * k * *hi > 0.1) {
        std::ostringstream msg;
        msg << "fit_expansion: t_max = " << *hi << " too large for k_max = " << k << " (need k_max^2 t_max <= 0.1)";
        throw InvalidParameter(msg.str());
    }
    const OffDiagonalBounds bounds = off_diagonal_bounds(curve, table);
    const double l = table.total_length();

    ExpansionFit out;
    std::vector<double> y;
    for (double t : grid.t_values) {
        const QuadResult r = heat_content_direct(curve, table, t, grid.quad, bounds);
        out.h_values.push_back(r.value);
        out.h_errors.push_back(r.error);
        y.push_back(r.value * 4.0 * kPi * t * l * l);
    }
    const std::vector<double> exps = {0.0, 1.0, 2.0};
    const PowerFit fit = powerbasis_fit(grid.t_values, y, exps);
    out.alpha0 = fit.coeffs[0];
    out.alpha1 = fit.coeffs[1];
    out.alpha2 = fit.coeffs[2];
    out.max_residual = fit.max_residual;
    out.condition_number = fit.condition_number;
    return out;
}

}  // namespace heatcurve
