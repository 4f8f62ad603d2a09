#include "heatcurve/tube.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "heatcurve/errors.hpp"
#include "heatcurve/qmc.hpp"

namespace heatcurve {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kWindow = 12.0;       // kernel cutoff in units of sqrt(t): e^{-36} < 3e-16
constexpr double kKernelSkip = 40.0;   // exponent beyond which a kernel row is dropped

struct TubeContext {
    const CurveSpec& curve;
    const ArcLengthTable& table;
    double eps;
    double length;
    double vol;
    double reach;  // min(1/k_max, d/2): the projection to the curve is Lipschitz within it
};

TubeContext make_context(const CurveSpec& curve, const ArcLengthTable& table, double eps) {
    const EmbeddingInfo info = check_embedded(curve, table);
    const double limit = std::min(info.reach_bound, 0.99 / info.max_curvature);
    if (!(eps > 0.0) || !(eps < limit)) {
        std::ostringstream msg;
        msg << "tube radius " << eps << " not below the admissible radius " << limit;
        throw TubeTooWide(msg.str());
    }
    const double l = table.total_length();
    return {curve, table, eps, l, kPi * eps * eps * l, info.reach_bound / 0.9};
}

struct RuleSize {
    int n_s, n_theta, n_r, n_inner;
};

// Integral of the heat kernel over the tube at x, with the theta' integral
// done in closed form:
//   int (1 - r' k' cos th') exp(z cos(th' - b)) dth' = 2 pi (I0(z) - r' k' cos b I1(z)).
double inner_integral(const TubeContext& ctx, const Vec3& x, double u_x, double t, int n_inner) {
    const double cut = kWindow * std::sqrt(t);
    const double arc_window = cut / (1.0 - ctx.eps / ctx.reach);
    const double four_t = 4.0 * t;
    const double norm = kTwoPi * std::pow(4.0 * kPi * t, -1.5);

    std::vector<double> u_nodes, u_weights;
    if (2.0 * arc_window >= ctx.length) {
        const int n = std::max(n_inner, static_cast<int>(std::ceil(8.0 * ctx.length / std::sqrt(2.0 * t))));
        for (int i = 0; i < n; ++i) {
            u_nodes.push_back(u_x - kPi + kTwoPi * i / n);
            u_weights.push_back(kTwoPi / n);
        }
    } else {
        const double lo = u_x + ctx.table.u_offset(u_x, -arc_window);
        const double hi = u_x + ctx.table.u_offset(u_x, arc_window);
        const GaussRule& g = gauss_legendre(n_inner);
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            u_nodes.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * g.nodes[i]);
            u_weights.push_back(0.5 * (hi - lo) * g.weights[i]);
        }
    }

    const GaussRule& gr = gauss_legendre(n_inner);
    std::vector<double> rows(u_nodes.size(), 0.0);
    for (std::size_t i = 0; i < u_nodes.size(); ++i) {
        const LocalFrame f = local_frame(ctx.curve, u_nodes[i]);
        const Vec3 p = x - f.point;
        const double a = p.dot(f.tangent);
        const double along = a * a / four_t;
        if (along > kKernelSkip) continue;
        const double pn = p.dot(f.normal), pb = p.dot(f.binormal);
        const double rho = std::hypot(pn, pb);
        const double cos_b = rho > 0.0 ? pn / rho : 0.0;
        const double r_lo = std::max(0.0, rho - cut), r_hi = std::min(ctx.eps, rho + cut);
        if (!(r_hi > r_lo)) continue;
        const double half = 0.5 * (r_hi - r_lo), mid = 0.5 * (r_hi + r_lo);
        double row = 0.0;
        for (std::size_t j = 0; j < gr.nodes.size(); ++j) {
            const double r = mid + half * gr.nodes[j];
            const double z = r * rho / (2.0 * t);
            const double g = std::exp(-(r - rho) * (r - rho) / four_t - along);
            row += gr.weights[j] * r * g * (bessel_i0_scaled(z) - r * f.curvature * cos_b * bessel_i1_scaled(z));
        }
        rows[i] = u_weights[i] * f.speed * half * row;
    }
    return norm * pairwise_sum(rows);
}

// int_{S} int_{S} p_t(x, y) dx dy by the product rule of the given size.
double product_rule(const TubeContext& ctx, double t, const RuleSize& n) {
    const double cut = kWindow * std::sqrt(t);
    const double r0 = std::max(0.0, ctx.eps - cut);
    const double interior = kPi * r0 * r0 * ctx.length;  // kernel mass is 1 there
    const GaussRule& gr = gauss_legendre(n.n_r);
    const double half = 0.5 * (ctx.eps - r0), mid = 0.5 * (ctx.eps + r0);

    std::vector<LocalFrame> frames(static_cast<std::size_t>(n.n_s));
    for (int i = 0; i < n.n_s; ++i) frames[static_cast<std::size_t>(i)] = local_frame(ctx.curve, kTwoPi * i / n.n_s);

    const std::size_t cells = static_cast<std::size_t>(n.n_s) * static_cast<std::size_t>(n.n_theta);
    std::vector<double> values(cells);
    parallel_for(cells, [&](std::size_t c) {
        const std::size_t i = c / static_cast<std::size_t>(n.n_theta);
        const int j = static_cast<int>(c % static_cast<std::size_t>(n.n_theta));
        const LocalFrame& f = frames[i];
        const double u = kTwoPi * static_cast<double>(i) / n.n_s;
        const double th = kTwoPi * j / n.n_theta;
        const Vec3 dir = std::cos(th) * f.normal + std::sin(th) * f.binormal;
        double acc = 0.0;
        for (std::size_t m = 0; m < gr.nodes.size(); ++m) {
            const double r = mid + half * gr.nodes[m];
            const double density = r * (1.0 - r * f.curvature * std::cos(th));
            acc += gr.weights[m] * density * inner_integral(ctx, f.point + r * dir, u, t, n.n_inner);
        }
        values[c] = f.speed * half * acc;
    });
    return interior + (kTwoPi / n.n_s) * (kTwoPi / n.n_theta) * pairwise_sum(values);
}

// Nearest-point Newton iteration on (gamma(u) - y) . gamma'(u) = 0.
double local_distance(const CurveSpec& curve, const Vec3& y, double u0, double& u_out) {
    double u = u0;
    for (int it = 0; it < 30; ++it) {
        const auto d = derivatives(curve, u, 2);
        const Vec3 diff = d[0] - y;
        const double g = diff.dot(d[1]);
        double gp = d[1].squaredNorm() + diff.dot(d[2]);
        if (!(gp > 0.0)) gp = d[1].squaredNorm();
        double step = g / gp;
        step = std::clamp(step, -0.25, 0.25);
        u -= step;
        if (std::abs(step) < 1e-14) break;
    }
    u_out = u;
    return (curve.point(u) - y).norm();
}

double global_distance(const CurveSpec& curve, const Vec3& y) {
    constexpr int kScan = 256;
    double best = std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (int i = 0; i < kScan; ++i) {
        const double d = (curve.point(kTwoPi * i / kScan) - y).squaredNorm();
        if (d < best) {
            best = d;
            best_i = i;
        }
    }
    double u = 0.0;
    return std::min(std::sqrt(best), local_distance(curve, y, kTwoPi * best_i / kScan, u));
}

TubeResult qmc_rule(const TubeContext& ctx, double t, const TubeSpec& spec) {
    const std::int64_t per = spec.samples / spec.replicas;
    const double sigma = std::sqrt(2.0 * t);
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(spec.replicas));
    std::uint64_t state = spec.seed;
    for (auto& s : seeds) s = splitmix64(state);

    std::vector<double> means(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t q) {
        SobolSequence sobol(6, seeds[q]);
        std::array<double, 6> p{};
        std::vector<double> hits(static_cast<std::size_t>(per));
        for (std::int64_t n = 0; n < per; ++n) {
            sobol.next(p);
            const double u = ctx.table.u_of_s(ctx.length * p[0]);
            const double r = ctx.eps * std::sqrt(p[1]);
            const double th = kTwoPi * p[2];
            const LocalFrame f = local_frame(ctx.curve, u);
            const Vec3 x = f.point + r * (std::cos(th) * f.normal + std::sin(th) * f.binormal);
            const Vec3 y = x + sigma * Vec3(normal_quantile(p[3]), normal_quantile(p[4]), normal_quantile(p[5]));
            double u_foot = u;
            bool inside = local_distance(ctx.curve, y, u, u_foot) < ctx.eps;
            if (!inside) inside = global_distance(ctx.curve, y) < ctx.eps;
            hits[static_cast<std::size_t>(n)] = inside ? 1.0 - r * f.curvature * std::cos(th) : 0.0;
        }
        means[q] = pairwise_sum(hits) / static_cast<double>(per);
    });

    const double mean = pairwise_sum(means) / static_cast<double>(means.size());
    double var = 0.0;
    for (double m : means) var += (m - mean) * (m - mean);
    var /= static_cast<double>(means.size() - 1);
    TubeResult out;
    out.backend = TubeBackend::qmc;
    out.value = mean / ctx.vol;
    out.error = std::sqrt(var / static_cast<double>(means.size())) / ctx.vol;
    return out;
}

}  // namespace

std::string to_string(TubeBackend backend) {
    switch (backend) {
        case TubeBackend::automatic: return "auto";
        case TubeBackend::product: return "product";
        case TubeBackend::qmc: return "qmc";
    }
    return "auto";
}

TubeBackend parse_backend(std::string_view name) {
    if (name == "auto") return TubeBackend::automatic;
    if (name == "product") return TubeBackend::product;
    if (name == "qmc") return TubeBackend::qmc;
    throw InvalidParameter("unknown backend '" + std::string(name) + "' (expected auto, product or qmc)");
}

void TubeSpec::validate() const {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidParameter("tube: eps must be positive");
    if (n_s < 1 || n_theta < 2 || n_r < 2 || n_inner < 4) throw InvalidParameter("tube: quadrature sizes too small");
    if (replicas < 2) throw InvalidParameter("tube: need at least two QMC replicas");
    if (samples < 16 * static_cast<std::int64_t>(replicas)) throw InvalidParameter("tube: too few QMC samples");
    if (!(rel_tol > 0.0)) throw InvalidParameter("tube: rel_tol must be positive");
}

double TubeSeries::evaluate(double t) const {
    const double st = std::sqrt(t);
    return (vol + alpha1_eps * st + alpha3_eps * st * t) / (vol * vol);
}

Vec3 tube_point(const CurveSpec& curve, const ArcLengthTable& table, double s, double r, double theta) {
    const FrenetData f = frenet(curve, table, s);
    return f.point + r * (std::cos(theta) * f.normal + std::sin(theta) * f.binormal);
}

double max_tube_radius(const CurveSpec& curve, const ArcLengthTable& table) {
    const EmbeddingInfo info = check_embedded(curve, table);
    return std::min(info.reach_bound, 0.99 / info.max_curvature);
}

TubeMeasures tube_measures(const CurveSpec& curve, const ArcLengthTable& table, double eps) {
    const TubeContext ctx = make_context(curve, table, eps);
    TubeMeasures m;
    m.vol = ctx.vol;
    m.surf = kTwoPi * eps * ctx.length;

    constexpr int kS = 1024, kTheta = 16;
    const GaussRule& g = gauss_legendre(4);  // the r-density is quadratic
    std::vector<double> vol_cells(kS), surf_cells(kS);
    for (int i = 0; i < kS; ++i) {
        const LocalFrame f = local_frame(curve, kTwoPi * i / kS);
        double v = 0.0, s = 0.0;
        for (int j = 0; j < kTheta; ++j) {
            const double c = std::cos(kTwoPi * j / kTheta);
            for (std::size_t q = 0; q < g.nodes.size(); ++q) {
                const double r = 0.5 * eps * (1.0 + g.nodes[q]);
                v += 0.5 * eps * g.weights[q] * r * (1.0 - r * f.curvature * c);
            }
            s += eps * (1.0 - eps * f.curvature * c);
        }
        vol_cells[static_cast<std::size_t>(i)] = f.speed * v;
        surf_cells[static_cast<std::size_t>(i)] = f.speed * s;
    }
    const double w = (kTwoPi / kS) * (kTwoPi / kTheta);
    m.vol_quadrature = w * pairwise_sum(vol_cells);
    m.surf_quadrature = w * pairwise_sum(surf_cells);
    return m;
}

QuadResult induced_measure_pairing(const CurveSpec& curve, const ArcLengthTable& table, double eps,
                                   const std::function<double(const Vec3&)>& h) {
    const TubeContext ctx = make_context(curve, table, eps);
    auto rule = [&](int n_s, int n_theta, int n_r) {
        const GaussRule& g = gauss_legendre(n_r);
        std::vector<double> cells(static_cast<std::size_t>(n_s));
        for (int i = 0; i < n_s; ++i) {
            const LocalFrame f = local_frame(curve, kTwoPi * i / n_s);
            double acc = 0.0;
            for (int j = 0; j < n_theta; ++j) {
                const double th = kTwoPi * j / n_theta;
                const Vec3 dir = std::cos(th) * f.normal + std::sin(th) * f.binormal;
                for (std::size_t q = 0; q < g.nodes.size(); ++q) {
                    const double r = 0.5 * eps * (1.0 + g.nodes[q]);
                    acc += 0.5 * eps * g.weights[q] * r * (1.0 - r * f.curvature * std::cos(th)) * h(f.point + r * dir);
                }
            }
            cells[static_cast<std::size_t>(i)] = f.speed * acc;
        }
        return (kTwoPi / n_s) * (kTwoPi / n_theta) * pairwise_sum(cells) / ctx.vol;
    };
    const double fine = rule(512, 32, 16);
    const double coarse = rule(256, 16, 10);
    return {fine, std::abs(fine - coarse)};
}

std::vector<double> measure_ratio_limit(const CurveSpec& curve, const ArcLengthTable& table,
                                        std::span<const double> eps_list) {
    std::vector<double> out;
    for (double e : eps_list) out.push_back(tube_measures(curve, table, e).vol_quadrature / (e * e));
    return out;
}

TubeSeries tube_alpha_coeffs(const CurveSpec& curve, const ArcLengthTable& table, double eps, bool zero_curvature) {
    const TubeContext ctx = make_context(curve, table, eps);
    TubeSeries ts;
    ts.eps = eps;
    ts.length = ctx.length;
    ts.vol = ctx.vol;
    ts.surf = kTwoPi * eps * ctx.length;
    ts.alpha1_eps = -2.0 * eps * ctx.length * std::sqrt(kPi);

    // 1/(1 - a cos th) has Fourier decay ((1 - sqrt(1 - a^2)) / a)^n; 512 nodes
    // reach rounding level for a = eps k <= 0.99
    constexpr int kS = 512, kTheta = 512;
    std::vector<double> cells(kS);
    for (int i = 0; i < kS; ++i) {
        const LocalFrame f = local_frame(curve, kTwoPi * i / kS);
        const double k = zero_curvature ? 0.0 : f.curvature;
        std::vector<double> row(kTheta);
        for (int j = 0; j < kTheta; ++j) {
            const double c = std::cos(kTwoPi * j / kTheta);
            const double d = 1.0 - eps * k * c;
            const double a1 = 2.0 * k * c / d;
            const double a0 = -3.0 * k * k * c * c / (d * d);
            row[static_cast<std::size_t>(j)] = (-3.0 / (eps * eps) + a1 / eps + a0) * d;
        }
        cells[static_cast<std::size_t>(i)] = f.speed * pairwise_sum(row);
    }
    const double integral = (kTwoPi / kS) * (kTwoPi / kTheta) * pairwise_sum(cells);
    ts.alpha3_eps = -eps / (12.0 * std::sqrt(kPi)) * integral;
    return ts;
}

TubeResult tube_heat_content(const CurveSpec& curve, const ArcLengthTable& table, double t, const TubeSpec& spec) {
    spec.validate();
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidParameter("tube_heat_content: t must be positive");
    const TubeContext ctx = make_context(curve, table, spec.eps);
    const TubeBackend backend = spec.backend == TubeBackend::automatic
                                    ? (spec.n_s <= 64 ? TubeBackend::product : TubeBackend::qmc)
                                    : spec.backend;
    TubeResult out;
    if (backend == TubeBackend::qmc) {
        out = qmc_rule(ctx, t, spec);
    } else {
        const RuleSize fine{spec.n_s, spec.n_theta, spec.n_r, spec.n_inner};
        const RuleSize coarse{std::max(1, spec.n_s / 2), std::max(2, spec.n_theta / 2), std::max(2, 2 * spec.n_r / 3),
                              std::max(4, 4 * spec.n_inner / 5)};
        const double j_fine = product_rule(ctx, t, fine);
        const double j_coarse = product_rule(ctx, t, coarse);
        out.backend = TubeBackend::product;
        out.value = j_fine / (ctx.vol * ctx.vol);
        out.error = std::abs(j_fine - j_coarse) / (ctx.vol * ctx.vol);
    }
    if (out.error > spec.rel_tol * std::abs(out.value)) {
        throw ToleranceNotMet("tube_heat_content: error estimate above tolerance", out.value, out.error);
    }
    return out;
}

TubeExpansionFit tube_expansion_check(const CurveSpec& curve, const ArcLengthTable& table,
                                      std::span<const double> t_grid, const TubeSpec& spec) {
    spec.validate();
    for (double t : t_grid) {
        if (!(t > 0.0) || std::sqrt(t) > spec.eps / 10.0) {
            std::ostringstream msg;
            msg << "tube_expansion_check: t = " << t << " violates sqrt(t) <= eps/10";
            throw InvalidParameter(msg.str());
        }
    }
    const double vol = kPi * spec.eps * spec.eps * table.total_length();
    TubeExpansionFit out;
    std::vector<double> y;
    for (double t : t_grid) {
        const TubeResult r = tube_heat_content(curve, table, t, spec);
        out.h_values.push_back(r.value);
        out.h_errors.push_back(r.error);
        y.push_back(r.value * vol * vol);
    }
    const std::vector<double> exps = {0.0, 0.5, 1.5};
    const PowerFit fit = powerbasis_fit(t_grid, y, exps);
    out.beta0 = fit.coeffs[0];
    out.beta1 = fit.coeffs[1];
    out.beta3 = fit.coeffs[2];
    out.max_residual = fit.max_residual;
    out.condition_number = fit.condition_number;
    return out;
}

double distance_to_curve(const CurveSpec& curve, const Vec3& y, double u_hint) {
    double u = u_hint;
    return std::min(local_distance(curve, y, u_hint, u), global_distance(curve, y));
}

}  // namespace heatcurve
