#include "heatcurve/curve.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "heatcurve/errors.hpp"
#include "heatcurve/numerics.hpp"
#include "taylor.hpp"

namespace heatcurve {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_index_floor(double x, double period) { return std::floor(x / period); }

}  // namespace

std::string to_string(CurveFamily family) {
    switch (family) {
        case CurveFamily::circle: return "circle";
        case CurveFamily::ellipse: return "ellipse";
        case CurveFamily::trefoil: return "trefoil";
        case CurveFamily::custom: return "custom";
    }
    return "custom";
}

CurveFamily parse_family(std::string_view name) {
    if (name == "circle") return CurveFamily::circle;
    if (name == "ellipse") return CurveFamily::ellipse;
    if (name == "trefoil") return CurveFamily::trefoil;
    if (name == "custom") return CurveFamily::custom;
    throw InvalidParameter("unknown curve family '" + std::string(name) + "'");
}

Vec3 CurveSpec::point(double u) const { return derivatives(*this, u, 0)[0]; }

CurveSpec make_builtin(CurveFamily family, std::span<const double> params) {
    auto require_positive = [](std::span<const double> p, std::size_t count, const char* what) {
        if (p.size() != count) throw InvalidParameter(std::string(what) + ": wrong number of parameters");
        for (double x : p) {
            if (!(x > 0.0) || !std::isfinite(x)) throw InvalidParameter(std::string(what) + ": parameters must be positive");
        }
    };

    CurveSpec curve;
    curve.family = family;
    switch (family) {
        case CurveFamily::circle: {
            std::vector<double> p = params.empty() ? std::vector<double>{1.0} : std::vector<double>(params.begin(), params.end());
            require_positive(p, 1, "circle");
            curve.harmonics.resize(2);
            curve.harmonics[1].ax = p[0];
            curve.harmonics[1].by = p[0];
            curve.params = p;
            break;
        }
        case CurveFamily::ellipse: {
            std::vector<double> p = params.empty() ? std::vector<double>{2.0, 1.0} : std::vector<double>(params.begin(), params.end());
            require_positive(p, 2, "ellipse");
            curve.harmonics.resize(2);
            curve.harmonics[1].ax = p[0];
            curve.harmonics[1].by = p[1];
            curve.params = p;
            break;
        }
        case CurveFamily::trefoil: {
            // (2,3) torus knot: ((R + r cos 3u) cos 2u, (R + r cos 3u) sin 2u, r sin 3u)
            std::vector<double> p = params.empty() ? std::vector<double>{2.0, 1.0} : std::vector<double>(params.begin(), params.end());
            require_positive(p, 2, "trefoil");
            if (!(p[0] > p[1])) throw InvalidParameter("trefoil: torus radii must satisfy R > r");
            const double big = p[0], small = p[1];
            curve.harmonics.resize(6);
            curve.harmonics[1].ax = 0.5 * small;
            curve.harmonics[1].by = -0.5 * small;
            curve.harmonics[2].ax = big;
            curve.harmonics[2].by = big;
            curve.harmonics[3].bz = small;
            curve.harmonics[5].ax = 0.5 * small;
            curve.harmonics[5].by = 0.5 * small;
            curve.params = p;
            break;
        }
        case CurveFamily::custom:
            throw InvalidParameter("custom curves are loaded from a coefficient file");
    }
    check_biregular(curve);
    return curve;
}

CurveSpec parse_curve_text(std::string_view text) {
    CurveSpec curve;
    curve.family = CurveFamily::custom;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        std::array<double, 6> v{};
        for (int k = 0; k < 6; ++k) {
            std::string tok;
            if (!(fields >> tok)) {
                throw InvalidParameter("curve file line " + std::to_string(line_no) + ": expected 6 numbers, found " + std::to_string(k));
            }
            std::size_t used = 0;
            try {
                v[static_cast<std::size_t>(k)] = std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size() || !std::isfinite(v[static_cast<std::size_t>(k)])) {
                throw InvalidParameter("curve file line " + std::to_string(line_no) + ": field " + std::to_string(k + 1) + " is not a number: '" + tok + "'");
            }
        }
        std::string extra;
        if (fields >> extra) throw InvalidParameter("curve file line " + std::to_string(line_no) + ": more than 6 fields");
        curve.harmonics.push_back({v[0], v[1], v[2], v[3], v[4], v[5]});
    }
    if (curve.harmonics.size() < 2) throw InvalidParameter("curve file: need harmonics 0 and at least 1");
    return curve;
}

CurveSpec load_curve_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("cannot open curve file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_curve_text(buf.str());
}

std::vector<Vec3> derivatives(const CurveSpec& curve, double u, int order) {
    if (order < 0 || order > 8) throw InvalidParameter("derivatives: order must lie in [0, 8]");
    std::vector<Vec3> out(static_cast<std::size_t>(order) + 1, Vec3::Zero());
    for (std::size_t n = 0; n < curve.harmonics.size(); ++n) {
        const Harmonic& h = curve.harmonics[n];
        const double nd = static_cast<double>(n);
        const double c = std::cos(nd * u), s = std::sin(nd * u);
        const Vec3 a(h.ax, h.ay, h.az), b(h.bx, h.by, h.bz);
        double scale = 1.0;
        for (int j = 0; j <= order; ++j) {
            // d^j/du^j of cos(nu), sin(nu) cycles through (c, -s, -c, s) and (s, c, -s, -c)
            double dc = 0.0, ds = 0.0;
            switch (j % 4) {
                case 0: dc = c; ds = s; break;
                case 1: dc = -s; ds = c; break;
                case 2: dc = -c; ds = -s; break;
                default: dc = s; ds = -c; break;
            }
            out[static_cast<std::size_t>(j)] += scale * (dc * a + ds * b);
            scale *= nd;
        }
    }
    return out;
}

Vec3 chord(const CurveSpec& curve, double u, double du) {
    Vec3 out = Vec3::Zero();
    for (std::size_t n = 1; n < curve.harmonics.size(); ++n) {
        const Harmonic& h = curve.harmonics[n];
        const double nd = static_cast<double>(n);
        const double half = std::sin(0.5 * nd * du);
        const double mid = nd * (u + 0.5 * du);
        const double dcos = -2.0 * std::sin(mid) * half;
        const double dsin = 2.0 * std::cos(mid) * half;
        out += dcos * Vec3(h.ax, h.ay, h.az) + dsin * Vec3(h.bx, h.by, h.bz);
    }
    return out;
}

CurveSpec shifted(const CurveSpec& curve, double shift) {
    CurveSpec out = curve;
    out.family = CurveFamily::custom;
    out.params.clear();
    for (std::size_t n = 0; n < curve.harmonics.size(); ++n) {
        const double c = std::cos(n * shift), s = std::sin(n * shift);
        const Harmonic& h = curve.harmonics[n];
        Harmonic& o = out.harmonics[n];
        o.ax = h.ax * c + h.bx * s;
        o.bx = h.bx * c - h.ax * s;
        o.ay = h.ay * c + h.by * s;
        o.by = h.by * c - h.ay * s;
        o.az = h.az * c + h.bz * s;
        o.bz = h.bz * c - h.az * s;
    }
    return out;
}

CurveSpec scaled(const CurveSpec& curve, double factor) {
    if (!(factor > 0.0)) throw InvalidParameter("scaled: factor must be positive");
    CurveSpec out = curve;
    for (auto& h : out.harmonics) {
        h.ax *= factor; h.bx *= factor;
        h.ay *= factor; h.by *= factor;
        h.az *= factor; h.bz *= factor;
    }
    for (auto& p : out.params) p *= factor;
    return out;
}

void check_biregular(const CurveSpec& curve) {
    constexpr int kGrid = 4096;
    for (int i = 0; i < kGrid; ++i) {
        const double u = kTwoPi * i / kGrid;
        const auto d = derivatives(curve, u, 2);
        const double speed = d[1].norm();
        const double cross = d[1].cross(d[2]).norm();
        if (!(cross >= 1e-8 * speed * speed * speed) || !(speed > 0.0)) {
            std::ostringstream msg;
            msg << "curve is not biregular near u = " << u;
            throw DegenerateCurve(msg.str());
        }
    }
}

LocalFrame local_frame(const CurveSpec& curve, double u) {
    const auto d = derivatives(curve, u, 2);
    LocalFrame f;
    f.point = d[0];
    f.speed = d[1].norm();
    const Vec3 cross = d[1].cross(d[2]);
    const double cn = cross.norm();
    f.curvature = cn / (f.speed * f.speed * f.speed);
    f.tangent = d[1] / f.speed;
    f.binormal = cn > 0.0 ? Vec3(cross / cn) : Vec3::Zero();
    f.normal = f.binormal.cross(f.tangent);
    return f;
}

double max_curvature(const CurveSpec& curve, int grid) {
    double kmax = 0.0;
    for (int i = 0; i < grid; ++i) kmax = std::max(kmax, local_frame(curve, kTwoPi * i / grid).curvature);
    return kmax;
}

// ---------------------------------------------------------------------------
// Arc length

ArcLengthTable::ArcLengthTable(CurveSpec curve, int n_samples) : curve_(std::move(curve)) {
    if (n_samples < 64) throw InvalidParameter("arclength_reparam: n_samples must be at least 64");
    const auto n = static_cast<std::size_t>(n_samples);
    u_.resize(n + 1);
    s_.resize(n + 1);
    speed_.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        u_[i] = kTwoPi * static_cast<double>(i) / n_samples;
        speed_[i] = derivatives(curve_, u_[i], 1)[1].norm();
    }
    std::vector<double> cells(n);
    for (std::size_t i = 0; i < n; ++i) cells[i] = cell_integral(u_[i], u_[i + 1]);
    s_[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) s_[i + 1] = s_[i] + cells[i];
    length_ = pairwise_sum(cells);
    s_[n] = length_;
}

double ArcLengthTable::cell_integral(double a, double b) const {
    if (a == b) return 0.0;
    auto speed = [this](double u) { return derivatives(curve_, u, 1)[1].norm(); };
    if (b < a) return -detail::gk15(speed, b, a, 0).value;
    return detail::gk15(speed, a, b, 0).value;
}

double ArcLengthTable::s_of_u(double u) const {
    const double k = wrap_index_floor(u, kTwoPi);
    double w = u - k * kTwoPi;
    const int n = samples();
    auto i = static_cast<std::size_t>(std::clamp(static_cast<int>(w / (kTwoPi / n)), 0, n - 1));
    return k * length_ + s_[i] + cell_integral(u_[i], w);
}

double ArcLengthTable::u_of_s(double s) const {
    const double k = wrap_index_floor(s, length_);
    const double r = s - k * length_;
    const int n = samples();
    auto it = std::upper_bound(s_.begin(), s_.end(), r);
    auto i = static_cast<std::size_t>(std::clamp(static_cast<int>(it - s_.begin()) - 1, 0, n - 1));

    // cubic Hermite of u(s) on the cell (du/ds = 1/speed), then Newton with a bracket
    const double s0 = s_[i], s1 = s_[i + 1], hs = s1 - s0;
    const double p = (r - s0) / hs;
    const double h00 = (1 + 2 * p) * (1 - p) * (1 - p), h10 = p * (1 - p) * (1 - p);
    const double h01 = p * p * (3 - 2 * p), h11 = p * p * (p - 1);
    double u = h00 * u_[i] + h10 * hs / speed_[i] + h01 * u_[i + 1] + h11 * hs / speed_[i + 1];
    double lo = u_[i], hi = u_[i + 1];
    u = std::clamp(u, lo, hi);
    for (int iter = 0; iter < 50; ++iter) {
        const double f = s0 + cell_integral(u_[i], u) - r;
        if (f > 0.0) hi = u; else lo = u;
        const double step = f / derivatives(curve_, u, 1)[1].norm();
        double next = u - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - u) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(u))) {
            u = next;
            break;
        }
        u = next;
    }
    return u + k * kTwoPi;
}

double ArcLengthTable::u_offset(double u, double ds) const {
    if (ds == 0.0) return 0.0;
    const double cell = kTwoPi / samples();
    const double speed0 = derivatives(curve_, u, 1)[1].norm();
    double du = ds / speed0;
    if (std::abs(du) > 64.0 * cell) return u_of_s(s_of_u(u) + ds) - u;
    // equal panels no wider than about one cell keep GK15 at full accuracy
    const int panels = std::max(1, static_cast<int>(std::ceil(1.5 * std::abs(du) / cell)));
    auto arc = [&](double d) {
        std::vector<double> parts(static_cast<std::size_t>(panels));
        // integrate in the offset variable so that du is never rounded against u
        auto speed = [&](double x) { return derivatives(curve_, u + x, 1)[1].norm(); };
        for (int i = 0; i < panels; ++i) {
            const double a = d * i / panels, b = d * (i + 1) / panels;
            parts[static_cast<std::size_t>(i)] = d > 0 ? detail::gk15(speed, a, b, 0).value : -detail::gk15(speed, b, a, 0).value;
        }
        return pairwise_sum(parts);
    };
    for (int iter = 0; iter < 30; ++iter) {
        const double f = arc(du) - ds;
        const double step = f / derivatives(curve_, u + du, 1)[1].norm();
        du -= step;
        if (std::abs(step) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(du)) break;
    }
    return du;
}

ArcLengthTable arclength_reparam(const CurveSpec& curve, int n_samples) {
    check_biregular(curve);
    return ArcLengthTable(curve, n_samples);
}

// ---------------------------------------------------------------------------
// Arc-length jets

namespace {

// Taylor coefficients in arc length of gamma about the point with parameter u.
std::array<Vec3, detail::kJetOrder + 1> arclength_series(const CurveSpec& curve, double u) {
    using detail::Taylor;
    using detail::kJetOrder;
    const auto d = derivatives(curve, u, kJetOrder);
    std::array<Taylor, 3> g;
    double fact = 1.0;
    for (int j = 0; j <= kJetOrder; ++j) {
        if (j > 0) fact *= j;
        for (int c = 0; c < 3; ++c) g[static_cast<std::size_t>(c)][j] = d[static_cast<std::size_t>(j)](c) / fact;
    }
    Taylor speed_sq;
    for (int c = 0; c < 3; ++c) {
        const Taylor dg = detail::derivative(g[static_cast<std::size_t>(c)]);
        speed_sq = speed_sq + dg * dg;
    }
    const Taylor arc = detail::integral(detail::sqrt(speed_sq));  // s(u + h) - s(u)
    const Taylor h_of_s = detail::revert(arc);
    std::array<Vec3, kJetOrder + 1> out;
    for (int c = 0; c < 3; ++c) {
        const Taylor comp = detail::compose(g[static_cast<std::size_t>(c)], h_of_s);
        for (int j = 0; j <= kJetOrder; ++j) out[static_cast<std::size_t>(j)](c) = comp[j];
    }
    return out;
}

}  // namespace

std::vector<Vec3> arclength_derivatives(const CurveSpec& curve, const ArcLengthTable& table, double s, int order) {
    if (order < 0 || order > detail::kJetOrder) throw InvalidParameter("arclength_derivatives: order must lie in [0, 8]");
    const auto series = arclength_series(curve, table.u_of_s(s));
    std::vector<Vec3> out(static_cast<std::size_t>(order) + 1);
    double fact = 1.0;
    for (int j = 0; j <= order; ++j) {
        if (j > 0) fact *= j;
        out[static_cast<std::size_t>(j)] = fact * series[static_cast<std::size_t>(j)];
    }
    return out;
}

FrenetData frenet(const CurveSpec& curve, const ArcLengthTable& table, double s, double min_curvature) {
    const auto d = arclength_derivatives(curve, table, s, 4);
    FrenetData f;
    f.s = s;
    f.point = d[0];
    f.curvature = d[2].norm();
    if (!(f.curvature >= min_curvature)) {
        std::ostringstream msg;
        msg << "curvature " << f.curvature << " below threshold at s = " << s;
        throw DegenerateFrame(msg.str());
    }
    // normalise T against rounding in the series inversion
    f.tangent = d[1].normalized();
    f.normal = (d[2] - d[2].dot(f.tangent) * f.tangent).normalized();
    f.binormal = f.tangent.cross(f.normal);
    f.curvature_jet = {d[2].squaredNorm(), 2.0 * d[2].dot(d[3]),
                       2.0 * d[3].squaredNorm() + 2.0 * d[2].dot(d[4])};
    f.third_deriv_sq = d[3].squaredNorm();
    return f;
}

// ---------------------------------------------------------------------------
// Embedding

EmbeddingInfo check_embedded(const CurveSpec& curve, const ArcLengthTable& table, int grid) {
    if (grid < 16) throw InvalidParameter("check_embedded: grid too small");
    const double len = table.total_length();
    const double kmax = max_curvature(curve);
    const double exclusion = std::min(std::numbers::pi / kmax, 0.5 * len) * (1.0 - 1e-9);

    const auto n = static_cast<std::size_t>(grid);
    std::vector<double> us(n);
    std::vector<Vec3> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        us[i] = table.u_of_s(len * static_cast<double>(i) / grid);
        pts[i] = curve.point(us[i]);
    }
    const double spacing = len / grid;
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::size_t gap = std::min(j - i, n - (j - i));
            if (static_cast<double>(gap) * spacing < exclusion) continue;
            const double d2 = (pts[i] - pts[j]).squaredNorm();
            if (d2 < best) {
                best = d2;
                bi = i;
                bj = j;
            }
        }
    }
    if (!std::isfinite(best)) throw NotSimple("check_embedded: no admissible pairs");

    // Newton polish of |gamma(a) - gamma(b)|^2 from the best grid pair
    auto separation = [&](double ua, double ub) {
        double gap = std::abs(table.s_of_u(ub) - table.s_of_u(ua));
        gap = std::fmod(gap, len);
        return std::min(gap, len - gap);
    };
    double ua = us[bi], ub = us[bj];
    for (int iter = 0; iter < 30; ++iter) {
        const auto da = derivatives(curve, ua, 2);
        const auto db = derivatives(curve, ub, 2);
        const Vec3 diff = da[0] - db[0];
        const Eigen::Vector2d grad(2.0 * diff.dot(da[1]), -2.0 * diff.dot(db[1]));
        Eigen::Matrix2d hess;
        hess(0, 0) = 2.0 * da[1].squaredNorm() + 2.0 * diff.dot(da[2]);
        hess(1, 1) = 2.0 * db[1].squaredNorm() - 2.0 * diff.dot(db[2]);
        hess(0, 1) = hess(1, 0) = -2.0 * da[1].dot(db[1]);
        if (std::abs(hess.determinant()) < 1e-14 * hess.squaredNorm()) break;
        const Eigen::Vector2d step = hess.lu().solve(grad);
        const double na = ua - step(0), nb = ub - step(1);
        const double value = (curve.point(na) - curve.point(nb)).squaredNorm();
        if (!(value < best) || separation(na, nb) < exclusion) break;
        best = value;
        ua = na;
        ub = nb;
        if (step.norm() < 1e-14) break;
    }

    EmbeddingInfo info;
    info.max_curvature = kmax;
    info.min_self_distance = std::sqrt(best);
    if (info.min_self_distance < 1e-6 * len) {
        std::ostringstream msg;
        msg << "curve self-intersects (min chord " << info.min_self_distance << ")";
        throw NotSimple(msg.str());
    }
    info.reach_bound = 0.9 * std::min(1.0 / kmax, 0.5 * info.min_self_distance);
    return info;
}

}  // namespace heatcurve
